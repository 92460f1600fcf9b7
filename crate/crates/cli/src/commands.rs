use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use eprod_core::interchange::Document;
use eprod_core::measure::{entanglement_production, entanglement_production_ket, MeasureResult};
use eprod_core::reproduce::{is_known_key, reproduce as run_table, ReproRow};
use eprod_core::spin::{ising_limit_table, linspace, thermal_sweep, Quantity};
use eprod_core::states::{expected_epsilon, make_operator, Family, FamilySpec};
use eprod_core::tensor::DENSE_LIMIT;
use eprod_core::transitions::{regime_table, Regime, RegimeInput, Transition};
use eprod_core::{Error, Result, C64};
use serde_json::Value;

use crate::table::{Format, Row, Table};
use crate::{Common, EvolveArgs, FamilyArgs, ThermalArgs, TransitionArgs};

/// Largest |Δ| between a computed value and its closed form that still counts as agreement.
const CHECK_TOL: f64 = 1e-8;
const RANGE_SLACK: f64 = 1e-9;
const ROW_SUM_TOL: f64 = 1e-8;

fn with_output(common: &Common, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match &common.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn parse_complex(s: &str) -> Result<C64> {
    let bad = || Error::Parse(format!("cannot read {s:?} as `re` or `re:im`"));
    let mut parts = s.trim().splitn(2, ':');
    let re: f64 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let im: f64 = match parts.next() {
        Some(x) => x.trim().parse().map_err(|_| bad())?,
        None => 0.0,
    };
    Ok(C64::new(re, im))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse().map_err(|_| Error::Parse(format!("cannot read {x:?} as {what}"))))
        .collect()
}

fn family_spec(a: &FamilyArgs) -> Result<FamilySpec> {
    let coeffs = || -> Result<Vec<C64>> {
        let s = a.coeffs.as_deref().ok_or_else(|| Error::Parse("--coeffs is required for this family".into()))?;
        s.split(',').map(parse_complex).collect()
    };
    let spec = match a.family {
        Family::Epr => FamilySpec::epr(a.sign.into()),
        Family::Bell => FamilySpec::bell(a.sign.into()),
        Family::Ghz => FamilySpec::ghz(a.n).with_sign(a.sign.into()),
        Family::Multicat => {
            let c1 = match &a.c1 {
                Some(s) => parse_complex(s)?,
                None => C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            };
            let c2 = match &a.c2 {
                Some(s) => parse_complex(s)?,
                None => C64::new((1.0 - c1.norm_sqr()).max(0.0).sqrt(), 0.0),
            };
            FamilySpec::multicat(a.n, c1, c2)
        }
        Family::Multimode => FamilySpec::multimode(a.n, coeffs()?),
        Family::HartreeFock => FamilySpec::hartree_fock(a.n, a.statistics),
        Family::HfReduced => {
            let p = a.p.ok_or_else(|| Error::Parse("--p is required for hf-reduced".into()))?;
            FamilySpec::hf_reduced(a.n, p, a.statistics)
        }
        Family::MixedMultimode => {
            let p = a.p.ok_or_else(|| Error::Parse("--p is required for mixed-multimode".into()))?;
            let w = coeffs()?
                .into_iter()
                .map(|z| if z.im == 0.0 { Ok(z.re) } else { Err(Error::Parse("populations must be real".into())) })
                .collect::<Result<Vec<f64>>>()?;
            FamilySpec::mixed_multimode(a.n, p, w).with_unit_trace(a.unit_trace)
        }
        Family::SeparableExample => FamilySpec::separable_example(),
    };
    Ok(spec)
}

fn measure_extras(r: &MeasureResult) -> Vec<Value> {
    let cert = r.certificate.as_ref();
    vec![
        Value::from(r.norm_a),
        Value::from(r.norm_prod),
        cert.map_or(Value::Null, |c| Value::from(c.method.as_str())),
        cert.map_or(Value::Null, |c| Value::from(c.sweeps_used)),
        cert.map_or(Value::Null, |c| Value::from(c.restarts_used)),
    ]
}

const MEASURE_EXTRAS: [&str; 5] = ["norm_a", "norm_prod", "method", "sweeps_used", "restarts_used"];

pub fn compute(common: &Common, a: &FamilyArgs) -> Result<u8> {
    let cfg = common.solver()?;
    let spec = family_spec(a)?;
    let op = make_operator(&spec)?;
    let reference = expected_epsilon(&spec, common.base)?;
    let r = entanglement_production(op.as_ref(), &cfg, common.base)?;
    let mut row = Row::new(spec.family.as_str()).compared(r.epsilon, Some(reference));
    row.n = Some(spec.n as u64);
    row.p = Some(spec.order() as u64);
    row.converged = Some(r.converged);
    row.extras = measure_extras(&r);
    let delta = row.delta.unwrap_or(0.0);
    let mut table = Table::new("family", &MEASURE_EXTRAS);
    table.push(row);
    with_output(common, |w| table.write(common.format, w))?;
    Ok(if !r.converged {
        3
    } else if delta > CHECK_TOL {
        1
    } else {
        0
    })
}

pub fn measure_file(common: &Common, path: &Path) -> Result<u8> {
    let cfg = common.solver()?;
    let doc = Document::read(path)?;
    let (parts, r) = match &doc {
        Document::Ket { .. } => {
            let psi = doc.to_ket()?;
            (psi.shape().parties(), entanglement_production_ket(&psi, &cfg, common.base)?)
        }
        Document::Operator { .. } | Document::ProductOperator { .. } => {
            let a = doc.to_operator()?;
            (a.shape().parties(), entanglement_production(&a, &cfg, common.base)?)
        }
        other => return Err(Error::Parse(format!("cannot measure a {} document", other.kind()))),
    };
    let mut row = Row::new(doc.kind()).compared(r.epsilon, None);
    row.n = Some(parts as u64);
    row.p = Some(parts as u64);
    row.converged = Some(r.converged);
    row.extras = measure_extras(&r);
    let mut table = Table::new("family", &MEASURE_EXTRAS);
    table.push(row);
    with_output(common, |w| table.write(common.format, w))?;
    Ok(if r.converged { 0 } else { 3 })
}

pub fn thermal(common: &Common, a: &ThermalArgs) -> Result<u8> {
    let cfg = common.solver()?;
    if a.g_steps == 0 || a.b_steps == 0 {
        return Err(Error::Parse("grid steps must be at least 1".into()));
    }
    if ![a.g_min, a.g_max, a.b_min, a.b_max].iter().all(|x| x.is_finite()) {
        return Err(Error::Parse("grid bounds must be finite".into()));
    }
    let gs = linspace(a.g_min, a.g_max, a.g_steps);
    let bs = linspace(a.b_min, a.b_max, a.b_steps);
    let sweep = thermal_sweep(&gs, &bs, &cfg, common.base)?;
    let mut table = Table::new("family", &["magnetization", "quantity", "limit"]);
    let mut mismatch = false;
    for s in &sweep {
        let mut row = Row::new("ising").compared(s.epsilon_pipeline, Some(s.epsilon_closed));
        row.n = Some(2);
        row.p = Some(2);
        row.g = Some(s.g);
        row.b = Some(s.b);
        row.converged = Some(s.converged);
        mismatch |= !s.converged || row.delta.is_some_and(|d| d > CHECK_TOL);
        row.extras = vec![Value::from(s.magnetization), Value::from("epsilon"), Value::Null];
        table.push(row);
    }
    let mut limit_failed = false;
    if !a.no_limits {
        for l in ising_limit_table() {
            let mut row = Row::new("ising_limit");
            row.n = Some(2);
            row.p = Some(2);
            row.g = Some(l.g);
            row.b = Some(l.b);
            let (quantity, magnetization) = match l.quantity {
                Quantity::Epsilon => {
                    row = row.compared(common.base.from_nats(l.estimate), Some(common.base.from_nats(l.target)));
                    ("epsilon", Value::Null)
                }
                Quantity::Magnetization => {
                    row.reference = Some(l.target);
                    row.delta = Some(l.error());
                    ("magnetization", Value::from(l.estimate))
                }
            };
            limit_failed |= !l.reached || l.error() > 1e-6;
            row.extras = vec![magnetization, Value::from(quantity), Value::from(l.name.clone())];
            table.push(row);
        }
    }
    with_output(common, |w| table.write(common.format, w))?;
    Ok(if mismatch {
        3
    } else if limit_failed {
        1
    } else {
        0
    })
}

/// Rows `(t, w)` of a trajectory file.
fn read_trajectory(path: &Path) -> Result<Vec<(f64, Vec<f64>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => {
                if v.len() < 2 {
                    return Err(Error::Parse(format!("line {}: need t and at least one population", i + 1)));
                }
                rows.push((v[0], v[1..].to_vec()));
            }
            // a header line
            Err(_) if i == 0 => continue,
            Err(e) => return Err(Error::Parse(format!("line {}: {e}", i + 1))),
        }
    }
    if rows.is_empty() {
        return Err(Error::Parse("trajectory has no rows".into()));
    }
    Ok(rows)
}

fn check_trajectory(rows: &[(f64, Vec<f64>)]) -> Result<usize> {
    let m = rows[0].1.len();
    for (t, w) in rows {
        if w.len() != m {
            return Err(Error::Parse(format!("t = {t}: {} populations, expected {m}", w.len())));
        }
        if !t.is_finite() || w.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::Parse(format!("t = {t}: populations must lie in [0, 1]")));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::Parse(format!("t = {t}: populations sum to {sum}")));
        }
    }
    Ok(m)
}

pub fn evolve(common: &Common, a: &EvolveArgs) -> Result<u8> {
    let cfg = common.solver()?;
    let rows = match (&a.trajectory, a.rabi) {
        (Some(path), _) => read_trajectory(path)?,
        (None, Some(omega)) => {
            if !omega.is_finite() || omega == 0.0 {
                return Err(Error::Parse("--rabi needs a finite nonzero frequency".into()));
            }
            let t_max = a.t_max.unwrap_or(2.0 * std::f64::consts::PI / omega.abs());
            if a.t_steps == 0 || !t_max.is_finite() {
                return Err(Error::Parse("--t-steps must be positive and --t-max finite".into()));
            }
            linspace(0.0, t_max, a.t_steps)
                .into_iter()
                .map(|t| {
                    let w1 = (0.5 * omega * t).cos().powi(2);
                    (t, vec![w1, 1.0 - w1])
                })
                .collect()
        }
        (None, None) => return Err(Error::Parse("give --trajectory or --rabi".into())),
    };
    let m = check_trajectory(&rows)?;
    let p = a.p;
    let n = a.n.unwrap_or(p);
    if p == 0 || n < p {
        return Err(Error::Parse(format!("need 1 ≤ p ≤ N, got p = {p}, N = {n}")));
    }
    if m.checked_pow(p as u32).is_none_or(|d| d > DENSE_LIMIT) {
        return Err(Error::Parse(format!("{m} modes at p = {p} exceed dimension {DENSE_LIMIT}")));
    }
    let top = common.base.from_nats((p as f64 - 1.0) * (m as f64).ln());
    let mut table = Table::new("family", &["sup_w"]);
    let (mut mismatch, mut out_of_range) = (false, false);
    for (t, w) in rows {
        let sup = w.iter().copied().fold(0.0, f64::max);
        let spec = FamilySpec::mixed_multimode(n, p, w);
        let r = entanglement_production(make_operator(&spec)?.as_ref(), &cfg, common.base)?;
        let mut row = Row::new("mixed_multimode").compared(r.epsilon, Some(expected_epsilon(&spec, common.base)?));
        row.n = Some(n as u64);
        row.p = Some(p as u64);
        row.t = Some(t);
        row.converged = Some(r.converged);
        row.extras = vec![Value::from(sup)];
        mismatch |= !r.converged || row.delta.is_some_and(|d| d > CHECK_TOL);
        out_of_range |= r.epsilon < -RANGE_SLACK || r.epsilon > top + RANGE_SLACK;
        table.push(row);
    }
    with_output(common, |w| table.write(common.format, w))?;
    Ok(if mismatch {
        3
    } else if out_of_range {
        1
    } else {
        0
    })
}

pub fn transitions(common: &Common, a: &TransitionArgs) -> Result<u8> {
    let ns: Vec<u64> = parse_list(&a.n, "a particle number")?;
    let ps: Vec<u64> = parse_list(&a.p, "a reduction order")?;
    let template = RegimeInput { p: 1, n: 1, s: a.spin, m: a.magnetization, c_p: a.cp, c_1: a.c1, regime: Regime::BelowTc };
    template.validate()?;
    let which: Vec<Transition> = match a.transition {
        Some(t) => vec![t],
        None => Transition::ALL.to_vec(),
    };
    let mut table = Table::new("transition", &["regime", "omega", "finite_n"]);
    for t in which {
        for r in regime_table(t, &ns, &ps, &template, common.base) {
            let mut row = Row::new(r.transition).compared(r.epsilon, None);
            row.n = Some(r.n);
            row.p = Some(r.p);
            row.extras = vec![
                Value::from(r.regime),
                r.omega.map_or(Value::Null, Value::from),
                r.finite_n.map_or(Value::Null, Value::from),
            ];
            table.push(row);
        }
    }
    with_output(common, |w| table.write(common.format, w))?;
    Ok(0)
}

fn write_repro(rows: &[ReproRow], format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn reproduce(common: &Common, only: Option<&str>) -> Result<u8> {
    if let Some(key) = only {
        if !is_known_key(key) {
            return Err(Error::Parse(format!("unknown section or tag {key:?}")));
        }
    }
    let cfg = common.solver()?;
    let rows = run_table(&cfg, common.base, only);
    with_output(common, |w| write_repro(&rows, common.format, w))?;
    let failed: Vec<&ReproRow> = rows.iter().filter(|r| !r.passed).collect();
    eprintln!("{} of {} checks passed", rows.len() - failed.len(), rows.len());
    for r in &failed {
        eprintln!("FAIL {} {}", r.id, r.check);
    }
    Ok(if failed.is_empty() { 0 } else { 1 })
}
