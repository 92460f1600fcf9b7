//! The full table of closed-form checks, keyed by equation tags and grouped
//! into sections so that subsets can be run on their own.

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::dnorm::{dnorm, dnorm_bruteforce, max_product_overlap, schmidt_max, SolverConfig};
use crate::error::Result;
use crate::measure::{entanglement_production, ln_falling, property_suite, LogBase, PropertySettings};
use crate::spin::{
    ising_epsilon, ising_limit_table, ising_two_spin_density, linspace, meanfield_factorized, thermal_sweep,
    IsingParams, Quantity,
};
use crate::states::{expected_epsilon, make_density, make_operator, FamilySpec, Sign, Statistics};
use crate::tensor::{Ket, MultipartiteOperator, SpaceShape};
use crate::transitions::{
    bec_epsilon, classify_order, double_factorial, magnetic_epsilon, pairing_count, sc_epsilon,
    sc_norm_exponent, OrderClass, Regime, RegimeInput, PAIRING_COUNT_MAX,
};
use crate::C64;

/// One check of the table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReproRow {
    pub section: &'static str,
    /// Equation tag, e.g. `eq34`.
    pub id: &'static str,
    pub check: String,
    pub value: f64,
    pub reference: Option<f64>,
    pub delta: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

struct Table {
    section: &'static str,
    rows: Vec<ReproRow>,
}

impl Table {
    fn new(section: &'static str) -> Self {
        Self { section, rows: Vec::new() }
    }

    /// `|value − reference| ≤ tol`.
    fn close(&mut self, id: &'static str, check: String, value: f64, reference: f64, tol: f64) {
        let delta = (value - reference).abs();
        self.rows.push(ReproRow {
            section: self.section,
            id,
            check,
            value,
            reference: Some(reference),
            delta: Some(delta),
            tolerance: tol,
            passed: delta <= tol,
        });
    }

    /// A condition without a reference value; `value` is whatever the condition measured.
    fn holds(&mut self, id: &'static str, check: String, value: f64, tol: f64, passed: bool) {
        self.rows.push(ReproRow {
            section: self.section,
            id,
            check,
            value,
            reference: None,
            delta: None,
            tolerance: tol,
            passed,
        });
    }

    /// Records an error as a failed row.
    fn failed(&mut self, id: &'static str, check: String, err: impl std::fmt::Display) {
        self.holds(id, format!("{check}: {err}"), f64::NAN, 0.0, false);
    }
}

/// A section of the table and the equation tags it covers.
pub struct Section {
    pub name: &'static str,
    pub ids: &'static [&'static str],
    run: fn(&SolverConfig, LogBase) -> Vec<ReproRow>,
}

pub const SECTIONS: &[Section] = &[
    Section { name: "pure", ids: &["eq28", "eq31", "eq34", "eq37", "eq38", "eq41", "eq42"], run: pure_states },
    Section { name: "hartree_fock", ids: &["eq45", "eq47", "eq48"], run: hartree_fock },
    Section { name: "mixed", ids: &["separable", "eq60"], run: mixed },
    Section { name: "thermal", ids: &["eq75", "eq78", "eq79", "eq80", "eq81", "eq82"], run: thermal },
    Section { name: "meanfield", ids: &["eq85"], run: meanfield },
    Section {
        name: "transitions",
        ids: &["eq87", "eq89", "eq90", "eq92", "eq97", "eq99", "eq100", "order"],
        run: transitions,
    },
    Section { name: "properties", ids: &["eq21", "eq22", "eq23", "eq24", "eq25"], run: properties },
    Section { name: "oracles", ids: &["oracle"], run: oracles },
];

/// Runs the table. `only` selects the sections whose name or equation tags
/// contain the key; the thermal section is selected by any of its tags.
pub fn reproduce(cfg: &SolverConfig, base: LogBase, only: Option<&str>) -> Vec<ReproRow> {
    SECTIONS
        .iter()
        .filter(|s| only.is_none_or(|k| s.name == k || s.ids.contains(&k)))
        .flat_map(|s| (s.run)(cfg, base))
        .collect()
}

/// Whether `key` names a section or a tag of [`SECTIONS`].
pub fn is_known_key(key: &str) -> bool {
    SECTIONS.iter().any(|s| s.name == key || s.ids.contains(&key))
}

fn family_check(t: &mut Table, id: &'static str, label: String, spec: &FamilySpec, cfg: &SolverConfig, base: LogBase, tol: f64) {
    let outcome = (|| -> Result<(f64, f64, bool)> {
        let r = entanglement_production(make_operator(spec)?.as_ref(), cfg, base)?;
        Ok((r.epsilon, expected_epsilon(spec, base)?, r.converged))
    })();
    match outcome {
        Ok((value, reference, converged)) => {
            if converged {
                t.close(id, label, value, reference, tol);
            } else {
                t.close(id, format!("{label} (unconverged)"), value, reference, tol);
                if let Some(last) = t.rows.last_mut() {
                    last.passed = false;
                }
            }
        }
        Err(e) => t.failed(id, label, e),
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn random_coeffs(m: usize, rng: &mut impl Rng) -> Vec<C64> {
    let v: Vec<C64> = (0..m)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

fn pure_states(cfg: &SolverConfig, base: LogBase) -> Vec<ReproRow> {
    let mut t = Table::new("pure");
    let ln2 = base.from_nats(std::f64::consts::LN_2);
    for sign in [Sign::Plus, Sign::Minus] {
        family_check(&mut t, "eq28", format!("EPR {sign:?}"), &FamilySpec::epr(sign), cfg, base, 1e-9);
        family_check(&mut t, "eq31", format!("Bell {sign:?}"), &FamilySpec::bell(sign), cfg, base, 1e-9);
    }
    for n in 2..=10 {
        family_check(&mut t, "eq34", format!("GHZ N={n}"), &FamilySpec::ghz(n), cfg, base, 1e-8);
    }
    for n in 2..=4 {
        for k in 0..=10 {
            let c1 = k as f64 / 10.0;
            let c2 = (1.0 - c1 * c1).sqrt();
            let spec = FamilySpec::multicat(n, real(c1), real(c2));
            family_check(&mut t, "eq37", format!("multicat N={n} c1={c1:.1}"), &spec, cfg, base, 1e-8);
            if let Some(last) = t.rows.last().filter(|r| r.id == "eq37").map(|r| r.value) {
                let bound = (n as f64 - 1.0) * ln2;
                t.holds("eq38", format!("multicat N={n} c1={c1:.1} within [0, (N−1) log 2]"), last, 1e-9,
                    last >= -1e-9 && last <= bound + 1e-9);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for m in 2..=4 {
        for n in 2..=4 {
            let spec = FamilySpec::multimode(n, random_coeffs(m, &mut rng));
            family_check(&mut t, "eq41", format!("multimode m={m} N={n} random"), &spec, cfg, base, 1e-8);
            let phases: Vec<C64> = (0..m)
                .map(|k| C64::from_polar(1.0 / (m as f64).sqrt(), 0.7 * k as f64))
                .collect();
            let spec = FamilySpec::multimode(n, phases);
            match entanglement_production(make_operator(&spec).expect("valid").as_ref(), cfg, base) {
                Ok(r) => t.close("eq42", format!("multimode m={m} N={n} equal moduli"), r.epsilon,
                    base.from_nats((n as f64 - 1.0) * (m as f64).ln()), 1e-8),
                Err(e) => t.failed("eq42", format!("multimode m={m} N={n} equal moduli"), e),
            }
        }
    }
    t.rows
}

fn hartree_fock(cfg: &SolverConfig, base: LogBase) -> Vec<ReproRow> {
    let mut t = Table::new("hartree_fock");
    for stat in [Statistics::Fermi, Statistics::Bose] {
        let mut per_n = Vec::new();
        for n in 2..=6 {
            family_check(&mut t, "eq45", format!("Hartree-Fock {stat:?} N={n}"), &FamilySpec::hartree_fock(n, stat), cfg, base, 1e-8);
            per_n.push(t.rows.last().map(|r| r.value / n as f64).unwrap_or(f64::NAN));
        }
        let increasing = per_n.windows(2).all(|w| w[1] > w[0]);
        t.holds("eq45", format!("Hartree-Fock {stat:?} ε/N increasing for N = 2…6"), per_n[per_n.len() - 1], 0.0, increasing);
    }
    for n in 2..=6 {
        for p in 1..n {
            let spec = FamilySpec::hf_reduced(n, p, Statistics::Fermi);
            family_check(&mut t, "eq47", format!("reduced Hartree-Fock N={n} p={p}"), &spec, cfg, base, 1e-8);
        }
    }
    let (n, p) = (6.0, 2.0);
    let exact = p * f64::ln(n) - ln_falling(6, 2);
    let asymptote = p * (p - 1.0) / (2.0 * n);
    t.close("eq48", "reduced Hartree-Fock N=6 p=2 over its large-N form".into(), exact / asymptote, 1.0, 0.15);
    t.rows
}

fn mixed(cfg: &SolverConfig, base: LogBase) -> Vec<ReproRow> {
    let mut t = Table::new("mixed");
    family_check(&mut t, "separable", "separable-yet-entangling operator".into(), &FamilySpec::separable_example(), cfg, base, 1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let mut worst = 0.0f64;
    let mut in_range = true;
    for m in 1..=3 {
        for n in 1..=5 {
            for p in 1..=n.min(3) {
                let raw: Vec<f64> = (0..m).map(|_| rng.random::<f64>() + 1e-3).collect();
                let total: f64 = raw.iter().sum();
                let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
                let spec = FamilySpec::mixed_multimode(n, p, w);
                family_check(&mut t, "eq60", format!("mixed multimode N={n} p={p} m={m}"), &spec, cfg, base, 1e-9);
                let e = t.rows.last().map(|r| r.value).unwrap_or(f64::NAN);
                let top = base.from_nats((p as f64 - 1.0) * (m as f64).ln());
                worst = worst.max((-e).max(e - top));
                in_range &= e >= -1e-9 && e <= top + 1e-9;
            }
        }
    }
    t.holds("eq60", "mixed multimode 0 ≤ ε ≤ (p−1) log m on random populations".into(), worst, 1e-9, in_range);
    t.rows
}

fn thermal(cfg: &SolverConfig, base: LogBase) -> Vec<ReproRow> {
    let mut t = Table::new("thermal");
    let gs = linspace(-5.0, 5.0, 21);
    let bs = linspace(0.0, 5.0, 21);
    match thermal_sweep(&gs, &bs, cfg, base) {
        Ok(rows) => {
            let worst = rows.iter().map(|r| (r.epsilon_closed - r.epsilon_pipeline).abs()).fold(0.0, f64::max);
            let all_conv = rows.iter().all(|r| r.converged);
            t.holds("eq75", "21×21 grid, closed form against pipeline (max |Δ|)".into(), worst, 1e-10, worst <= 1e-10 && all_conv);
        }
        Err(e) => t.failed("eq75", "21×21 grid".into(), e),
    }
    let origin = ising_epsilon(IsingParams { g: 0.0, b: 0.0 }, base);
    t.close("eq79", "ε(0, 0)".into(), origin, 0.0, 1e-15);
    for row in ising_limit_table() {
        let id = match row.tags[0] {
            "eq78" => "eq78",
            "eq79" => "eq79",
            "eq80" => "eq80",
            "eq81" => "eq81",
            _ => "eq82",
        };
        let what = match row.quantity {
            Quantity::Epsilon => "ε",
            Quantity::Magnetization => "M",
        };
        let (value, target) = match row.quantity {
            Quantity::Epsilon => (base.from_nats(row.estimate), base.from_nats(row.target)),
            Quantity::Magnetization => (row.estimate, row.target),
        };
        let check = format!("{what} along {} (last point g={}, b={})", row.name, row.g, row.b);
        if row.reached {
            t.close(id, check, value, target, 1e-6);
        } else {
            t.holds(id, format!("{check}: not settled"), value, 1e-6, false);
        }
    }
    t.rows
}

fn meanfield(cfg: &SolverConfig, base: LogBase) -> Vec<ReproRow> {
    let mut t = Table::new("meanfield");
    for &(bj0, field) in &[(0.5, 0.0), (2.0, 0.0), (6.0, 0.0), (3.0, 0.5), (10.0, 1.0)] {
        for n in 1..=6 {
            let label = format!("mean-field βJ₀={bj0} βB={field} N={n}");
            let outcome = meanfield_factorized(n, bj0, field, 1.0)
                .and_then(|(_, mf)| mf.assemble(n))
                .and_then(|rho| entanglement_production(&rho, cfg, base));
            match outcome {
                Ok(r) => t.close("eq85", label, r.epsilon, 0.0, 1e-10),
                Err(e) => t.failed("eq85", label, e),
            }
        }
    }
    t.rows
}

fn transitions(_cfg: &SolverConfig, base: LogBase) -> Vec<ReproRow> {
    let mut t = Table::new("transitions");
    let value = |r: Result<crate::transitions::RegimeValue>| r.map(|v| v.epsilon).unwrap_or(f64::NAN);

    t.close("eq87", "BEC above T_c, N=100, p=2".into(),
        value(bec_epsilon(&RegimeInput::new(2, 100, Regime::AboveTc), base)), base.from_nats((100f64 / 99.0).ln()), 1e-12);
    for (n, p) in [(100u64, 2u64), (1000, 5), (1_000_000, 4)] {
        t.close("eq89", format!("BEC below T_c, N={n}, p={p}"),
            value(bec_epsilon(&RegimeInput::new(p, n, Regime::BelowTc), base)), 0.0, 1e-12);
    }
    let n = 1_000_000u64;
    for p in 2..=4u64 {
        let v = sc_epsilon(&RegimeInput::new(p, n, Regime::AboveTc), base);
        let finite = v.as_ref().ok().and_then(|v| v.finite_n).unwrap_or(f64::NAN);
        let pf = p as f64;
        t.close("eq90", format!("superconducting above T_c, N={n}, p={p}: Hartree-Fock value against p(p−1)/2N"),
            finite, base.from_nats(pf * (pf - 1.0) / (2.0 * n as f64)), pf.powi(3) / (n as f64).powi(2));
    }
    for p in 1..=6u64 {
        let ln_n = base.from_nats((n as f64).ln());
        t.close("eq92", format!("superconducting below T_c, N={n}, p={p}"),
            value(sc_epsilon(&RegimeInput::new(p, n, Regime::BelowTc), base)), sc_norm_exponent(p) * ln_n, 1e-9);
    }
    for p in 1..=PAIRING_COUNT_MAX {
        let exact = double_factorial(p).to_u64();
        let count = pairing_count(p).ok();
        t.holds("eq97", format!("(2p−1)!! = {exact:?} against {count:?} perfect pairings, p={p}"),
            exact.map_or(f64::NAN, |x| x as f64), 0.0, exact.is_some() && exact == count);
    }
    t.close("eq99", "magnetic above T_c, p=2".into(),
        value(magnetic_epsilon(&RegimeInput::new(2, 1000, Regime::AboveTc), base)), base.from_nats(3f64.ln()), 1e-12);
    t.close("eq99", "magnetic above T_c, p=3".into(),
        value(magnetic_epsilon(&RegimeInput::new(3, 1000, Regime::AboveTc), base)), base.from_nats(15f64.ln()), 1e-12);
    for p in 1..=4u64 {
        let r = magnetic_epsilon(&RegimeInput::new(p, n, Regime::BelowTc), base).ok();
        t.close("eq100", format!("magnetic below T_c, N={n}, p={p}"), r.map_or(f64::NAN, |v| v.epsilon), 0.0, 0.0);
        let finite = r.and_then(|v| v.finite_n).unwrap_or(f64::NAN);
        t.close("eq100", format!("magnetic below T_c, N={n}, p={p}, finite-N value"), finite, 0.0, 1e-4);
    }
    for n in [1_000u64, 1_000_000] {
        let ps = [1u64, 2, 3, 4, 5];
        let sample = |law: &dyn Fn(u64) -> f64| -> Vec<(u64, f64, f64)> {
            ps.iter().map(|&p| (p, law(p), ln_falling(n, p).exp())).collect()
        };
        let ln_n = (n as f64).ln();
        let cases: [(&str, Vec<(u64, f64, f64)>, OrderClass); 3] = [
            ("norm ~ trace", sample(&|p| ln_falling(n, p).exp()), OrderClass::Total),
            ("norm ~ N^{p/2 or (p−1)/2}", sample(&|p| (sc_norm_exponent(p) * ln_n).exp()), OrderClass::Even),
            ("norm constant", sample(&|_| 1.0), OrderClass::None),
        ];
        for (label, data, expected) in cases {
            let got = classify_order(&data).map(|c| c.class);
            t.holds("order", format!("classification of {label}, N={n}: expected {}", expected.as_str()),
                f64::NAN, 0.0, got.as_ref().ok() == Some(&expected));
        }
    }
    t.rows
}

/// Dense instances of every family and model, small enough for the full property suite.
pub fn property_instances() -> Vec<(String, MultipartiteOperator)> {
    let mut out = Vec::new();
    let specs = [
        FamilySpec::epr(Sign::Plus),
        FamilySpec::bell(Sign::Minus),
        FamilySpec::ghz(3),
        FamilySpec::multicat(3, real(0.6), real(0.8)),
        FamilySpec::multimode(2, vec![real(0.6), C64::new(0.0, 0.64), real(0.48)]),
        FamilySpec::hartree_fock(3, Statistics::Fermi),
        FamilySpec::hf_reduced(4, 2, Statistics::Fermi),
        FamilySpec::mixed_multimode(4, 2, vec![0.5, 0.3, 0.2]),
        FamilySpec::separable_example(),
    ];
    for spec in specs {
        let name = format!("{} N={} p={}", spec.family.as_str(), spec.n, spec.order());
        out.push((name, make_density(&spec).expect("valid instance")));
    }
    out.push(("ising g=0.7 b=0.4".into(), ising_two_spin_density(IsingParams { g: 0.7, b: 0.4 })));
    let (_, mf) = meanfield_factorized(3, 6.0, 0.2, 1.0).expect("converges");
    out.push(("mean-field N=3".into(), mf.assemble(3).expect("valid")));
    out
}

fn properties(cfg: &SolverConfig, _base: LogBase) -> Vec<ReproRow> {
    let mut t = Table::new("properties");
    let settings = PropertySettings { seed: cfg.seed, ..PropertySettings::default() };
    for (name, a) in property_instances() {
        match property_suite(&a, cfg, &settings) {
            Ok(report) => {
                for c in &report.checks {
                    let id = match c.name {
                        "semipositive" => "eq21",
                        "continuous" => "eq22",
                        "nonentangling_zero" => "eq23",
                        "additive" => "eq24",
                        _ => "eq25",
                    };
                    let tol = match c.name {
                        "nonentangling_zero" => settings.zero_tol,
                        "additive" => settings.additivity_tol,
                        "local_unitary_invariant" => settings.unitary_tol,
                        "continuous" => 1e-2,
                        _ => f64::INFINITY,
                    };
                    t.holds(id, format!("{name}: {}", c.name), c.deviation, tol, c.passed);
                }
            }
            Err(e) => t.failed("eq21", name, e),
        }
    }
    t.rows
}

fn oracles(cfg: &SolverConfig, _base: LogBase) -> Vec<ReproRow> {
    let mut t = Table::new("oracles");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x000A_4C1E);
    for dims in [vec![2, 2], vec![3, 2, 2], vec![2, 2, 2, 2]] {
        let shape = SpaceShape::new(dims.clone()).expect("valid");
        let diag: Vec<C64> = (0..shape.total_dim())
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let exact = diag.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let a = MultipartiteOperator::from_diagonal(shape, &diag).expect("valid");
        match dnorm(&a, cfg) {
            Ok(c) => t.close("oracle", format!("diagonal operator on {dims:?}: D-norm is max |diagonal|"), c.value, exact, 0.0),
            Err(e) => t.failed("oracle", format!("diagonal operator on {dims:?}"), e),
        }
    }
    let mut worst = 0.0f64;
    for k in 0..100 {
        let (d1, d2) = (2 + k % 3, 2 + (k / 3) % 3);
        let shape = SpaceShape::new(vec![d1, d2]).expect("valid");
        let psi = Ket::new(shape, random_coeffs(d1 * d2, &mut rng)).expect("valid");
        let got = max_product_overlap(&psi, cfg)
            .map(|c| c.value)
            .unwrap_or(f64::NAN);
        let exact = schmidt_max(&psi).unwrap_or(f64::NAN);
        worst = worst.max((got - exact).abs());
        if worst.is_nan() {
            break;
        }
    }
    t.holds("oracle", "product overlap against Schmidt maximum, 100 random bipartite kets (max |Δ|)".into(), worst, 1e-9, worst <= 1e-9);
    for dims in [vec![2, 2], vec![2, 3], vec![2, 2, 2]] {
        let shape = SpaceShape::new(dims.clone()).expect("valid");
        let d = shape.total_dim();
        let m = nalgebra::DMatrix::from_fn(d, d, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        let a = MultipartiteOperator::new(shape, &m + m.adjoint()).expect("valid");
        let outcome = dnorm(&a, cfg).and_then(|c| Ok((c.value, c.converged, dnorm_bruteforce(&a, 20_000, cfg.seed)?)));
        match outcome {
            Ok((value, converged, lower)) => t.holds("oracle",
                format!("random Hermitian on {dims:?}: sampled lower bound {lower:.6} ≤ D-norm {value:.6}"),
                lower - value, 1e-9, converged && lower <= value + 1e-9),
            Err(e) => t.failed("oracle", format!("random Hermitian on {dims:?}"), e),
        }
    }
    t.rows
}
