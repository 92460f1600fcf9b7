//! Entanglement production of reduced density matrices across phase
//! transitions, from the norm scalings of each regime, and the total/even
//! order classification by order indices.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{domain_err, Error, Result};
use crate::measure::{ln_falling, measure_from_log_norms, order_index_from, LogBase};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Transition {
    Bec,
    Superconducting,
    Magnetic,
}

impl Transition {
    pub const ALL: [Transition; 3] = [Transition::Bec, Transition::Superconducting, Transition::Magnetic];

    pub fn as_str(self) -> &'static str {
        match self {
            Transition::Bec => "bec",
            Transition::Superconducting => "superconducting",
            Transition::Magnetic => "magnetic",
        }
    }
}

impl std::str::FromStr for Transition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bec" | "bose-einstein" => Ok(Transition::Bec),
            "sc" | "superconducting" => Ok(Transition::Superconducting),
            "magnetic" | "ferromagnetic" => Ok(Transition::Magnetic),
            _ => Err(Error::Parse(format!("unknown transition {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    AboveTc,
    BelowTc,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::AboveTc => "above_tc",
            Regime::BelowTc => "below_tc",
        }
    }
}

/// Parameters of one regime evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegimeInput {
    /// Reduction order.
    pub p: u64,
    /// Number of particles (or lattice sites).
    pub n: u64,
    /// Spin.
    pub s: f64,
    /// Magnetization per site.
    pub m: f64,
    /// Order-one prefactors of `‖ρ_p‖_D` and `‖ρ_1‖` below the superconducting transition.
    pub c_p: f64,
    pub c_1: f64,
    pub regime: Regime,
}

impl RegimeInput {
    /// `S = 1/2`, `M = 0` above and `M = S/2` below, `c_p = c_1 = 1`.
    pub fn new(p: u64, n: u64, regime: Regime) -> Self {
        Self {
            p,
            n,
            s: 0.5,
            m: if regime == Regime::AboveTc { 0.0 } else { 0.25 },
            c_p: 1.0,
            c_1: 1.0,
            regime,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.p > self.n {
            return Err(domain_err!("reduction order {} outside 1..={}", self.p, self.n));
        }
        if !(self.s > 0.0) || !self.s.is_finite() {
            return Err(domain_err!("spin must be positive, got {}", self.s));
        }
        if !(0.0..=self.s).contains(&self.m) {
            return Err(domain_err!("magnetization {} outside [0, {}]", self.m, self.s));
        }
        if !(self.c_p > 0.0 && self.c_1 > 0.0) || !self.c_p.is_finite() || !self.c_1.is_finite() {
            return Err(domain_err!("c_p and c_1 must be positive and finite"));
        }
        Ok(())
    }
}

/// A regime value: the asymptotic `ε` and, when the inputs determine it, the
/// value at the supplied finite `N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegimeValue {
    pub epsilon: f64,
    pub finite_n: Option<f64>,
    /// Order index `ln‖ρ_p‖ / ln Tr ρ_p` implied by the regime's norm scaling.
    pub omega: Option<f64>,
}

fn omega_or_none(ln_norm: f64, ln_trace: f64) -> Option<f64> {
    order_index_from(ln_norm.exp(), ln_trace.exp()).ok()
}

/// Bose-Einstein condensation. Above `T_c` the norms factorize,
/// `‖ρ_p‖_D ≈ ‖ρ_1‖^p`, giving `log[(N−p)! N^p / N!]`; below, `‖ρ_p‖_D ≈ N!/(N−p)!`
/// and `‖ρ_1‖ ≈ N`, giving 0.
pub fn bec_epsilon(r: &RegimeInput, base: LogBase) -> Result<RegimeValue> {
    r.validate()?;
    let ln_trace = ln_falling(r.n, r.p);
    let (ln_norm_p, ln_norm_1) = match r.regime {
        Regime::AboveTc => (0.0, 0.0),
        Regime::BelowTc => (ln_trace, (r.n as f64).ln()),
    };
    Ok(RegimeValue {
        epsilon: measure_from_log_norms(ln_norm_p, ln_norm_1, r.n, r.p, base)?,
        finite_n: None,
        omega: omega_or_none(ln_norm_p, ln_trace),
    })
}

/// Exponent `k` of `‖ρ_p‖_D ≈ c_p N^k` below the superconducting transition.
pub fn sc_norm_exponent(p: u64) -> f64 {
    if p % 2 == 1 {
        (p - 1) as f64 / 2.0
    } else {
        p as f64 / 2.0
    }
}

/// Superconducting transition. Above `T_c`: `p(p−1)/(2N) log e`, with the
/// Hartree-Fock value at this `N` as the finite-`N` term. Below: `k log N`
/// with `k` from [`sc_norm_exponent`]; the finite-`N` term keeps `c_p`, `c_1`
/// and the falling factorial. Below `T_c` requires `N ≥ 10p`.
pub fn sc_epsilon(r: &RegimeInput, base: LogBase) -> Result<RegimeValue> {
    r.validate()?;
    let ln_trace = ln_falling(r.n, r.p);
    match r.regime {
        Regime::AboveTc => {
            let (n, p) = (r.n as f64, r.p as f64);
            Ok(RegimeValue {
                epsilon: base.from_nats(p * (p - 1.0) / (2.0 * n)),
                finite_n: Some(measure_from_log_norms(0.0, 0.0, r.n, r.p, base)?),
                omega: omega_or_none(0.0, ln_trace),
            })
        }
        Regime::BelowTc => {
            if r.n < 10 * r.p {
                return Err(domain_err!("below T_c needs N ≥ 10p, got N={} p={}", r.n, r.p));
            }
            let k = sc_norm_exponent(r.p);
            let ln_n = (r.n as f64).ln();
            let ln_norm_p = r.c_p.ln() + k * ln_n;
            Ok(RegimeValue {
                epsilon: base.from_nats(k * ln_n),
                finite_n: Some(measure_from_log_norms(ln_norm_p, r.c_1.ln(), r.n, r.p, base)?),
                omega: omega_or_none(ln_norm_p, ln_trace),
            })
        }
    }
}

/// `(2p−1)!! = (2p)!/(2^p p!)`, exact.
pub fn double_factorial(p: u64) -> BigUint {
    (1..=p).fold(BigUint::one(), |acc, k| acc * BigUint::from(2 * k - 1))
}

/// Largest `p` for which [`pairing_count`] is enumerated.
pub const PAIRING_COUNT_MAX: u64 = 10;

/// Number of perfect pairings of `2p` elements, counted by dynamic
/// programming over subsets (the lowest unpaired element picks a partner).
pub fn pairing_count(p: u64) -> Result<u64> {
    if p > PAIRING_COUNT_MAX {
        return Err(domain_err!("pairing enumeration is limited to p ≤ {PAIRING_COUNT_MAX}"));
    }
    let n = 2 * p as usize;
    let full = (1usize << n) - 1;
    let mut ways = vec![0u64; 1 << n];
    ways[0] = 1;
    for mask in 1..=full {
        if mask.count_ones() % 2 == 1 {
            continue;
        }
        let low = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << low);
        let mut total = 0;
        let mut others = rest;
        while others != 0 {
            let j = others.trailing_zeros() as usize;
            total += ways[rest & !(1 << j)];
            others &= others - 1;
        }
        ways[mask] = total;
    }
    Ok(ways[full])
}

/// [`double_factorial`] cross-checked against [`pairing_count`] for
/// `p ≤ PAIRING_COUNT_MAX`.
pub fn double_factorial_oracle(p: u64) -> Result<BigUint> {
    if p == 0 {
        return Err(domain_err!("p must be at least 1"));
    }
    let exact = double_factorial(p);
    if p <= PAIRING_COUNT_MAX {
        let count = pairing_count(p)?;
        if exact != BigUint::from(count) {
            return Err(Error::Validation(format!("(2p−1)!! = {exact} but {count} pairings for p = {p}")));
        }
    }
    Ok(exact)
}

/// Natural log of a big integer without overflowing `f64`.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().expect("fits in f64").ln()
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().expect("fits in f64").ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Magnetic transition on the z-spin density matrices. Above `T_c`
/// (`M = 0`): `‖R_p‖_D = (2p−1)!! S^{2p}`, `‖R_1‖ = S²`, so `ε = log (2p−1)!!`.
/// Below: `‖R_p‖_D ≈ N^p M^{2p}` and `‖R_1‖ = S² + NM²`, so `ε → 0`; the
/// finite-`N` term is `−p log(1 + S²/(NM²))`.
///
/// The order index uses `Tr R_p = N^p S^{2p}`, exact for spin 1/2.
pub fn magnetic_epsilon(r: &RegimeInput, base: LogBase) -> Result<RegimeValue> {
    r.validate()?;
    let p = r.p as f64;
    let ln_n = (r.n as f64).ln();
    let ln_trace = p * (ln_n + 2.0 * r.s.ln());
    match r.regime {
        Regime::AboveTc => {
            let ln_df = ln_big(&double_factorial_oracle(r.p)?);
            Ok(RegimeValue {
                epsilon: base.from_nats(ln_df),
                finite_n: None,
                omega: omega_or_none(ln_df + 2.0 * p * r.s.ln(), ln_trace),
            })
        }
        Regime::BelowTc => {
            let (finite_n, omega) = if r.m > 0.0 {
                let ln_norm_p = p * (ln_n + 2.0 * r.m.ln());
                let ln_norm_1 = (r.s * r.s + r.n as f64 * r.m * r.m).ln();
                (Some(base.from_nats(ln_norm_p - p * ln_norm_1)), omega_or_none(ln_norm_p, ln_trace))
            } else {
                (None, None)
            };
            Ok(RegimeValue { epsilon: 0.0, finite_n, omega })
        }
    }
}

pub fn regime_epsilon(t: Transition, r: &RegimeInput, base: LogBase) -> Result<RegimeValue> {
    match t {
        Transition::Bec => bec_epsilon(r, base),
        Transition::Superconducting => sc_epsilon(r, base),
        Transition::Magnetic => magnetic_epsilon(r, base),
    }
}

/// One row of a regime table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransitionRow {
    pub transition: &'static str,
    pub regime: &'static str,
    pub p: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub epsilon: f64,
    pub omega: Option<f64>,
    pub finite_n: Option<f64>,
}

/// Both regimes of `t` for every `(N, p)` with `p ≤ N`; combinations that
/// violate a regime's guard are skipped.
pub fn regime_table(t: Transition, ns: &[u64], ps: &[u64], template: &RegimeInput, base: LogBase) -> Vec<TransitionRow> {
    let mut rows = Vec::new();
    for &n in ns {
        for &p in ps {
            for regime in [Regime::AboveTc, Regime::BelowTc] {
                let mut r = RegimeInput { p, n, regime, ..*template };
                if regime == Regime::AboveTc && t == Transition::Magnetic {
                    r.m = 0.0;
                }
                if let Ok(v) = regime_epsilon(t, &r, base) {
                    rows.push(TransitionRow {
                        transition: t.as_str(),
                        regime: regime.as_str(),
                        p,
                        n,
                        epsilon: v.epsilon,
                        omega: v.omega,
                        finite_n: v.finite_n,
                    });
                }
            }
        }
    }
    rows
}

pub fn write_transition_rows<W: std::io::Write>(rows: &[TransitionRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderClass {
    Total,
    Even,
    None,
}

impl OrderClass {
    pub fn as_str(self) -> &'static str {
        match self {
            OrderClass::Total => "total",
            OrderClass::Even => "even",
            OrderClass::None => "none",
        }
    }
}

pub const TOTAL_OMEGA_MIN: f64 = 0.9;
pub const EVEN_OMEGA_TOL: f64 = 0.05;
pub const ODD_OMEGA_GAP: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderClassification {
    pub class: OrderClass,
    /// `(p, ω(ρ_p))`, sorted by `p`.
    pub omegas: Vec<(u64, f64)>,
}

/// Classifies long-range order from `(p, ‖ρ_p‖, |Tr ρ_p|)` samples:
/// total when every `ω ≥ 0.9`; even when every even-`p` `ω` is within 0.05
/// of 1/2 and every odd-`p` `ω` lies more than 0.05 below the smallest
/// even-`p` value; none otherwise. Needs `p = 1` and `p = 2`.
pub fn classify_order(samples: &[(u64, f64, f64)]) -> Result<OrderClassification> {
    let mut omegas: Vec<(u64, f64)> = samples
        .iter()
        .map(|&(p, norm, trace)| Ok((p, order_index_from(norm, trace)?)))
        .collect::<Result<_>>()?;
    omegas.sort_by_key(|&(p, _)| p);
    if !omegas.iter().any(|&(p, _)| p == 1) || !omegas.iter().any(|&(p, _)| p == 2) {
        return Err(domain_err!("order classification needs samples at p = 1 and p = 2"));
    }
    let min_all = omegas.iter().map(|&(_, w)| w).fold(f64::INFINITY, f64::min);
    let even: Vec<f64> = omegas.iter().filter(|(p, _)| p % 2 == 0).map(|&(_, w)| w).collect();
    let min_even = even.iter().copied().fold(f64::INFINITY, f64::min);
    let class = if min_all >= TOTAL_OMEGA_MIN {
        OrderClass::Total
    } else if even.iter().all(|w| (w - 0.5).abs() <= EVEN_OMEGA_TOL)
        && omegas
            .iter()
            .filter(|(p, _)| p % 2 == 1)
            .all(|&(_, w)| w < min_even - ODD_OMEGA_GAP)
    {
        OrderClass::Even
    } else {
        OrderClass::None
    };
    Ok(OrderClassification { class, omegas })
}
