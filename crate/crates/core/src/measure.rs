//! The entanglement-production measure `ε(A) = log(‖A‖_D / ‖A^⊗‖_D)` and
//! the tools built around it.

use std::f64::consts::LN_2;
use std::io::Write;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dnorm::{dnorm, max_product_overlap, NormCertificate, SolverConfig};
use crate::error::{domain_err, Error, Result};
use crate::factorize::product_operator;
use crate::tensor::{Ket, KetMixture, MultipartiteOperator, OperatorAction};
use crate::C64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    #[default]
    Natural,
    Two,
}

impl LogBase {
    /// Converts a value in nats to this base.
    pub fn from_nats(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x,
            LogBase::Two => x / LN_2,
        }
    }

    pub fn log(self, x: f64) -> f64 {
        self.from_nats(x.ln())
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LogBase::Natural => "natural",
            LogBase::Two => "two",
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" | "natural" | "nat" => Ok(LogBase::Natural),
            "2" | "two" => Ok(LogBase::Two),
            _ => Err(Error::Parse(format!("unknown log base {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureResult {
    pub epsilon: f64,
    /// `‖A‖_D`.
    pub norm_a: f64,
    /// `‖A^⊗‖_D`.
    pub norm_prod: f64,
    pub base: LogBase,
    pub certificate: Option<NormCertificate>,
    /// False when the solver for `‖A‖_D` stopped before converging.
    pub converged: bool,
}

/// `ε(A)` for any operator. Rank-one operators go through the product-overlap
/// solver, everything else through [`dnorm`].
pub fn entanglement_production(
    a: &dyn OperatorAction,
    cfg: &SolverConfig,
    base: LogBase,
) -> Result<MeasureResult> {
    let prod = product_operator(a)?;
    let norm_prod = prod.dnorm();
    let cert = match a.as_rank_one() {
        Some((w, psi)) => max_product_overlap(&psi, cfg)?.squared(w),
        None => dnorm(a, cfg)?,
    };
    Ok(MeasureResult {
        epsilon: base.log(cert.value / norm_prod),
        norm_a: cert.value,
        norm_prod,
        base,
        converged: cert.converged,
        certificate: Some(cert),
    })
}

/// `ε(|ψ⟩⟨ψ|)` without forming the projector.
pub fn entanglement_production_ket(psi: &Ket, cfg: &SolverConfig, base: LogBase) -> Result<MeasureResult> {
    entanglement_production(&KetMixture::pure(psi.clone())?, cfg, base)
}

/// `ln(N!/(N−p)!)`.
pub fn ln_falling(n: u64, p: u64) -> f64 {
    (0..p).map(|k| ((n - k) as f64).ln()).sum()
}

/// `ε(ρ_p)` from the norms of `ρ_p` and `ρ_1` under the convention
/// `Tr ρ_p = N!/(N−p)!`:
/// `log[(N−p)! N^p ‖ρ_p‖ / (N! ‖ρ_1‖^p)]`.
pub fn measure_from_norms(norm_p: f64, norm_1: f64, n: u64, p: u64, base: LogBase) -> Result<f64> {
    if !(norm_p > 0.0 && norm_1 > 0.0) {
        return Err(domain_err!("norms must be positive, got {norm_p} and {norm_1}"));
    }
    measure_from_log_norms(norm_p.ln(), norm_1.ln(), n, p, base)
}

/// [`measure_from_norms`] with the norms given as natural logarithms.
pub fn measure_from_log_norms(ln_norm_p: f64, ln_norm_1: f64, n: u64, p: u64, base: LogBase) -> Result<f64> {
    if p == 0 || p > n {
        return Err(domain_err!("reduction order {p} outside 1..={n}"));
    }
    let nats = p as f64 * (n as f64).ln() - ln_falling(n, p) + ln_norm_p - p as f64 * ln_norm_1;
    Ok(base.from_nats(nats))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    #[default]
    Dnorm,
    Spectral,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderIndexResult {
    pub omega: f64,
    pub norm_used: NormKind,
    pub trace_abs: f64,
}

/// `ω = log ‖A‖ / log |Tr A|` from precomputed values.
pub fn order_index_from(norm: f64, trace_abs: f64) -> Result<f64> {
    if !(trace_abs > 0.0) || (trace_abs - 1.0).abs() < 1e-15 {
        return Err(domain_err!("order index needs |Tr A| outside {{0, 1}}, got {trace_abs}"));
    }
    if !(norm > 0.0) {
        return Err(domain_err!("order index needs a positive norm, got {norm}"));
    }
    Ok(norm.ln() / trace_abs.ln())
}

pub fn order_index(a: &MultipartiteOperator, norm_used: NormKind, cfg: &SolverConfig) -> Result<OrderIndexResult> {
    let trace_abs = a.trace().norm();
    let norm = match norm_used {
        NormKind::Dnorm => dnorm(a, cfg)?.value,
        NormKind::Spectral => a.spectral_norm(),
    };
    Ok(OrderIndexResult {
        omega: order_index_from(norm, trace_abs)?,
        norm_used,
        trace_abs,
    })
}

/// Outcome of one property check.
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyCheck {
    pub name: &'static str,
    /// The largest deviation observed (or the value itself for semipositivity).
    pub deviation: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyReport {
    pub epsilon: f64,
    pub checks: Vec<PropertyCheck>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Settings for [`property_suite`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropertySettings {
    pub unitary_samples: usize,
    pub zero_tol: f64,
    pub additivity_tol: f64,
    pub unitary_tol: f64,
    /// Additivity is checked only when `dim(A)² ≤` this.
    pub additivity_max_dim: usize,
    pub seed: u64,
}

impl Default for PropertySettings {
    fn default() -> Self {
        Self {
            unitary_samples: 20,
            zero_tol: 1e-9,
            additivity_tol: 1e-8,
            unitary_tol: 1e-8,
            additivity_max_dim: 4096,
            seed: 0,
        }
    }
}

/// Haar-distributed unitary from the QR factorization of a complex Gaussian matrix.
pub fn random_unitary(d: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    let g = DMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    // fix the phases so the distribution is uniform
    let phases = DMatrix::from_diagonal(&r.diagonal().map(|z| {
        if z.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            z / z.norm()
        }
    }));
    q * phases
}

fn random_hermitian_unit(d: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    let g = DMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let h = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    let f = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    h / C64::new(f, 0.0)
}

/// Checks the structural properties of `ε` on one operator: vanishing on
/// `A^⊗`, additivity under `A ⊗ A`, invariance under local unitaries,
/// continuity under small Hermitian perturbations, and records the sign of
/// `ε(A)` (reported, always marked passed).
pub fn property_suite(a: &MultipartiteOperator, cfg: &SolverConfig, set: &PropertySettings) -> Result<PropertyReport> {
    let nat = LogBase::Natural;
    let eps = entanglement_production(a, cfg, nat)?.epsilon;
    let mut checks = Vec::new();

    checks.push(PropertyCheck {
        name: "semipositive",
        deviation: eps,
        passed: true,
    });

    let prod = product_operator(a)?.assemble()?;
    let e0 = entanglement_production(&prod, cfg, nat)?.epsilon;
    checks.push(PropertyCheck {
        name: "nonentangling_zero",
        deviation: e0.abs(),
        passed: e0.abs() <= set.zero_tol,
    });

    let dim = a.shape().total_dim();
    if dim * dim <= set.additivity_max_dim {
        let aa = MultipartiteOperator::kron(&[a, a])?;
        let e2 = entanglement_production(&aa, cfg, nat)?.epsilon;
        let dev = (e2 - 2.0 * eps).abs();
        checks.push(PropertyCheck {
            name: "additive",
            deviation: dev,
            passed: dev <= set.additivity_tol,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(set.seed);
    let mut worst = 0.0f64;
    for _ in 0..set.unitary_samples {
        let us: Vec<DMatrix<C64>> = a.shape().dims().iter().map(|&d| random_unitary(d, &mut rng)).collect();
        let rotated = a.apply_local_unitaries(&us, 1e-10)?;
        let e = entanglement_production(&rotated, cfg, nat)?.epsilon;
        worst = worst.max((e - eps).abs());
    }
    checks.push(PropertyCheck {
        name: "local_unitary_invariant",
        deviation: worst,
        passed: worst <= set.unitary_tol,
    });

    let b = random_hermitian_unit(dim, &mut rng);
    let mut devs = Vec::new();
    for delta in [1e-4, 1e-6] {
        let perturbed = MultipartiteOperator::new(a.shape().clone(), a.entries() + &b * C64::new(delta, 0.0))?;
        let e = entanglement_production(&perturbed, cfg, nat)?.epsilon;
        devs.push((e - eps).abs());
    }
    checks.push(PropertyCheck {
        name: "continuous",
        deviation: devs[0],
        passed: devs[0] <= 1e-2 && devs[1] <= 1e-4,
    });

    Ok(PropertyReport { epsilon: eps, checks })
}

/// One size of an [`epsilon_sequence`].
#[derive(Clone, Debug)]
pub struct SequenceEntry {
    pub size: usize,
    pub result: std::result::Result<MeasureResult, String>,
    /// `ε / size`.
    pub per_size: Option<f64>,
    /// `ε(size) − ε(previous size)` when both are available.
    pub difference: Option<f64>,
}

/// Evaluates `ε` along a size-indexed family so callers can judge the trend
/// as the size grows. Errors are recorded per size and do not stop the sweep.
pub fn epsilon_sequence<F>(generator: F, sizes: &[usize], cfg: &SolverConfig, base: LogBase) -> Vec<SequenceEntry>
where
    F: Fn(usize) -> Result<Box<dyn OperatorAction>>,
{
    let mut out: Vec<SequenceEntry> = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let result = generator(size)
            .and_then(|a| entanglement_production(a.as_ref(), cfg, base))
            .map_err(|e| e.to_string());
        let eps = result.as_ref().ok().map(|r| r.epsilon);
        let prev = out.last().and_then(|e| e.result.as_ref().ok().map(|r| r.epsilon));
        out.push(SequenceEntry {
            size,
            per_size: eps.map(|e| e / size as f64),
            difference: eps.zip(prev).map(|(e, p)| e - p),
            result,
        });
    }
    out
}

/// A result row in the CSV export.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureRow {
    pub family: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub p: usize,
    pub base: LogBase,
    pub epsilon: f64,
    pub norm_a: f64,
    pub norm_prod: f64,
    pub converged: bool,
}

impl MeasureRow {
    pub fn new(family: &str, n: usize, p: usize, r: &MeasureResult) -> Self {
        Self {
            family: family.to_string(),
            n,
            p,
            base: r.base,
            epsilon: r.epsilon,
            norm_a: r.norm_a,
            norm_prod: r.norm_prod,
            converged: r.converged,
        }
    }
}

pub fn write_rows<W: Write>(rows: &[MeasureRow], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}
