//! The norm of an operator restricted to product states,
//! `‖A‖_D = sup |(f, A f′)|` over unit `f = ⊗φ_i`, `f′ = ⊗χ_i`.
//!
//! The general solver is alternating maximization over the factor vectors:
//! with every factor but one fixed the objective is linear in the remaining
//! factor, so its maximizer is the normalized contraction of the tensor
//! against all other factors. Multiple starts run in parallel and are merged
//! deterministically.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain_err, shape_err, Error, Result};
use crate::tensor::{
    contract_all_but, inner, kron_vectors, norm, Ket, MultipartiteOperator, OperatorAction,
    ProductKet, SpaceShape, Support,
};
use crate::C64;

const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;
const POWER_ITERS: usize = 30;

/// Settings for the multi-start alternating solvers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Random starts in addition to the deterministic dominant start.
    pub restarts: usize,
    pub max_sweeps: usize,
    /// Absolute change of the objective over one sweep below which a run has converged.
    pub tol: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_sweeps: 500,
            tol: 1e-12,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Validation("restarts must be at least 1".into()));
        }
        if self.max_sweeps == 0 {
            return Err(Error::Validation("max_sweeps must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Validation(format!("tolerance {} is not positive", self.tol)));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Alternating,
    DiagonalExact,
    SchmidtExact,
    SymmetricAlternating,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Alternating => "alternating",
            Method::DiagonalExact => "diagonal_exact",
            Method::SchmidtExact => "schmidt_exact",
            Method::SymmetricAlternating => "symmetric_alternating",
        }
    }
}

/// The value of a product-state supremum together with the maximizing pair.
///
/// For an overlap `sup |(f, ψ)|` the two product kets coincide.
#[derive(Clone, Debug, PartialEq)]
pub struct NormCertificate {
    pub value: f64,
    pub left: ProductKet,
    pub right: ProductKet,
    pub sweeps_used: usize,
    pub restarts_used: usize,
    pub converged: bool,
    pub method: Method,
}

impl NormCertificate {
    /// `|(left, A right)|` recomputed from scratch.
    pub fn reevaluate(&self, a: &dyn OperatorAction) -> Result<f64> {
        let l = self.left.expand_on(a.shape())?;
        let r = self.right.expand_on(a.shape())?;
        Ok(inner(l.amplitudes(), &a.apply(r.amplitudes())).norm())
    }

    /// `|(left, ψ)|` recomputed from scratch.
    pub fn reevaluate_overlap(&self, psi: &Ket) -> Result<f64> {
        let l = self.left.expand_on(psi.shape())?;
        Ok(l.overlap(psi)?.norm())
    }

    /// Certificate of `‖w|ψ⟩⟨ψ|‖_D = w·Λ²` from an overlap certificate `Λ`.
    pub fn squared(&self, weight: f64) -> Self {
        Self {
            value: weight * self.value * self.value,
            ..self.clone()
        }
    }
}

type Factors = Vec<Vec<C64>>;

struct Run {
    value: f64,
    left: Factors,
    right: Factors,
    sweeps: usize,
    converged: bool,
}

fn normalize_into(slot: &mut Vec<C64>, v: Vec<C64>) -> f64 {
    let n = norm(&v);
    if n > 0.0 {
        *slot = v.into_iter().map(|z| z / n).collect();
    }
    n
}

fn conj_factors(fs: &[Vec<C64>]) -> Factors {
    fs.iter().map(|f| f.iter().map(|z| z.conj()).collect()).collect()
}

fn random_factors(dims: &[usize], rng: &mut ChaCha8Rng) -> Factors {
    dims.iter()
        .map(|&d| {
            let mut v: Vec<C64> = (0..d)
                .map(|_| {
                    C64::new(
                        StandardNormal.sample(&mut *rng),
                        StandardNormal.sample(&mut *rng),
                    )
                })
                .collect();
            let n = norm(&v);
            v.iter_mut().for_each(|z| *z /= n);
            v
        })
        .collect()
}

fn start_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add((index as u64).wrapping_mul(SEED_STRIDE)))
}

/// Eigenvector of the largest eigenvalue of a Hermitian matrix.
fn top_eigenvector(m: &DMatrix<C64>) -> Vec<C64> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut best = 0;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] > eig.eigenvalues[best] {
            best = i;
        }
    }
    eig.eigenvectors.column(best).iter().copied().collect()
}

/// Runs every start (index 0 = `dominant`, the rest random) in parallel and
/// keeps the best value; ties go to the lowest start index.
fn multistart<F>(cfg: &SolverConfig, dims: &[usize], dominant: (Factors, Factors), run: F) -> (Run, usize)
where
    F: Fn(Factors, Factors) -> Run + Sync,
{
    let total = cfg.restarts + 1;
    let runs: Vec<Run> = (0..total)
        .into_par_iter()
        .map(|r| {
            if r == 0 {
                run(dominant.0.clone(), dominant.1.clone())
            } else {
                let mut rng = start_rng(cfg.seed, r);
                let left = random_factors(dims, &mut rng);
                let right = random_factors(dims, &mut rng);
                run(left, right)
            }
        })
        .collect();
    let mut best: Option<Run> = None;
    for run in runs {
        match &best {
            Some(b) if run.value <= b.value => {}
            _ => best = Some(run),
        }
    }
    (best.expect("at least one start"), total)
}

fn certificate(run: Run, starts: usize, method: Method) -> Result<NormCertificate> {
    Ok(NormCertificate {
        value: run.value,
        left: ProductKet::new(run.left)?,
        right: ProductKet::new(run.right)?,
        sweeps_used: run.sweeps,
        restarts_used: starts,
        converged: run.converged,
        method,
    })
}

/// Deterministic start for operator problems: the dominant right singular
/// vector of `A` (by power iteration on `A†A`), reduced to per-partite
/// top eigenvectors. The left start uses `A x` the same way.
fn dominant_start(a: &dyn OperatorAction, cfg: &SolverConfig) -> (Factors, Factors) {
    let shape = a.shape();
    let dims = shape.dims();
    let mut rng = start_rng(cfg.seed ^ 0x5DEE_CE66_D1CE_4E5B, 0);
    let mut x = kron_vectors(&random_factors(dims, &mut rng));
    for f in random_factors(&[shape.total_dim()], &mut rng) {
        x.iter_mut().zip(f).for_each(|(a, b)| *a += b);
    }
    for _ in 0..POWER_ITERS {
        let y = a.apply_adjoint(&a.apply(&x));
        let n = norm(&y);
        if n == 0.0 {
            break;
        }
        x = y.into_iter().map(|z| z / n).collect();
    }
    let ax = a.apply(&x);
    let from = |v: &[C64]| -> Factors {
        if norm(v) == 0.0 {
            return random_factors(dims, &mut start_rng(cfg.seed, 0));
        }
        (0..dims.len())
            .map(|i| top_eigenvector(&crate::tensor::single_reduced(v, dims, i)))
            .collect()
    };
    (from(&ax), from(&x))
}

/// One run of the bilinear alternating scheme.
fn bilinear_run(a: &dyn OperatorAction, cfg: &SolverConfig, mut left: Factors, mut right: Factors) -> Run {
    let dims = a.shape().dims().to_vec();
    let p = dims.len();
    let mut prev = f64::NEG_INFINITY;
    let mut value = 0.0;
    for sweep in 1..=cfg.max_sweeps {
        // left factors against y = A f′
        let y = a.apply(&kron_vectors(&right));
        for k in 0..p {
            let coeffs = conj_factors(&left);
            let v = contract_all_but(&y, &dims, &coeffs, k);
            normalize_into(&mut left[k], v);
        }
        // right factors against z = A† f
        let z = a.apply_adjoint(&kron_vectors(&left));
        for k in 0..p {
            let coeffs = conj_factors(&right);
            let u = contract_all_but(&z, &dims, &coeffs, k);
            value = normalize_into(&mut right[k], u);
        }
        if (value - prev).abs() < cfg.tol {
            return Run { value, left, right, sweeps: sweep, converged: true };
        }
        prev = value;
    }
    Run { value, left, right, sweeps: cfg.max_sweeps, converged: false }
}

/// One run of the symmetric scheme `sup (f, A f)` for semipositive `A`.
///
/// Each factor update is a power step on the quadratic form restricted to
/// that factor, which cannot decrease the objective when the form is
/// semipositive.
fn symmetric_run(a: &dyn OperatorAction, cfg: &SolverConfig, mut f: Factors) -> Run {
    let dims = a.shape().dims().to_vec();
    let p = dims.len();
    let mut prev = f64::NEG_INFINITY;
    let mut value = 0.0;
    for sweep in 1..=cfg.max_sweeps {
        for k in 0..p {
            let y = a.apply(&kron_vectors(&f));
            let v = contract_all_but(&y, &dims, &conj_factors(&f), k);
            normalize_into(&mut f[k], v);
        }
        let x = kron_vectors(&f);
        value = inner(&x, &a.apply(&x)).norm();
        if (value - prev).abs() < cfg.tol {
            return Run { value, left: f.clone(), right: f, sweeps: sweep, converged: true };
        }
        prev = value;
    }
    Run { value, left: f.clone(), right: f, sweeps: cfg.max_sweeps, converged: false }
}

/// `‖A‖_D` with automatic dispatch on the operator's structure: exact for
/// diagonal operators, the symmetric scheme for semipositive ones and the
/// bilinear scheme otherwise.
pub fn dnorm(a: &dyn OperatorAction, cfg: &SolverConfig) -> Result<NormCertificate> {
    cfg.validate()?;
    if a.is_diagonal() {
        return Ok(diagonal_exact(a));
    }
    if a.is_semipositive() {
        return dnorm_symmetric(a, cfg);
    }
    dnorm_general(a, cfg)
}

/// `‖A‖_D` by the bilinear scheme with independent `f` and `f′`, regardless
/// of structure.
pub fn dnorm_general(a: &dyn OperatorAction, cfg: &SolverConfig) -> Result<NormCertificate> {
    cfg.validate()?;
    let start = dominant_start(a, cfg);
    let (best, starts) = multistart(cfg, a.shape().dims(), start, |l, r| bilinear_run(a, cfg, l, r));
    certificate(best, starts, Method::Alternating)
}

/// `sup (f, A f)` over unit product states, equal to `‖A‖_D` for
/// semipositive `A`.
pub fn dnorm_symmetric(a: &dyn OperatorAction, cfg: &SolverConfig) -> Result<NormCertificate> {
    cfg.validate()?;
    let (_, right) = dominant_start(a, cfg);
    let (best, starts) = multistart(cfg, a.shape().dims(), (right.clone(), right), |l, _| {
        symmetric_run(a, cfg, l)
    });
    certificate(best, starts, Method::SymmetricAlternating)
}

/// Exact `max_n |A_nn|` for a diagonal operator, lowest multi-index on ties.
fn diagonal_exact(a: &dyn OperatorAction) -> NormCertificate {
    let diag = a.diagonal();
    let mut best = 0;
    for (n, z) in diag.iter().enumerate() {
        if z.norm() > diag[best].norm() {
            best = n;
        }
    }
    let shape = a.shape();
    let f = ProductKet::basis(shape, &shape.multi_index(best));
    NormCertificate {
        value: diag[best].norm(),
        left: f.clone(),
        right: f,
        sweeps_used: 0,
        restarts_used: 0,
        converged: true,
        method: Method::DiagonalExact,
    }
}

/// Sparse or dense view of a ket's amplitudes for the overlap solver.
enum Amplitudes<'a> {
    Dense(&'a [C64]),
    Sparse(Support),
}

impl Amplitudes<'_> {
    fn contract_all_but(&self, dims: &[usize], coeffs: &[Vec<C64>], keep: usize) -> Vec<C64> {
        match self {
            Amplitudes::Dense(x) => contract_all_but(x, dims, coeffs, keep),
            Amplitudes::Sparse(s) => s.contract_all_but(dims, coeffs, keep),
        }
    }

    fn reduced_single(&self, dims: &[usize], keep: usize) -> DMatrix<C64> {
        match self {
            Amplitudes::Dense(x) => crate::tensor::single_reduced(x, dims, keep),
            Amplitudes::Sparse(s) => s.reduced_single(dims, keep),
        }
    }
}

fn overlap_run(psi: &Amplitudes<'_>, dims: &[usize], cfg: &SolverConfig, mut f: Factors) -> Run {
    let p = dims.len();
    let mut prev = f64::NEG_INFINITY;
    let mut value = 0.0;
    for sweep in 1..=cfg.max_sweeps {
        for k in 0..p {
            let v = psi.contract_all_but(dims, &conj_factors(&f), k);
            value = normalize_into(&mut f[k], v);
        }
        if (value - prev).abs() < cfg.tol {
            return Run { value, left: f.clone(), right: f, sweeps: sweep, converged: true };
        }
        prev = value;
    }
    Run { value, left: f.clone(), right: f, sweeps: cfg.max_sweeps, converged: false }
}

/// `Λ(ψ) = sup |(f, ψ)|` over unit product states `f`.
///
/// For a rank-one operator `|ψ⟩⟨ψ|` the restricted norm is `Λ²`.
pub fn max_product_overlap(psi: &Ket, cfg: &SolverConfig) -> Result<NormCertificate> {
    cfg.validate()?;
    if psi.norm() == 0.0 {
        return Err(domain_err!("product overlap of the zero ket"));
    }
    let shape = psi.shape();
    let dims = shape.dims();
    if shape.parties() == 1 {
        let f = ProductKet::new(vec![psi.normalized()?.into_amplitudes()])?;
        return Ok(NormCertificate {
            value: psi.norm(),
            left: f.clone(),
            right: f,
            sweeps_used: 0,
            restarts_used: 0,
            converged: true,
            method: Method::SchmidtExact,
        });
    }
    let amps = if psi.nonzero_count().saturating_mul(4) <= shape.total_dim() {
        Amplitudes::Sparse(psi.support())
    } else {
        Amplitudes::Dense(psi.amplitudes())
    };
    // Higher-order SVD start: top eigenvector of every single-partite reduction.
    let hosvd: Factors = (0..dims.len())
        .map(|i| top_eigenvector(&amps.reduced_single(dims, i)))
        .collect();
    let (best, starts) = multistart(cfg, dims, (hosvd.clone(), hosvd), |l, _| {
        overlap_run(&amps, dims, cfg, l)
    });
    certificate(best, starts, Method::Alternating)
}

/// Largest Schmidt coefficient of a bipartite ket (its largest singular value
/// as a `d₁ × d₂` matrix), which equals `Λ(ψ)` exactly.
pub fn schmidt_max(psi: &Ket) -> Result<f64> {
    let dims = psi.shape().dims();
    if dims.len() != 2 {
        return Err(domain_err!("Schmidt decomposition needs 2 partites, got {}", dims.len()));
    }
    let m = DMatrix::from_row_slice(dims[0], dims[1], psi.amplitudes());
    Ok(m.singular_values().max())
}

/// Largest dimension accepted by [`dnorm_bruteforce`].
pub const BRUTEFORCE_LIMIT: usize = 64;

/// Randomized lower bound on `‖A‖_D`: every pair of computational-basis
/// products plus `samples` random pairs of unit product states.
pub fn dnorm_bruteforce(a: &MultipartiteOperator, samples: usize, seed: u64) -> Result<f64> {
    let shape: &SpaceShape = a.shape();
    let n = shape.total_dim();
    if n > BRUTEFORCE_LIMIT {
        return Err(shape_err!("brute force limited to dimension {BRUTEFORCE_LIMIT}, got {n}"));
    }
    let mut best = a.entries().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let l = kron_vectors(&random_factors(shape.dims(), &mut rng));
        let r = kron_vectors(&random_factors(shape.dims(), &mut rng));
        best = best.max(inner(&l, &a.apply(&r)).norm());
    }
    Ok(best)
}
