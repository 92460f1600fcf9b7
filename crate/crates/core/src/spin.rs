//! Thermal spin models: the two-site spin-1/2 Ising pair, its mean-field
//! factorization, and first-order spin correlation matrices.
//!
//! Closed forms are evaluated in log space so that couplings and fields of
//! magnitude several hundred do not overflow.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::dnorm::SolverConfig;
use crate::error::{domain_err, shape_err, Error, Result};
use crate::measure::{entanglement_production, LogBase};
use crate::tensor::{MultipartiteOperator, SpaceShape};
use crate::C64;

/// Dimensionless coupling `g = βJS²` and field `b = βB ≥ 0` of the two-site model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IsingParams {
    pub g: f64,
    pub b: f64,
}

impl IsingParams {
    pub fn new(g: f64, b: f64) -> Result<Self> {
        if !g.is_finite() || !b.is_finite() {
            return Err(domain_err!("non-finite Ising parameters g={g}, b={b}"));
        }
        if b < 0.0 {
            return Err(domain_err!("the field b must be nonnegative, got {b}"));
        }
        Ok(Self { g, b })
    }
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln cosh x` without overflow.
fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

fn logsumexp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ln Z` with `Z = 2(e^g cosh b + e^{−g})`.
fn ln_partition(prm: IsingParams) -> f64 {
    std::f64::consts::LN_2 + logsumexp(prm.g + ln_cosh(prm.b), -prm.g)
}

/// Normalized log weights of `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩` (index 0 is spin up).
fn ln_weights(prm: IsingParams) -> [f64; 4] {
    let IsingParams { g, b } = prm;
    let lz = ln_partition(prm);
    [g + b - lz, -g - lz, -g - lz, g - b - lz]
}

/// `exp{4g S₁ᶻS₂ᶻ + b(S₁ᶻ + S₂ᶻ)} / Z` on two spins 1/2.
pub fn ising_two_spin_density(prm: IsingParams) -> MultipartiteOperator {
    let diag: Vec<C64> = ln_weights(prm).iter().map(|w| C64::new(w.exp(), 0.0)).collect();
    MultipartiteOperator::from_diagonal(SpaceShape::uniform(2, 2).expect("valid"), &diag).expect("finite weights")
}

/// Reduced single-spin operator, `diag(e^{g+b} + e^{−g}, e^{−g} + e^{g−b}) / Z`.
pub fn ising_reduced(prm: IsingParams) -> DMatrix<C64> {
    let w = ln_weights(prm);
    let up = logsumexp(w[0], w[1]).exp();
    let down = logsumexp(w[2], w[3]).exp();
    DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(up, 0.0), C64::new(down, 0.0)]))
}

/// Closed-form `ε` of the two-site density,
/// `log[2(1 + e^{2g} cosh b) sup{1, e^{b+2g}} / (1 + e^{b+2g})²]`.
pub fn ising_epsilon(prm: IsingParams, base: LogBase) -> f64 {
    let IsingParams { g, b } = prm;
    let x = b + 2.0 * g;
    let nats = std::f64::consts::LN_2 + softplus(2.0 * g + ln_cosh(b)) + x.max(0.0) - 2.0 * softplus(x);
    base.from_nats(nats)
}

/// `ε` of the two-site density through the generic pipeline.
pub fn ising_epsilon_pipeline(prm: IsingParams, cfg: &SolverConfig, base: LogBase) -> Result<(f64, bool)> {
    let r = entanglement_production(&ising_two_spin_density(prm), cfg, base)?;
    Ok((r.epsilon, r.converged))
}

/// Magnetization per spin, `e^{2g} sinh b / [2(1 + e^{2g} cosh b)]`.
pub fn ising_magnetization(prm: IsingParams) -> f64 {
    let IsingParams { g, b } = prm;
    0.5 * b.tanh() * sigmoid(2.0 * g + ln_cosh(b))
}

/// One row of a thermal sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThermalRow {
    pub g: f64,
    pub b: f64,
    pub epsilon_closed: f64,
    pub epsilon_pipeline: f64,
    pub magnetization: f64,
    pub converged: bool,
}

/// `steps` evenly spaced points on `[lo, hi]` (one point when `steps == 1`).
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps)
            .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

/// Closed form, pipeline and magnetization on the grid `gs × bs`, `g` outer.
pub fn thermal_sweep(gs: &[f64], bs: &[f64], cfg: &SolverConfig, base: LogBase) -> Result<Vec<ThermalRow>> {
    let points: Vec<(f64, f64)> = gs.iter().flat_map(|&g| bs.iter().map(move |&b| (g, b))).collect();
    points
        .par_iter()
        .map(|&(g, b)| {
            let prm = IsingParams::new(g, b)?;
            let (pipe, converged) = ising_epsilon_pipeline(prm, cfg, base)?;
            Ok(ThermalRow {
                g,
                b,
                epsilon_closed: ising_epsilon(prm, base),
                epsilon_pipeline: pipe,
                magnetization: ising_magnetization(prm),
                converged,
            })
        })
        .collect()
}

/// Ray magnitudes used for the low-temperature limits.
pub const RAY_MAGNITUDES: [f64; 5] = [100.0, 150.0, 200.0, 250.0, 300.0];

/// Ray points for the vanishing-parameter limits, `u = 10^{-k}`.
fn vanishing_steps() -> Vec<f64> {
    (1..=12).map(|k| 10f64.powi(-k)).collect()
}

/// Successive ray points closer than this count as having reached the limit.
pub const LIMIT_REACHED_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Epsilon,
    Magnetization,
}

/// Estimate of one limit along a parameter ray.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitRow {
    /// Short identifier of the limit.
    pub name: String,
    /// Tags of the closed-form statements this limit checks.
    pub tags: Vec<&'static str>,
    pub quantity: Quantity,
    pub target: f64,
    pub estimate: f64,
    /// Parameters of the last ray point.
    pub g: f64,
    pub b: f64,
    /// Whether the last two ray points agree within [`LIMIT_REACHED_TOL`].
    pub reached: bool,
}

impl LimitRow {
    pub fn error(&self) -> f64 {
        (self.estimate - self.target).abs()
    }
}

fn ray<F>(name: &str, tags: &[&'static str], quantity: Quantity, target: f64, points: &[(f64, f64)], f: F) -> LimitRow
where
    F: Fn(IsingParams) -> f64,
{
    let values: Vec<f64> = points
        .iter()
        .map(|&(g, b)| f(IsingParams::new(g, b).expect("ray points are valid")))
        .collect();
    let n = values.len();
    let (g, b) = points[n - 1];
    LimitRow {
        name: name.to_string(),
        tags: tags.to_vec(),
        quantity,
        target,
        estimate: values[n - 1],
        g,
        b,
        reached: (values[n - 1] - values[n - 2]).abs() < LIMIT_REACHED_TOL,
    }
}

/// Evaluates `ε` (natural log) and `M` along rays approaching each limit of
/// the two-site model and reports the last-point estimates.
pub fn ising_limit_table() -> Vec<LimitRow> {
    let ln2 = std::f64::consts::LN_2;
    let eps = |p: IsingParams| ising_epsilon(p, LogBase::Natural);
    let mag = ising_magnetization;
    let far = |f: &dyn Fn(f64) -> (f64, f64)| -> Vec<(f64, f64)> { RAY_MAGNITUDES.iter().map(|&s| f(s)).collect() };
    let near = |f: &dyn Fn(f64) -> (f64, f64)| -> Vec<(f64, f64)> { vanishing_steps().into_iter().map(f).collect() };

    let mut rows = vec![
        ray("b=0, g->+inf", &["eq78"], Quantity::Epsilon, ln2, &far(&|s| (s, 0.0)), eps),
        ray("b=0, g->-inf", &["eq78"], Quantity::Epsilon, ln2, &far(&|s| (-s, 0.0)), eps),
        ray("b=0, g->0", &["eq79"], Quantity::Epsilon, 0.0, &near(&|u| (u, 0.0)), eps),
        ray("g=0, b->0", &["eq79"], Quantity::Epsilon, 0.0, &near(&|u| (0.0, u)), eps),
        ray("g=b->0", &["eq79"], Quantity::Epsilon, 0.0, &near(&|u| (u, u)), eps),
    ];
    for g in [-1.0, 0.0, 1.0] {
        rows.push(ray(&format!("g={g}, b->inf"), &["eq80"], Quantity::Epsilon, 0.0, &far(&|s| (g, s)), eps));
        rows.push(ray(&format!("g={g}, b->inf"), &["eq80"], Quantity::Magnetization, 0.5, &far(&|s| (g, s)), mag));
    }
    let regimes: [(&str, fn(f64) -> (f64, f64), f64, f64); 3] = [
        ("b+2g->-inf", |s| (-s, s), ln2, 0.0),
        ("b+2g=0", |s| (-s, 2.0 * s), (0.75f64).ln(), 1.0 / 6.0),
        ("b+2g->+inf", |s| (-s, 3.0 * s), 0.0, 0.5),
    ];
    for (name, f, e_target, m_target) in regimes {
        let pts = far(&f);
        rows.push(ray(name, &["eq81"], Quantity::Epsilon, e_target, &pts, eps));
        rows.push(ray(name, &["eq82"], Quantity::Magnetization, m_target, &pts, mag));
    }
    rows
}

/// Iterated limits of `ε` at the origin, `lim_{g→0} lim_{b→0}` and
/// `lim_{b→0} lim_{g→0}`. The inner limit is exact (ε is continuous in each
/// variable), the outer one is the last point of the vanishing ray.
pub fn commuting_limits() -> (f64, f64) {
    let eps = |g: f64, b: f64| ising_epsilon(IsingParams::new(g, b).expect("valid"), LogBase::Natural);
    let u = *vanishing_steps().last().expect("non-empty");
    (eps(u, 0.0), eps(0.0, u))
}

/// Result of the mean-field self-consistency.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanField {
    /// Magnetization per spin `M = ⟨Sᶻ⟩`.
    pub m: f64,
    /// Single-site thermal operator `diag(e^{h/2}, e^{−h/2}) / (2 cosh(h/2))`, `h = β(J₀M + B)`.
    pub site: DMatrix<C64>,
    pub iterations: usize,
}

impl MeanField {
    /// `⊗_{i=1}^N` of the site operator.
    pub fn assemble(&self, n: usize) -> Result<MultipartiteOperator> {
        if n == 0 {
            return Err(domain_err!("at least one site is needed"));
        }
        let site = MultipartiteOperator::single(self.site.clone())?;
        let sites: Vec<&MultipartiteOperator> = std::iter::repeat_n(&site, n).collect();
        MultipartiteOperator::kron(&sites)
    }
}

const MF_TOL: f64 = 1e-12;
const MF_MAX_ITERS: usize = 10_000;
const MF_DAMPING: f64 = 0.5;

/// Solves `m = ½ tanh(β(J₀m + B)/2)` by damped fixed-point iteration from
/// `m = ½` and builds the factorized single-site operators.
pub fn meanfield_factorized(n: usize, j0: f64, field: f64, beta: f64) -> Result<(Vec<DMatrix<C64>>, MeanField)> {
    if n == 0 {
        return Err(domain_err!("at least one site is needed"));
    }
    if !(beta > 0.0) || !j0.is_finite() || !field.is_finite() {
        return Err(domain_err!("mean field needs β > 0 and finite J₀, B"));
    }
    let target = |m: f64| 0.5 * (0.5 * beta * (j0 * m + field)).tanh();
    let mut m = 0.5;
    for it in 1..=MF_MAX_ITERS {
        let next = (1.0 - MF_DAMPING) * m + MF_DAMPING * target(m);
        if (next - m).abs() < MF_TOL {
            m = next;
            let h = beta * (j0 * m + field);
            // diag(e^{h/2}, e^{−h/2}) / (2 cosh(h/2)) written with logistic weights
            let up = sigmoid(h);
            let site = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                C64::new(up, 0.0),
                C64::new(1.0 - up, 0.0),
            ]));
            let mf = MeanField { m, site, iterations: it };
            return Ok((vec![mf.site.clone(); n], mf));
        }
        m = next;
    }
    Err(Error::Convergence(format!(
        "mean-field iteration did not settle within {MF_MAX_ITERS} steps (βJ₀ = {})",
        beta * j0
    )))
}

/// First-order spin correlations `⟨S_jᶻ S_iᶻ⟩` on `N` sites.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinCorrelations {
    pub n: usize,
    pub corr: DMatrix<f64>,
    pub mag: Vec<f64>,
    pub s: f64,
}

impl SpinCorrelations {
    pub fn new(corr: DMatrix<f64>, mag: Vec<f64>, s: f64) -> Result<Self> {
        let n = corr.nrows();
        if corr.ncols() != n || n == 0 {
            return Err(shape_err!("correlation matrix is {}×{}", corr.nrows(), corr.ncols()));
        }
        if mag.len() != n {
            return Err(shape_err!("{} magnetizations for {n} sites", mag.len()));
        }
        if !(s > 0.0) {
            return Err(domain_err!("spin must be positive, got {s}"));
        }
        Ok(Self { n, corr, mag, s })
    }

    /// Uniformly ordered sites: `S²` on the diagonal and `M²` elsewhere.
    pub fn uniform(n: usize, s: f64, m: f64) -> Result<Self> {
        let corr = DMatrix::from_fn(n, n, |i, j| if i == j { s * s } else { m * m });
        Self::new(corr, vec![m; n], s)
    }
}

const SYMMETRY_TOL: f64 = 1e-10;

/// `R₁ = [⟨S_jᶻ S_iᶻ⟩]` as a single-partite operator over the site index.
pub fn spin_r1(sc: &SpinCorrelations) -> Result<MultipartiteOperator> {
    let asym = (&sc.corr - sc.corr.transpose()).amax();
    if asym > SYMMETRY_TOL {
        return Err(Error::Validation(format!("correlation matrix is asymmetric by {asym:.3e}")));
    }
    MultipartiteOperator::single(sc.corr.map(|x| C64::new(x, 0.0)))
}

/// `‖R₁‖`: the largest eigenvalue of the correlation matrix, which is its
/// norm in the basis of its own eigenvectors.
pub fn spin_r1_norm(sc: &SpinCorrelations) -> Result<f64> {
    spin_r1(sc)?;
    let eig = SymmetricEigen::new(sc.corr.clone());
    Ok(eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

/// Checks `Tr R₁ = N S(S+1)` on a full multi-component correlation matrix
/// (site-major, three components per site).
pub fn check_full_trace(full: &DMatrix<f64>, n: usize, s: f64, tol: f64) -> Result<f64> {
    if full.nrows() != 3 * n || full.ncols() != 3 * n {
        return Err(shape_err!("full correlation matrix must be {0}×{0}", 3 * n));
    }
    let tr = full.trace();
    let expected = n as f64 * s * (s + 1.0);
    if (tr - expected).abs() > tol * expected.max(1.0) {
        return Err(Error::Validation(format!("Tr R₁ = {tr}, expected N S(S+1) = {expected}")));
    }
    Ok(tr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prm(g: f64, b: f64) -> IsingParams {
        IsingParams::new(g, b).unwrap()
    }

    #[test]
    fn infinite_temperature_is_maximally_mixed() {
        let r = ising_two_spin_density(prm(0.0, 0.0));
        let expected = DMatrix::<C64>::identity(4, 4) * C64::new(0.25, 0.0);
        assert!((r.entries() - expected).camax() < 1e-15);
        assert!((ising_reduced(prm(0.0, 0.0)) - DMatrix::<C64>::identity(2, 2) * C64::new(0.5, 0.0)).camax() < 1e-15);
    }

    #[test]
    fn density_spectrum_and_trace() {
        for &(g, b) in &[(0.3f64, 1.2f64), (-2.0, 0.5), (4.0, 3.0)] {
            let r = ising_two_spin_density(prm(g, b));
            let z = 2.0 * (g.exp() * b.cosh() + (-g).exp());
            let expected = [(g + b).exp(), (-g).exp(), (-g).exp(), (g - b).exp()];
            for i in 0..4 {
                assert!((r.entries()[(i, i)].re - expected[i] / z).abs() < 1e-14);
            }
            assert!((r.trace().re - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn reduced_matches_partial_trace() {
        for &(g, b) in &[(0.7f64, 0.1f64), (-1.5, 2.5), (0.0, 4.0)] {
            let via_trace = ising_two_spin_density(prm(g, b)).partial_trace(&[0]).unwrap();
            assert!((via_trace.entries() - ising_reduced(prm(g, b))).camax() < 1e-12);
            let z = 2.0 * (g.exp() * b.cosh() + (-g).exp());
            let norm = ((g + b).exp() + (-g).exp()) / z;
            assert!((ising_reduced(prm(g, b))[(0, 0)].re - norm).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_field_closed_form() {
        let e = ising_epsilon(prm(1.0, 0.0), LogBase::Natural);
        assert!((e - (1.0 - 1f64.cosh().ln())).abs() < 1e-14);
        assert!((e - 0.56622).abs() < 1e-5);
        for i in -20..=20 {
            let g = i as f64 * 0.5;
            let e = ising_epsilon(prm(g, 0.0), LogBase::Natural);
            assert!((e - (g.abs() - ln_cosh(g))).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_matches_direct_exponentials() {
        for &(g, b) in &[(0.4f64, 0.9f64), (-1.1, 2.0), (2.5, 0.3)] {
            let direct = (2.0 * (1.0 + (2.0 * g).exp() * b.cosh()) * 1f64.max((b + 2.0 * g).exp())
                / (1.0 + (b + 2.0 * g).exp()).powi(2))
            .ln();
            assert!((ising_epsilon(prm(g, b), LogBase::Natural) - direct).abs() < 1e-13);
            let m = (2.0 * g).exp() * b.sinh() / (2.0 * (1.0 + (2.0 * g).exp() * b.cosh()));
            assert!((ising_magnetization(prm(g, b)) - m).abs() < 1e-15);
        }
    }

    #[test]
    fn large_parameters_stay_finite() {
        for &(g, b) in &[(300.0, 300.0), (-300.0, 300.0), (-300.0, 0.0), (400.0, 0.0)] {
            assert!(ising_epsilon(prm(g, b), LogBase::Natural).is_finite());
            assert!(ising_magnetization(prm(g, b)).is_finite());
            assert!(ising_two_spin_density(prm(g, b)).trace().re.is_finite());
        }
    }

    #[test]
    fn pipeline_agrees_with_closed_form() {
        let cfg = SolverConfig::default();
        for &(g, b) in &[(1.0, 0.0), (-2.0, 1.0), (0.5, 5.0)] {
            let (pipe, conv) = ising_epsilon_pipeline(prm(g, b), &cfg, LogBase::Natural).unwrap();
            assert!(conv);
            assert!((pipe - ising_epsilon(prm(g, b), LogBase::Natural)).abs() < 1e-10);
        }
    }

    #[test]
    fn limits() {
        for row in ising_limit_table() {
            assert!(row.error() < 1e-6, "{row:?}");
            assert!(row.reached, "{row:?}");
        }
        let (a, b) = commuting_limits();
        assert!(a.abs() < 1e-9 && b.abs() < 1e-9);
    }

    #[test]
    fn magnetization_grows_while_epsilon_falls() {
        for g in [0.0, 0.5, 1.0, 2.0] {
            let bs = linspace(0.0, 10.0, 101);
            for w in bs.windows(2) {
                let (e0, e1) = (ising_epsilon(prm(g, w[0]), LogBase::Natural), ising_epsilon(prm(g, w[1]), LogBase::Natural));
                let (m0, m1) = (ising_magnetization(prm(g, w[0])), ising_magnetization(prm(g, w[1])));
                assert!(m1 >= m0 - 1e-15);
                assert!(e1 <= e0 + 1e-14);
            }
        }
    }

    /// Bisection on `m − ½ tanh(β J₀ m / 2)` over `(0, ½]`.
    fn bisect_positive_root(beta_j0: f64) -> f64 {
        let f = |m: f64| m - 0.5 * (0.5 * beta_j0 * m).tanh();
        let (mut lo, mut hi) = (1e-9, 0.5);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn meanfield_roots() {
        let (_, mf) = meanfield_factorized(4, 2.0, 0.0, 1.0).unwrap();
        assert!(mf.m.abs() < 1e-9);
        let (_, mf) = meanfield_factorized(4, 8.0, 0.0, 1.0).unwrap();
        assert!((mf.m - bisect_positive_root(8.0)).abs() < 1e-10);
        let (_, mf) = meanfield_factorized(4, 1e3, 0.0, 1.0).unwrap();
        assert!((mf.m - 0.5).abs() < 1e-12);
        assert!(meanfield_factorized(0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn meanfield_product_has_zero_measure() {
        let cfg = SolverConfig::default();
        for &(bj0, field) in &[(2.0, 0.0), (6.0, 0.0), (3.0, 0.5)] {
            let (sites, mf) = meanfield_factorized(3, bj0, field, 1.0).unwrap();
            assert_eq!(sites.len(), 3);
            assert!((mf.site.trace().re - 1.0).abs() < 1e-15);
            let rho = mf.assemble(3).unwrap();
            let e = entanglement_production(&rho, &cfg, LogBase::Natural).unwrap().epsilon;
            assert!(e.abs() < 1e-10);
        }
    }

    #[test]
    fn r1_norms() {
        let (n, s, m) = (50, 0.5, 0.3);
        let sc = SpinCorrelations::uniform(n, s, m).unwrap();
        let top = spin_r1_norm(&sc).unwrap();
        assert!((top - (s * s + (n as f64 - 1.0) * m * m)).abs() < 1e-12);
        let sc = SpinCorrelations::uniform(5, s, 0.0).unwrap();
        assert!((spin_r1_norm(&sc).unwrap() - s * s).abs() < 1e-15);
        let mut bad = DMatrix::<f64>::identity(2, 2);
        bad[(0, 1)] = 0.1;
        let sc = SpinCorrelations::new(bad, vec![0.0; 2], 0.5).unwrap();
        assert!(spin_r1(&sc).is_err());
    }

    #[test]
    fn full_trace_identity() {
        let n = 3;
        let s = 0.5;
        // uncorrelated spins 1/2: ⟨(S^α)²⟩ = 1/4 per component
        let full = DMatrix::<f64>::identity(3 * n, 3 * n) * 0.25;
        assert!((check_full_trace(&full, n, s, 1e-12).unwrap() - 2.25).abs() < 1e-15);
        assert!(check_full_trace(&(full * 2.0), n, s, 1e-12).is_err());
    }
}
