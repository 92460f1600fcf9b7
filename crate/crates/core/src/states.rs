//! Generators for the standard state families and their closed-form measures.

use std::f64::consts::LN_2;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{domain_err, Error, Result};
use crate::measure::{ln_falling, LogBase};
use crate::tensor::{Ket, KetMixture, MultipartiteOperator, OperatorAction, SpaceShape, DENSE_LIMIT};
use crate::C64;

/// Largest particle number accepted for Hartree-Fock states (`N^N` amplitudes).
pub const HF_MAX_N: usize = 8;

const NORM_TOL: f64 = 1e-10;
const POPULATION_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Epr,
    Bell,
    Ghz,
    Multicat,
    Multimode,
    HartreeFock,
    HfReduced,
    MixedMultimode,
    SeparableExample,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Epr => "epr",
            Family::Bell => "bell",
            Family::Ghz => "ghz",
            Family::Multicat => "multicat",
            Family::Multimode => "multimode",
            Family::HartreeFock => "hartree_fock",
            Family::HfReduced => "hf_reduced",
            Family::MixedMultimode => "mixed_multimode",
            Family::SeparableExample => "separable_example",
        }
    }

    /// Families described by a state vector.
    pub fn is_pure(self) -> bool {
        matches!(
            self,
            Family::Epr | Family::Bell | Family::Ghz | Family::Multicat | Family::Multimode | Family::HartreeFock
        )
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.replace('-', "_").as_str() {
            "epr" => Family::Epr,
            "bell" => Family::Bell,
            "ghz" => Family::Ghz,
            "multicat" => Family::Multicat,
            "multimode" => Family::Multimode,
            "hartree_fock" | "hf" => Family::HartreeFock,
            "hf_reduced" => Family::HfReduced,
            "mixed_multimode" => Family::MixedMultimode,
            "separable_example" | "separable" => Family::SeparableExample,
            _ => return Err(Error::Parse(format!("unknown family {s:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistics {
    Bose,
    #[default]
    Fermi,
}

impl FromStr for Statistics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bose" | "boson" | "bosons" => Ok(Statistics::Bose),
            "fermi" | "fermion" | "fermions" => Ok(Statistics::Fermi),
            _ => Err(Error::Parse(format!("unknown statistics {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// A member of one of the state families. Which fields matter depends on
/// the family; the rest are ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    /// Number of parts (particles).
    pub n: usize,
    /// Reduction order, for `hf_reduced` and `mixed_multimode`.
    #[serde(default)]
    pub p: Option<usize>,
    #[serde(default)]
    pub sign: Sign,
    /// `(c₁, c₂)` for multicat states, `c_n` for multimode states.
    #[serde(default)]
    pub coeffs: Vec<C64>,
    #[serde(default)]
    pub statistics: Statistics,
    /// Mode populations `w_n` of the mixed multimode state.
    #[serde(default)]
    pub populations: Vec<f64>,
    /// Normalize the mixed multimode state to unit trace instead of `N!/(N−p)!`.
    #[serde(default)]
    pub unit_trace: bool,
}

impl FamilySpec {
    fn base(family: Family, n: usize) -> Self {
        Self {
            family,
            n,
            p: None,
            sign: Sign::Plus,
            coeffs: Vec::new(),
            statistics: Statistics::Fermi,
            populations: Vec::new(),
            unit_trace: false,
        }
    }

    pub fn epr(sign: Sign) -> Self {
        Self { sign, ..Self::base(Family::Epr, 2) }
    }

    pub fn bell(sign: Sign) -> Self {
        Self { sign, ..Self::base(Family::Bell, 2) }
    }

    pub fn ghz(n: usize) -> Self {
        Self::base(Family::Ghz, n)
    }

    pub fn multicat(n: usize, c1: C64, c2: C64) -> Self {
        Self { coeffs: vec![c1, c2], ..Self::base(Family::Multicat, n) }
    }

    pub fn multimode(n: usize, coeffs: Vec<C64>) -> Self {
        Self { coeffs, ..Self::base(Family::Multimode, n) }
    }

    pub fn hartree_fock(n: usize, statistics: Statistics) -> Self {
        Self { statistics, ..Self::base(Family::HartreeFock, n) }
    }

    pub fn hf_reduced(n: usize, p: usize, statistics: Statistics) -> Self {
        Self { p: Some(p), statistics, ..Self::base(Family::HfReduced, n) }
    }

    pub fn mixed_multimode(n: usize, p: usize, populations: Vec<f64>) -> Self {
        Self { p: Some(p), populations, ..Self::base(Family::MixedMultimode, n) }
    }

    pub fn separable_example() -> Self {
        Self::base(Family::SeparableExample, 2)
    }

    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.sign = sign;
        self
    }

    pub fn with_unit_trace(mut self, unit_trace: bool) -> Self {
        self.unit_trace = unit_trace;
        self
    }

    /// Reduction order reported alongside results: `p` where it applies,
    /// otherwise the number of parts.
    pub fn order(&self) -> usize {
        self.p.unwrap_or(self.n)
    }

    fn require_n(&self, min: usize) -> Result<()> {
        if self.n < min {
            return Err(domain_err!("{} needs N ≥ {min}, got {}", self.family.as_str(), self.n));
        }
        Ok(())
    }

    fn reduction_order(&self) -> Result<usize> {
        self.p.ok_or_else(|| domain_err!("{} needs a reduction order p", self.family.as_str()))
    }

    /// Coefficients checked for normalization.
    fn normalized_coeffs(&self, expected: Option<usize>) -> Result<&[C64]> {
        if let Some(m) = expected {
            if self.coeffs.len() != m {
                return Err(Error::Validation(format!("expected {m} coefficients, got {}", self.coeffs.len())));
            }
        }
        if self.coeffs.is_empty() {
            return Err(Error::Validation("no coefficients given".into()));
        }
        let total: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation(format!("squared coefficients sum to {total}, not 1")));
        }
        Ok(&self.coeffs)
    }

    fn checked_populations(&self) -> Result<&[f64]> {
        let w = &self.populations;
        if w.is_empty() {
            return Err(Error::Validation("no populations given".into()));
        }
        if let Some(x) = w.iter().find(|&&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::Validation(format!("population {x} outside [0, 1]")));
        }
        let total: f64 = w.iter().sum();
        if (total - 1.0).abs() > POPULATION_TOL {
            return Err(Error::Validation(format!("populations sum to {total}, not 1")));
        }
        Ok(w)
    }
}

/// `Σ_n c_n |n…n⟩` on `N` parts of dimension `coeffs.len()`.
fn aligned_superposition(n: usize, coeffs: &[C64]) -> Result<Ket> {
    let shape = SpaceShape::uniform(coeffs.len(), n)?;
    let mut amp = vec![C64::new(0.0, 0.0); shape.total_dim()];
    for (mode, &c) in coeffs.iter().enumerate() {
        amp[shape.flat_index(&vec![mode; n])] = c;
    }
    Ket::new(shape, amp)
}

fn permutation_sign(perm: &[usize]) -> f64 {
    let inversions = (0..perm.len())
        .flat_map(|i| (i + 1..perm.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| perm[i] > perm[j])
        .count();
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(N!)^{-1/2} Σ_σ (±1)^σ |σ(1)…σ(N)⟩` on `N` parts of dimension `N`.
pub fn hartree_fock_ket(n: usize, statistics: Statistics) -> Result<Ket> {
    if n == 0 || n > HF_MAX_N {
        return Err(domain_err!("Hartree-Fock states need 1 ≤ N ≤ {HF_MAX_N}, got {n}"));
    }
    let shape = SpaceShape::uniform(n, n)?;
    let mut amp = vec![C64::new(0.0, 0.0); shape.total_dim()];
    let scale = (-0.5 * ln_falling(n as u64, n as u64)).exp();
    for perm in (0..n).permutations(n) {
        let s = match statistics {
            Statistics::Bose => 1.0,
            Statistics::Fermi => permutation_sign(&perm),
        };
        amp[shape.flat_index(&perm)] = C64::new(s * scale, 0.0);
    }
    Ket::new(shape, amp)
}

fn check_hf_reduction(n: usize, p: usize) -> Result<()> {
    if !(2..=HF_MAX_N).contains(&n) || p == 0 || p >= n {
        return Err(domain_err!("reduced Hartree-Fock needs 2 ≤ N ≤ {HF_MAX_N} and 1 ≤ p ≤ N−1, got N={n}, p={p}"));
    }
    Ok(())
}

/// Partial trace of the Hartree-Fock projector over parts `p+1…N`, dense.
pub fn hf_reduced(n: usize, p: usize, statistics: Statistics) -> Result<MultipartiteOperator> {
    check_hf_reduction(n, p)?;
    if n.pow(p as u32) > DENSE_LIMIT {
        return Err(domain_err!("dense reduced Hartree-Fock of dimension {} exceeds {DENSE_LIMIT}", n.pow(p as u32)));
    }
    hartree_fock_ket(n, statistics)?.reduced_density(&(0..p).collect::<Vec<_>>())
}

/// The same reduction as [`hf_reduced`], kept as a mixture of pure states.
pub fn hf_reduced_mixture(n: usize, p: usize, statistics: Statistics) -> Result<KetMixture> {
    check_hf_reduction(n, p)?;
    hartree_fock_ket(n, statistics)?.reduced_mixture(&(0..p).collect::<Vec<_>>())
}

/// `scale · Σ_n w_n |n…n⟩⟨n…n|` on `p` parts of dimension `m = w.len()`,
/// with `scale = N!/(N−p)!` or 1.
pub fn mixed_multimode(n: usize, p: usize, w: &[f64], unit_trace: bool) -> Result<MultipartiteOperator> {
    if p == 0 || p > n {
        return Err(domain_err!("mixed multimode needs 1 ≤ p ≤ N, got N={n}, p={p}"));
    }
    let scale = if unit_trace { 1.0 } else { ln_falling(n as u64, p as u64).exp() };
    let shape = SpaceShape::uniform(w.len(), p)?;
    let mut diag = vec![C64::new(0.0, 0.0); shape.total_dim()];
    for (mode, &wn) in w.iter().enumerate() {
        diag[shape.flat_index(&vec![mode; p])] = C64::new(scale * wn, 0.0);
    }
    MultipartiteOperator::from_diagonal(shape, &diag)
}

/// First-order matrix of partite `i` from `ρ_p` under the `N!/(N−p)!` trace
/// convention: `ρ_1 = (N−p)!/(N−1)! · Tr_{others} ρ_p`, so that `Tr ρ_1 = N`.
pub fn first_order_from(rho_p: &MultipartiteOperator, n: usize, i: usize) -> Result<MultipartiteOperator> {
    let p = rho_p.shape().parties();
    if p > n {
        return Err(domain_err!("p = {p} exceeds N = {n}"));
    }
    let factor = (-ln_falling(n as u64 - 1, p as u64 - 1)).exp();
    Ok(rho_p.partial_trace(&[i])?.scaled(C64::new(factor, 0.0)))
}

fn separable_example() -> MultipartiteOperator {
    let half = C64::new(0.5, 0.0);
    let zero = C64::new(0.0, 0.0);
    MultipartiteOperator::from_diagonal(SpaceShape::uniform(2, 2).expect("valid"), &[half, zero, zero, half])
        .expect("valid")
}

/// The state vector of a pure family.
pub fn make_ket(spec: &FamilySpec) -> Result<Ket> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let s = spec.sign.value();
    match spec.family {
        Family::Epr => {
            let shape = SpaceShape::uniform(2, 2)?;
            let z = C64::new(0.0, 0.0);
            Ket::new(shape, vec![z, C64::new(h, 0.0), C64::new(s * h, 0.0), z])
        }
        Family::Bell => aligned_superposition(2, &[C64::new(h, 0.0), C64::new(s * h, 0.0)]),
        Family::Ghz => {
            spec.require_n(1)?;
            aligned_superposition(spec.n, &[C64::new(h, 0.0), C64::new(s * h, 0.0)])
        }
        Family::Multicat => {
            spec.require_n(1)?;
            aligned_superposition(spec.n, spec.normalized_coeffs(Some(2))?)
        }
        Family::Multimode => {
            spec.require_n(1)?;
            aligned_superposition(spec.n, spec.normalized_coeffs(None)?)
        }
        Family::HartreeFock => hartree_fock_ket(spec.n, spec.statistics),
        f => Err(domain_err!("{} is not a pure-state family", f.as_str())),
    }
}

/// The dense density operator of any family.
pub fn make_density(spec: &FamilySpec) -> Result<MultipartiteOperator> {
    match spec.family {
        f if f.is_pure() => {
            let k = make_ket(spec)?;
            if k.shape().total_dim() > DENSE_LIMIT {
                return Err(domain_err!("dense projector of dimension {} exceeds {DENSE_LIMIT}", k.shape().total_dim()));
            }
            Ok(MultipartiteOperator::projector(&k))
        }
        Family::HfReduced => hf_reduced(spec.n, spec.reduction_order()?, spec.statistics),
        Family::MixedMultimode => {
            mixed_multimode(spec.n, spec.reduction_order()?, spec.checked_populations()?, spec.unit_trace)
        }
        Family::SeparableExample => Ok(separable_example()),
        _ => unreachable!("pure families handled above"),
    }
}

/// The operator of any family in its cheapest representation: pure states
/// and reduced Hartree-Fock operators stay factored, the rest are dense.
pub fn make_operator(spec: &FamilySpec) -> Result<Box<dyn OperatorAction>> {
    Ok(match spec.family {
        f if f.is_pure() => Box::new(KetMixture::pure(make_ket(spec)?)?),
        Family::HfReduced => Box::new(hf_reduced_mixture(spec.n, spec.reduction_order()?, spec.statistics)?),
        _ => Box::new(make_density(spec)?),
    })
}

/// The closed-form value of `ε` for a family, in nats before base conversion.
pub fn expected_epsilon(spec: &FamilySpec, base: LogBase) -> Result<f64> {
    let n = spec.n as f64;
    let nats = match spec.family {
        Family::Epr | Family::Bell | Family::SeparableExample => LN_2,
        Family::Ghz => (n - 1.0) * LN_2,
        Family::Multicat => {
            let c = spec.normalized_coeffs(Some(2))?;
            (1.0 - n) * c[0].norm_sqr().max(c[1].norm_sqr()).ln()
        }
        Family::Multimode => {
            let c = spec.normalized_coeffs(None)?;
            (1.0 - n) * c.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max).ln()
        }
        Family::HartreeFock => n * n.ln() - ln_falling(spec.n as u64, spec.n as u64),
        Family::HfReduced => {
            let p = spec.reduction_order()?;
            check_hf_reduction(spec.n, p)?;
            p as f64 * n.ln() - ln_falling(spec.n as u64, p as u64)
        }
        Family::MixedMultimode => {
            let p = spec.reduction_order()? as f64;
            let w = spec.checked_populations()?;
            (1.0 - p) * w.iter().copied().fold(0.0, f64::max).ln()
        }
    };
    Ok(base.from_nats(nats))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn epr_amplitudes() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let k = make_ket(&FamilySpec::epr(Sign::Plus)).unwrap();
        assert_eq!(k.amplitudes(), &[c(0.0), c(h), c(h), c(0.0)]);
        let k = make_ket(&FamilySpec::epr(Sign::Minus)).unwrap();
        assert_eq!(k.amplitudes()[2], c(-h));
    }

    #[test]
    fn ghz_three() {
        let k = make_ket(&FamilySpec::ghz(3)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (i, a) in k.amplitudes().iter().enumerate() {
            let expected = if i == 0 || i == 7 { h } else { 0.0 };
            assert_eq!(*a, c(expected));
        }
    }

    #[test]
    fn hartree_fock_two_is_epr() {
        let hf = make_ket(&FamilySpec::hartree_fock(2, Statistics::Bose)).unwrap();
        let epr = make_ket(&FamilySpec::epr(Sign::Plus)).unwrap();
        assert!((hf.overlap(&epr).unwrap().norm() - 1.0).abs() < 1e-14);
        let hf = make_ket(&FamilySpec::hartree_fock(2, Statistics::Fermi)).unwrap();
        let epr = make_ket(&FamilySpec::epr(Sign::Minus)).unwrap();
        assert!((hf.overlap(&epr).unwrap().norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hartree_fock_is_normalized_and_antisymmetric() {
        for n in 1..=5 {
            let k = hartree_fock_ket(n, Statistics::Fermi).unwrap();
            assert!((k.norm() - 1.0).abs() < 1e-12);
        }
        let k = hartree_fock_ket(3, Statistics::Fermi).unwrap();
        let s = k.shape();
        assert_eq!(k.amplitudes()[s.flat_index(&[0, 1, 2])], -k.amplitudes()[s.flat_index(&[1, 0, 2])]);
        assert!(hartree_fock_ket(9, Statistics::Bose).is_err());
    }

    #[test]
    fn normalization_is_validated() {
        assert!(make_ket(&FamilySpec::multicat(3, c(0.5), c(0.5))).is_err());
        assert!(make_ket(&FamilySpec::multimode(3, vec![c(0.6), c(0.8), c(0.1)])).is_err());
        assert!(make_density(&FamilySpec::mixed_multimode(3, 2, vec![0.7, 0.7])).is_err());
        assert!(make_density(&FamilySpec::mixed_multimode(3, 2, vec![1.5, -0.5])).is_err());
    }

    #[test]
    fn separable_example_density() {
        let d = make_density(&FamilySpec::separable_example()).unwrap();
        assert_eq!(d.entries()[(0, 0)], c(0.5));
        assert_eq!(d.entries()[(3, 3)], c(0.5));
        assert!(d.is_diagonal());
    }

    #[test]
    fn mixed_multimode_trace() {
        let d = make_density(&FamilySpec::mixed_multimode(3, 2, vec![0.5, 0.5])).unwrap();
        assert!((d.trace() - c(6.0)).norm() < 1e-12);
        let u = make_density(&FamilySpec::mixed_multimode(3, 2, vec![0.5, 0.5]).with_unit_trace(true)).unwrap();
        assert!((u.trace() - c(1.0)).norm() < 1e-12);
        let r1 = first_order_from(&d, 3, 0).unwrap();
        assert!((r1.trace() - c(3.0)).norm() < 1e-12);
    }

    #[test]
    fn bell_projector_is_idempotent() {
        let d = make_density(&FamilySpec::bell(Sign::Minus)).unwrap();
        let sq = d.entries() * d.entries();
        assert!((sq - d.entries()).camax() < 1e-14);
        assert!((d.trace() - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn hf_reduced_small_cases() {
        let r = hf_reduced(2, 1, Statistics::Fermi).unwrap();
        let expected = nalgebra::DMatrix::<C64>::identity(2, 2) * c(0.5);
        assert!((r.entries() - expected).camax() < 1e-14);
        assert!(hf_reduced(4, 4, Statistics::Fermi).is_err());
        let dense = hf_reduced(4, 2, Statistics::Bose).unwrap();
        let mix = hf_reduced_mixture(4, 2, Statistics::Bose).unwrap().to_dense().unwrap();
        assert!((dense.entries() - mix.entries()).camax() < 1e-14);
    }

    #[test]
    fn closed_forms() {
        let e = expected_epsilon(&FamilySpec::multicat(4, c(1.0), c(0.0)), LogBase::Natural).unwrap();
        assert_eq!(e, 0.0);
        let m = 3usize;
        let coeffs = vec![c(1.0 / (m as f64).sqrt()); m];
        let e = expected_epsilon(&FamilySpec::multimode(5, coeffs), LogBase::Natural).unwrap();
        assert!((e - 4.0 * (m as f64).ln()).abs() < 1e-12);
        let e = expected_epsilon(&FamilySpec::ghz(6), LogBase::Two).unwrap();
        assert!((e - 5.0).abs() < 1e-12);
        let e = expected_epsilon(&FamilySpec::hartree_fock(3, Statistics::Fermi), LogBase::Natural).unwrap();
        assert!((e - 4.5f64.ln()).abs() < 1e-12);
        let e = expected_epsilon(&FamilySpec::hf_reduced(4, 2, Statistics::Fermi), LogBase::Natural).unwrap();
        assert!((e - (4.0f64 / 3.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn family_names_parse() {
        assert_eq!("hartree-fock".parse::<Family>().unwrap(), Family::HartreeFock);
        assert_eq!("mixed_multimode".parse::<Family>().unwrap(), Family::MixedMultimode);
        assert!("nope".parse::<Family>().is_err());
        let json = serde_json::to_string(&FamilySpec::ghz(3)).unwrap();
        let back: FamilySpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, FamilySpec::ghz(3));
    }
}
