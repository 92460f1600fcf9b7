//! The nonentangling counterpart `A^⊗ = [Tr A / ∏ Tr A_i] ⊗_i A_i` of an
//! operator, built from its single-partite reductions `A_i`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{shape_err, Error, Result};
use crate::tensor::{spectral_norm_of, MultipartiteOperator, OperatorAction, SpaceShape};
use crate::C64;

/// Relative size below which a trace counts as zero.
pub const ZERO_TRACE_TOL: f64 = 1e-12;

/// `scale · ⊗_i factors[i]`, normalized so that its trace equals `source_trace`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductOperator {
    factors: Vec<DMatrix<C64>>,
    scale: C64,
    source_trace: C64,
}

/// Fails when `tr` vanishes relative to the diagonal it was summed from.
fn check_trace(tr: C64, diag_abs: f64, what: &str) -> Result<()> {
    if tr.norm() <= ZERO_TRACE_TOL * diag_abs || tr.norm() == 0.0 {
        return Err(Error::NormalizationUndefined(format!(
            "the trace of {what} vanishes, so no product operator has the same trace"
        )));
    }
    Ok(())
}

/// Partial trace of `A` onto partite `i`.
pub fn reduce_single(a: &dyn OperatorAction, i: usize) -> Result<MultipartiteOperator> {
    MultipartiteOperator::single(a.reduce_single(i)?)
}

/// Builds `A^⊗`. Rejects operators whose trace, or the trace of any
/// reduction, vanishes.
pub fn product_operator(a: &dyn OperatorAction) -> Result<ProductOperator> {
    let diag = a.diagonal();
    let tr = a.trace();
    check_trace(tr, diag.iter().map(|z| z.norm()).sum(), "the operator")?;
    let p = a.shape().parties();
    let factors = (0..p)
        .into_par_iter()
        .map(|i| a.reduce_single(i))
        .collect::<Result<Vec<_>>>()?;
    let mut denom = C64::new(1.0, 0.0);
    for (i, f) in factors.iter().enumerate() {
        let t = f.trace();
        let diag_abs: f64 = f.diagonal().iter().map(|z| z.norm()).sum();
        check_trace(t, diag_abs, &format!("reduction {i}"))?;
        denom *= t;
    }
    Ok(ProductOperator {
        factors,
        scale: tr / denom,
        source_trace: tr,
    })
}

impl ProductOperator {
    pub fn new(factors: Vec<DMatrix<C64>>, scale: C64, source_trace: C64) -> Result<Self> {
        if factors.is_empty() {
            return Err(shape_err!("a product operator needs at least one factor"));
        }
        if let Some(i) = factors.iter().position(|f| f.nrows() != f.ncols() || f.nrows() == 0) {
            return Err(shape_err!("factor {i} is not a nonempty square matrix"));
        }
        Ok(Self {
            factors,
            scale,
            source_trace,
        })
    }

    pub fn shape(&self) -> SpaceShape {
        SpaceShape::new(self.factors.iter().map(|f| f.nrows()).collect()).expect("square factors")
    }

    pub fn factors(&self) -> &[DMatrix<C64>] {
        &self.factors
    }

    pub fn scale(&self) -> C64 {
        self.scale
    }

    pub fn source_trace(&self) -> C64 {
        self.source_trace
    }

    /// `scale · ∏ Tr A_i`.
    pub fn trace(&self) -> C64 {
        self.factors.iter().fold(self.scale, |acc, f| acc * f.trace())
    }

    /// `‖A^⊗‖_D = |scale| · ∏ ‖A_i‖`, without assembling the full matrix.
    pub fn dnorm(&self) -> f64 {
        self.factors
            .iter()
            .fold(self.scale.norm(), |acc, f| acc * spectral_norm_of(f))
    }

    /// The dense Kronecker product.
    pub fn assemble(&self) -> Result<MultipartiteOperator> {
        let mut m = self.factors[0].clone() * self.scale;
        for f in &self.factors[1..] {
            m = m.kronecker(f);
        }
        MultipartiteOperator::new(self.shape(), m)
    }
}
