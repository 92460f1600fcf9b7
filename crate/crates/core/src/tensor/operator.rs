use std::borrow::Cow;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use super::contract;
use super::ket::axis_offsets;
use super::{Ket, OperatorAction, SpaceShape};
use crate::error::{shape_err, Error, Result};
use crate::C64;

/// Tolerance used for the lazily computed structure flags.
pub const DEFAULT_FLAG_TOL: f64 = 1e-10;

/// Structural properties of an operator and the tolerance they were decided with.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StructureFlags {
    pub hermitian: bool,
    pub semipositive: bool,
    pub diagonal: bool,
    pub tolerance: f64,
}

impl StructureFlags {
    fn compute(m: &DMatrix<C64>, tol: f64) -> Self {
        let n = m.nrows();
        let mut herm_dev = 0.0f64;
        let mut off_diag = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                let a = m[(i, j)];
                if i != j {
                    off_diag = off_diag.max(a.norm());
                }
                if i >= j {
                    herm_dev = herm_dev.max((a - m[(j, i)].conj()).norm());
                }
            }
        }
        let hermitian = herm_dev <= tol;
        let diagonal = off_diag <= tol;
        let semipositive = hermitian
            && if diagonal {
                (0..n).all(|i| m[(i, i)].re >= -tol)
            } else {
                // A + tol·I admits a Cholesky factor iff λ_min(A) > -tol.
                let shifted = m + DMatrix::<C64>::identity(n, n) * C64::new(tol, 0.0);
                shifted.cholesky().is_some()
            };
        Self {
            hermitian,
            semipositive,
            diagonal,
            tolerance: tol,
        }
    }
}

/// A dense operator on a multipartite space.
#[derive(Clone, Debug)]
pub struct MultipartiteOperator {
    shape: SpaceShape,
    entries: DMatrix<C64>,
    flags: OnceLock<StructureFlags>,
}

impl PartialEq for MultipartiteOperator {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape && self.entries == other.entries
    }
}

impl MultipartiteOperator {
    pub fn new(shape: SpaceShape, entries: DMatrix<C64>) -> Result<Self> {
        let n = shape.total_dim();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(shape_err!(
                "{}×{} matrix on a space of dimension {n}",
                entries.nrows(),
                entries.ncols()
            ));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("non-finite operator entry".into()));
        }
        Ok(Self {
            shape,
            entries,
            flags: OnceLock::new(),
        })
    }

    /// Builds from row-major entries.
    pub fn from_row_major(shape: SpaceShape, entries: &[C64]) -> Result<Self> {
        let n = shape.total_dim();
        if entries.len() != n * n {
            return Err(shape_err!("{} entries for a {n}×{n} operator", entries.len()));
        }
        Self::new(shape, DMatrix::from_row_slice(n, n, entries))
    }

    pub fn identity(shape: SpaceShape) -> Self {
        let n = shape.total_dim();
        Self::new(shape, DMatrix::identity(n, n)).expect("identity is valid")
    }

    pub fn from_diagonal(shape: SpaceShape, diag: &[C64]) -> Result<Self> {
        if diag.len() != shape.total_dim() {
            return Err(shape_err!("{} diagonal entries on {shape}", diag.len()));
        }
        Self::new(shape, DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(ket: &Ket) -> Self {
        let v = DVector::from_column_slice(ket.amplitudes());
        Self::new(ket.shape().clone(), &v * v.adjoint()).expect("outer product is valid")
    }

    /// A single-partite operator wrapping a square matrix.
    pub fn single(m: DMatrix<C64>) -> Result<Self> {
        Self::new(SpaceShape::new(vec![m.nrows()])?, m)
    }

    pub fn shape(&self) -> &SpaceShape {
        &self.shape
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<C64> {
        self.entries
    }

    pub fn row_major(&self) -> Vec<C64> {
        self.entries.transpose().as_slice().to_vec()
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    /// Structure flags decided with [`DEFAULT_FLAG_TOL`], computed once.
    pub fn flags(&self) -> StructureFlags {
        *self
            .flags
            .get_or_init(|| StructureFlags::compute(&self.entries, DEFAULT_FLAG_TOL))
    }

    /// Structure flags decided with a caller-chosen tolerance (not cached).
    pub fn flags_with_tolerance(&self, tol: f64) -> StructureFlags {
        StructureFlags::compute(&self.entries, tol)
    }

    pub fn is_hermitian(&self) -> bool {
        self.flags().hermitian
    }

    pub fn is_semipositive(&self) -> bool {
        self.flags().semipositive
    }

    pub fn is_diagonal(&self) -> bool {
        self.flags().diagonal
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.shape.clone(), self.entries.adjoint()).expect("same shape")
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self::new(self.shape.clone(), &self.entries * s).expect("same shape")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape != other.shape {
            return Err(shape_err!("sum of operators on {} and {}", self.shape, other.shape));
        }
        Self::new(self.shape.clone(), &self.entries + &other.entries)
    }

    /// Kronecker product of a sequence of operators; the result's partites are
    /// the concatenation of the factors' partites.
    pub fn kron(ops: &[&MultipartiteOperator]) -> Result<Self> {
        let (first, rest) = ops
            .split_first()
            .ok_or_else(|| shape_err!("kron of an empty sequence"))?;
        let mut shape = first.shape.clone();
        let mut m = first.entries.clone();
        for op in rest {
            shape = shape.concat(&op.shape);
            m = m.kronecker(&op.entries);
        }
        Self::new(shape, m)
    }

    /// Traces out every partite not in `keep`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let keep = self.shape.check_subset(keep)?;
        let traced: Vec<usize> = (0..self.shape.parties())
            .filter(|i| !keep.contains(i))
            .collect();
        let strides = self.shape.strides();
        let keep_off = axis_offsets(&self.shape, &strides, &keep);
        let trace_off = axis_offsets(&self.shape, &strides, &traced);
        let k = keep_off.len();
        let out = DMatrix::from_fn(k, k, |r, c| {
            trace_off
                .iter()
                .map(|&t| self.entries[(keep_off[r] + t, keep_off[c] + t)])
                .sum()
        });
        Self::new(self.shape.subshape(&keep), out)
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        spectral_norm_of(&self.entries)
    }

    /// `(⊗U_i)† A (⊗U_i)`, with each `U_i` checked for unitarity to `tol`.
    pub fn apply_local_unitaries(&self, us: &[DMatrix<C64>], tol: f64) -> Result<Self> {
        if us.len() != self.shape.parties() {
            return Err(shape_err!(
                "{} local unitaries for {} partites",
                us.len(),
                self.shape.parties()
            ));
        }
        for (i, (u, &d)) in us.iter().zip(self.shape.dims()).enumerate() {
            if u.nrows() != d || u.ncols() != d {
                return Err(shape_err!("unitary {i} is {}×{}, partite has dimension {d}", u.nrows(), u.ncols()));
            }
            let dev = (u.adjoint() * u - DMatrix::<C64>::identity(d, d))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            if dev > tol {
                return Err(Error::Validation(format!(
                    "factor {i} deviates from unitarity by {dev:.3e}"
                )));
            }
        }
        let dims = self.shape.dims();
        let n = self.shape.total_dim();
        // A·U: each row r maps to (U^T row_r^T)^T.
        let ut: Vec<DMatrix<C64>> = us.iter().map(|u| u.transpose()).collect();
        let mut au = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        for r in 0..n {
            let row: Vec<C64> = self.entries.row(r).iter().copied().collect();
            let out = contract::apply_local(&row, dims, &ut);
            for (c, v) in out.into_iter().enumerate() {
                au[(r, c)] = v;
            }
        }
        // U†·(A·U), column by column.
        let ud: Vec<DMatrix<C64>> = us.iter().map(|u| u.adjoint()).collect();
        let mut res = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        for c in 0..n {
            let out = contract::apply_local(au.column(c).as_slice(), dims, &ud);
            res.column_mut(c).copy_from_slice(&out);
        }
        Self::new(self.shape.clone(), res)
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let v = DVector::from_column_slice(x);
        (&self.entries * v).as_slice().to_vec()
    }

    pub fn apply_adjoint(&self, x: &[C64]) -> Vec<C64> {
        let v = DVector::from_column_slice(x);
        self.entries.ad_mul(&v).as_slice().to_vec()
    }

    /// Detects `A = w |ψ⟩⟨ψ|` with `w > 0` and unit `ψ`.
    pub fn rank_one(&self) -> Option<(f64, Ket)> {
        if !self.is_semipositive() {
            return None;
        }
        let tr = self.trace().re;
        if tr <= 0.0 {
            return None;
        }
        let frob2: f64 = self.entries.iter().map(|z| z.norm_sqr()).sum();
        // Tr(A²) = (Tr A)² holds for a semipositive A exactly when rank A = 1.
        if (frob2 - tr * tr).abs() > 1e-12 * tr * tr {
            return None;
        }
        let n = self.shape.total_dim();
        let j = (0..n)
            .max_by(|&a, &b| self.entries[(a, a)].re.total_cmp(&self.entries[(b, b)].re))
            .expect("nonempty");
        let pivot = self.entries[(j, j)].re.sqrt();
        let v: Vec<C64> = self.entries.column(j).iter().map(|z| z / pivot).collect();
        let w = contract::norm(&v);
        let ket = Ket::new(self.shape.clone(), v.iter().map(|z| z / w).collect()).ok()?;
        Some((w * w, ket))
    }
}

pub(crate) fn spectral_norm_of(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let n = m.nrows();
    let diagonal = (0..n).all(|j| (0..n).all(|i| i == j || m[(i, j)] == C64::new(0.0, 0.0)));
    if diagonal {
        return (0..n).map(|i| m[(i, i)].norm()).fold(0.0, f64::max);
    }
    m.singular_values().max()
}

impl OperatorAction for MultipartiteOperator {
    fn shape(&self) -> &SpaceShape {
        &self.shape
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        MultipartiteOperator::apply(self, x)
    }

    fn apply_adjoint(&self, x: &[C64]) -> Vec<C64> {
        MultipartiteOperator::apply_adjoint(self, x)
    }

    fn trace(&self) -> C64 {
        MultipartiteOperator::trace(self)
    }

    fn diagonal(&self) -> Vec<C64> {
        self.entries.diagonal().as_slice().to_vec()
    }

    fn reduce_single(&self, i: usize) -> Result<DMatrix<C64>> {
        self.shape.check_partite(i)?;
        Ok(self.partial_trace(&[i])?.into_entries())
    }

    fn is_diagonal(&self) -> bool {
        MultipartiteOperator::is_diagonal(self)
    }

    fn is_semipositive(&self) -> bool {
        MultipartiteOperator::is_semipositive(self)
    }

    fn as_rank_one(&self) -> Option<(f64, Cow<'_, Ket>)> {
        self.rank_one().map(|(w, k)| (w, Cow::Owned(k)))
    }

    fn to_dense(&self) -> Result<MultipartiteOperator> {
        Ok(self.clone())
    }
}
