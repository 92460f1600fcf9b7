//! Multipartite spaces, kets and operators.

mod contract;
mod ket;
mod mixture;
mod operator;
mod shape;

use std::borrow::Cow;

use nalgebra::DMatrix;

pub use ket::{expand_product, Ket, ProductKet};
pub use mixture::{KetMixture, DENSE_LIMIT};
pub use operator::{MultipartiteOperator, StructureFlags, DEFAULT_FLAG_TOL};
pub use shape::SpaceShape;

pub(crate) use contract::{contract_all_but, inner, kron_vectors, norm, single_reduced};
pub(crate) use ket::Support;
pub(crate) use operator::spectral_norm_of;

use crate::error::Result;
use crate::C64;

/// What the solvers need from an operator, without assuming a dense matrix.
pub trait OperatorAction: Sync {
    fn shape(&self) -> &SpaceShape;

    /// `A x` for a row-major vector `x`.
    fn apply(&self, x: &[C64]) -> Vec<C64>;

    /// `A† x`.
    fn apply_adjoint(&self, x: &[C64]) -> Vec<C64>;

    fn trace(&self) -> C64;

    fn diagonal(&self) -> Vec<C64>;

    /// Partial trace onto the single partite `i`.
    fn reduce_single(&self, i: usize) -> Result<DMatrix<C64>>;

    fn is_diagonal(&self) -> bool;

    fn is_semipositive(&self) -> bool;

    /// `Some((w, ψ))` when the operator is `w |ψ⟩⟨ψ|` with unit `ψ`.
    fn as_rank_one(&self) -> Option<(f64, Cow<'_, Ket>)>;

    fn to_dense(&self) -> Result<MultipartiteOperator>;
}
