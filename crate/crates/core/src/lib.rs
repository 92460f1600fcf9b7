//! Entanglement production by operators on multipartite spaces.

pub mod dnorm;
pub mod error;
pub mod factorize;
pub mod interchange;
pub mod measure;
pub mod reproduce;
pub mod spin;
pub mod states;
pub mod tensor;
pub mod transitions;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
pub use tensor::{
    expand_product, Ket, KetMixture, MultipartiteOperator, OperatorAction, ProductKet, SpaceShape,
    StructureFlags,
};
