use serde::{Deserialize, Serialize};

use crate::error::{shape_err, Result};

/// Dimensions of the single-partite spaces making up `H = H_1 ⊗ … ⊗ H_p`.
///
/// Partite indices are zero-based throughout the crate and every flat index
/// is row-major over `(n_1, …, n_p)`: the last partite varies fastest.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SpaceShape {
    dims: Vec<usize>,
    total: usize,
}

impl SpaceShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(shape_err!("a space needs at least one partite"));
        }
        if let Some(i) = dims.iter().position(|&d| d == 0) {
            return Err(shape_err!("partite {i} has dimension 0"));
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| shape_err!("total dimension of {dims:?} overflows"))?;
        Ok(Self { dims, total })
    }

    /// `p` copies of a `d`-dimensional space.
    pub fn uniform(d: usize, p: usize) -> Result<Self> {
        Self::new(vec![d; p])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of partites `p`.
    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    pub fn dim(&self, i: usize) -> usize {
        self.dims[i]
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        strides
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims.len());
        idx.iter()
            .zip(&self.dims)
            .fold(0, |acc, (&n, &d)| acc * d + n)
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims.len()];
        for (slot, &d) in idx.iter_mut().zip(&self.dims).rev() {
            *slot = flat % d;
            flat /= d;
        }
        idx
    }

    /// Shape of `self ⊗ other`.
    pub fn concat(&self, other: &SpaceShape) -> SpaceShape {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        SpaceShape::new(dims).expect("product of valid shapes")
    }

    /// Shape of the partites listed in `keep` (which must be sorted and valid).
    pub fn subshape(&self, keep: &[usize]) -> SpaceShape {
        SpaceShape::new(keep.iter().map(|&i| self.dims[i]).collect())
            .expect("subshape of a valid shape")
    }

    pub(crate) fn check_partite(&self, i: usize) -> Result<()> {
        if i >= self.parties() {
            return Err(shape_err!(
                "partite index {i} out of range for {} partites",
                self.parties()
            ));
        }
        Ok(())
    }

    /// Validates a set of partite indices and returns it sorted.
    pub(crate) fn check_subset(&self, keep: &[usize]) -> Result<Vec<usize>> {
        if keep.is_empty() {
            return Err(crate::error::Error::Domain(
                "the set of kept partites is empty".into(),
            ));
        }
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != keep.len() {
            return Err(shape_err!("duplicate partite indices in {keep:?}"));
        }
        for &i in &sorted {
            self.check_partite(i)?;
        }
        Ok(sorted)
    }
}

impl TryFrom<Vec<usize>> for SpaceShape {
    type Error = crate::error::Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        SpaceShape::new(dims)
    }
}

impl From<SpaceShape> for Vec<usize> {
    fn from(shape: SpaceShape) -> Self {
        shape.dims
    }
}

impl std::fmt::Display for SpaceShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("⊗"))
    }
}
