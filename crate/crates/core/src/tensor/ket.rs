use std::collections::HashMap;

use nalgebra::DMatrix;

use super::contract::{self, kron_vectors};
use super::{KetMixture, MultipartiteOperator, SpaceShape};
use crate::error::{domain_err, shape_err, Error, Result};
use crate::C64;

/// A state vector `Σ c_{n_1…n_p} |n_1…n_p⟩` on a multipartite space.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    shape: SpaceShape,
    amp: Vec<C64>,
}

impl Ket {
    pub fn new(shape: SpaceShape, amp: Vec<C64>) -> Result<Self> {
        if amp.len() != shape.total_dim() {
            return Err(shape_err!(
                "{} amplitudes for a space of dimension {}",
                amp.len(),
                shape.total_dim()
            ));
        }
        if amp.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("non-finite amplitude".into()));
        }
        Ok(Self { shape, amp })
    }

    /// The computational basis state `|n_1…n_p⟩`.
    pub fn basis(shape: SpaceShape, idx: &[usize]) -> Result<Self> {
        if idx.len() != shape.parties() || idx.iter().zip(shape.dims()).any(|(&n, &d)| n >= d) {
            return Err(shape_err!("basis label {idx:?} does not fit {shape}"));
        }
        let mut amp = vec![C64::new(0.0, 0.0); shape.total_dim()];
        amp[shape.flat_index(idx)] = C64::new(1.0, 0.0);
        Ok(Self { shape, amp })
    }

    pub fn shape(&self) -> &SpaceShape {
        &self.shape
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amp
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amp
    }

    pub fn norm(&self) -> f64 {
        contract::norm(&self.amp)
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(domain_err!("cannot normalize the zero ket"));
        }
        Ok(Self {
            shape: self.shape.clone(),
            amp: self.amp.iter().map(|z| z / n).collect(),
        })
    }

    /// `(self, other)`, conjugate-linear in `self`.
    pub fn overlap(&self, other: &Ket) -> Result<C64> {
        if self.shape != other.shape {
            return Err(shape_err!("overlap of {} with {}", self.shape, other.shape));
        }
        Ok(contract::inner(&self.amp, &other.amp))
    }

    /// `self ⊗ other`.
    pub fn kron(&self, other: &Ket) -> Ket {
        let amp = kron_vectors(&[self.amp.clone(), other.amp.clone()]);
        Ket {
            shape: self.shape.concat(&other.shape),
            amp,
        }
    }

    /// Single-partite reduction of `|ψ⟩⟨ψ|` onto partite `i`.
    pub fn reduced_single(&self, i: usize) -> Result<DMatrix<C64>> {
        self.shape.check_partite(i)?;
        Ok(contract::single_reduced(&self.amp, self.shape.dims(), i))
    }

    /// Amplitudes arranged as a (kept × traced) matrix.
    fn split_matrix(&self, keep: &[usize]) -> Result<(Vec<usize>, DMatrix<C64>)> {
        let keep = self.shape.check_subset(keep)?;
        let traced: Vec<usize> = (0..self.shape.parties())
            .filter(|i| !keep.contains(i))
            .collect();
        let strides = self.shape.strides();
        let keep_off = axis_offsets(&self.shape, &strides, &keep);
        let trace_off = axis_offsets(&self.shape, &strides, &traced);
        let x = DMatrix::from_fn(keep_off.len(), trace_off.len(), |k, t| {
            self.amp[keep_off[k] + trace_off[t]]
        });
        Ok((keep, x))
    }

    /// Partial trace of `|ψ⟩⟨ψ|` keeping the partites in `keep`.
    ///
    /// Computed directly from the amplitudes, never forming the projector.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<MultipartiteOperator> {
        let (keep, x) = self.split_matrix(keep)?;
        let rho = &x * x.adjoint();
        MultipartiteOperator::new(self.shape.subshape(&keep), rho)
    }

    /// The same partial trace as [`Ket::reduced_density`], kept as a
    /// weighted sum of pure states (one per traced configuration).
    pub fn reduced_mixture(&self, keep: &[usize]) -> Result<KetMixture> {
        let (keep, x) = self.split_matrix(keep)?;
        let shape = self.shape.subshape(&keep);
        let mut members = Vec::new();
        for col in x.column_iter() {
            let v: Vec<C64> = col.iter().copied().collect();
            let w = contract::norm(&v);
            if w > 0.0 {
                let ket = Ket::new(shape.clone(), v.iter().map(|z| z / w).collect())?;
                members.push((w * w, ket));
            }
        }
        KetMixture::new(shape, members)
    }

    /// Nonzero amplitudes with their multi-indices, for sparse contractions.
    pub(crate) fn support(&self) -> Support {
        let p = self.shape.parties();
        let mut digits = Vec::new();
        let mut amps = Vec::new();
        for (flat, &a) in self.amp.iter().enumerate() {
            if a != C64::new(0.0, 0.0) {
                digits.extend(self.shape.multi_index(flat));
                amps.push(a);
            }
        }
        Support {
            parties: p,
            digits,
            amps,
        }
    }

    pub(crate) fn nonzero_count(&self) -> usize {
        self.amp.iter().filter(|z| **z != C64::new(0.0, 0.0)).count()
    }
}

/// Flat offsets of every multi-index over `axes`, row-major in `axes`.
pub(crate) fn axis_offsets(shape: &SpaceShape, strides: &[usize], axes: &[usize]) -> Vec<usize> {
    let mut offs = vec![0usize];
    for &ax in axes {
        let d = shape.dim(ax);
        let mut next = Vec::with_capacity(offs.len() * d);
        for &o in &offs {
            for n in 0..d {
                next.push(o + n * strides[ax]);
            }
        }
        offs = next;
    }
    offs
}

/// Sparse view of a ket: multi-indices (flattened, `parties` per entry) and amplitudes.
pub(crate) struct Support {
    pub parties: usize,
    pub digits: Vec<usize>,
    pub amps: Vec<C64>,
}

impl Support {
    /// Sparse counterpart of `contract_all_but`.
    pub fn contract_all_but(&self, dims: &[usize], coeffs: &[Vec<C64>], keep: usize) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); dims[keep]];
        for (e, &a) in self.amps.iter().enumerate() {
            let idx = &self.digits[e * self.parties..(e + 1) * self.parties];
            let mut prod = a;
            for (j, &n) in idx.iter().enumerate() {
                if j != keep {
                    prod *= coeffs[j][n];
                }
            }
            out[idx[keep]] += prod;
        }
        out
    }

    /// Single-partite reduction of `|ψ⟩⟨ψ|` from the sparse entries alone.
    pub fn reduced_single(&self, dims: &[usize], keep: usize) -> DMatrix<C64> {
        let mut groups: HashMap<Vec<usize>, Vec<(usize, C64)>> = HashMap::new();
        for (e, &a) in self.amps.iter().enumerate() {
            let idx = &self.digits[e * self.parties..(e + 1) * self.parties];
            let mut rest = idx.to_vec();
            let n = rest.remove(keep);
            groups.entry(rest).or_default().push((n, a));
        }
        let d = dims[keep];
        let mut r = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
        for entries in groups.values() {
            for &(a, x) in entries {
                for &(b, y) in entries {
                    r[(a, b)] += x * y.conj();
                }
            }
        }
        r
    }
}

/// A product state `⊗_i φ_i`, stored factor by factor.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductKet {
    factors: Vec<Vec<C64>>,
}

impl ProductKet {
    pub fn new(factors: Vec<Vec<C64>>) -> Result<Self> {
        if factors.is_empty() || factors.iter().any(|f| f.is_empty()) {
            return Err(shape_err!("a product ket needs nonempty factors"));
        }
        Ok(Self { factors })
    }

    /// Computational basis product `⊗|n_i⟩`.
    pub fn basis(shape: &SpaceShape, idx: &[usize]) -> Self {
        let factors = shape
            .dims()
            .iter()
            .zip(idx)
            .map(|(&d, &n)| {
                let mut v = vec![C64::new(0.0, 0.0); d];
                v[n] = C64::new(1.0, 0.0);
                v
            })
            .collect();
        Self { factors }
    }

    pub fn factors(&self) -> &[Vec<C64>] {
        &self.factors
    }

    pub fn shape(&self) -> SpaceShape {
        SpaceShape::new(self.factors.iter().map(Vec::len).collect())
            .expect("factors are nonempty")
    }

    /// `∏_i ‖φ_i‖`.
    pub fn norm(&self) -> f64 {
        self.factors.iter().map(|f| contract::norm(f)).product()
    }

    pub fn normalized(&self) -> Result<Self> {
        let factors = self
            .factors
            .iter()
            .map(|f| {
                let n = contract::norm(f);
                if n == 0.0 {
                    Err(domain_err!("zero factor in product ket"))
                } else {
                    Ok(f.iter().map(|z| z / n).collect())
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self { factors })
    }

    /// Expands `⊗φ_i` into a full amplitude vector.
    pub fn expand(&self) -> Ket {
        Ket {
            shape: self.shape(),
            amp: kron_vectors(&self.factors),
        }
    }

    /// Checks the factor lengths against `shape` and expands.
    pub fn expand_on(&self, shape: &SpaceShape) -> Result<Ket> {
        if self.factors.len() != shape.parties()
            || self.factors.iter().zip(shape.dims()).any(|(f, &d)| f.len() != d)
        {
            return Err(shape_err!("product ket of shape {} on {shape}", self.shape()));
        }
        Ok(self.expand())
    }

    /// `∏_i (φ_i, φ'_i)`.
    pub fn overlap(&self, other: &ProductKet) -> Result<C64> {
        if self.shape() != other.shape() {
            return Err(shape_err!("overlap of {} with {}", self.shape(), other.shape()));
        }
        Ok(self
            .factors
            .iter()
            .zip(&other.factors)
            .map(|(a, b)| contract::inner(a, b))
            .product())
    }
}

/// Expands a product ket into its amplitude vector.
pub fn expand_product(f: &ProductKet, shape: &SpaceShape) -> Result<Ket> {
    f.expand_on(shape)
}
