use std::borrow::Cow;

use nalgebra::{DMatrix, DVector};

use super::contract;
use super::{Ket, MultipartiteOperator, OperatorAction, SpaceShape};
use crate::error::{domain_err, shape_err, Error, Result};
use crate::C64;

/// Largest total dimension for which a dense matrix is materialized.
pub const DENSE_LIMIT: usize = 4096;

/// A semipositive operator `Σ_k w_k |ψ_k⟩⟨ψ_k|` kept in factored form.
///
/// Members are stored normalized; weights are nonnegative. Operators whose
/// dense matrix would not fit in memory (large reduced densities of pure
/// states) are handled this way.
#[derive(Clone, Debug)]
pub struct KetMixture {
    shape: SpaceShape,
    members: Vec<(f64, Ket)>,
}

impl KetMixture {
    pub fn new(shape: SpaceShape, members: Vec<(f64, Ket)>) -> Result<Self> {
        if members.is_empty() {
            return Err(domain_err!("a mixture needs at least one member"));
        }
        let mut normed = Vec::with_capacity(members.len());
        for (w, k) in members {
            if k.shape() != &shape {
                return Err(shape_err!("member on {} in a mixture on {shape}", k.shape()));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::Validation(format!("mixture weight {w} is not a nonnegative number")));
            }
            let n = k.norm();
            if n == 0.0 {
                continue;
            }
            normed.push((w * n * n, k.normalized()?));
        }
        if normed.is_empty() {
            return Err(domain_err!("every mixture member vanishes"));
        }
        Ok(Self {
            shape,
            members: normed,
        })
    }

    pub fn pure(ket: Ket) -> Result<Self> {
        Self::new(ket.shape().clone(), vec![(1.0, ket)])
    }

    pub fn shape(&self) -> &SpaceShape {
        &self.shape
    }

    pub fn members(&self) -> &[(f64, Ket)] {
        &self.members
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(
            self.shape.clone(),
            self.members.iter().map(|(w, k)| (w * s, k.clone())).collect(),
        )
    }

    /// Materializes the dense matrix; refused above [`DENSE_LIMIT`].
    pub fn to_dense(&self) -> Result<MultipartiteOperator> {
        let n = self.shape.total_dim();
        if n > DENSE_LIMIT {
            return Err(domain_err!("dense form of dimension {n} exceeds {DENSE_LIMIT}"));
        }
        let mut m = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        for (w, k) in &self.members {
            let v = DVector::from_column_slice(k.amplitudes());
            m += (&v * v.adjoint()) * C64::new(*w, 0.0);
        }
        MultipartiteOperator::new(self.shape.clone(), m)
    }

    fn is_basis(k: &Ket) -> bool {
        k.nonzero_count() == 1
    }
}

impl OperatorAction for KetMixture {
    fn shape(&self) -> &SpaceShape {
        &self.shape
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); x.len()];
        for (w, k) in &self.members {
            let c = contract::inner(k.amplitudes(), x) * *w;
            for (o, a) in out.iter_mut().zip(k.amplitudes()) {
                *o += c * a;
            }
        }
        out
    }

    fn apply_adjoint(&self, x: &[C64]) -> Vec<C64> {
        self.apply(x)
    }

    fn trace(&self) -> C64 {
        C64::new(self.members.iter().map(|(w, _)| w).sum(), 0.0)
    }

    fn diagonal(&self) -> Vec<C64> {
        let mut d = vec![C64::new(0.0, 0.0); self.shape.total_dim()];
        for (w, k) in &self.members {
            for (o, a) in d.iter_mut().zip(k.amplitudes()) {
                *o += a.norm_sqr() * w;
            }
        }
        d
    }

    fn reduce_single(&self, i: usize) -> Result<DMatrix<C64>> {
        self.shape.check_partite(i)?;
        let d = self.shape.dim(i);
        let mut r = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
        for (w, k) in &self.members {
            let ri = if k.nonzero_count().saturating_mul(4) <= k.shape().total_dim() {
                k.support().reduced_single(self.shape.dims(), i)
            } else {
                k.reduced_single(i)?
            };
            r += ri * C64::new(*w, 0.0);
        }
        Ok(r)
    }

    fn is_diagonal(&self) -> bool {
        self.members.iter().all(|(_, k)| Self::is_basis(k))
    }

    fn is_semipositive(&self) -> bool {
        true
    }

    fn as_rank_one(&self) -> Option<(f64, Cow<'_, Ket>)> {
        match self.members.as_slice() {
            [(w, k)] => Some((*w, Cow::Borrowed(k))),
            _ => None,
        }
    }

    fn to_dense(&self) -> Result<MultipartiteOperator> {
        KetMixture::to_dense(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_ket(rng: &mut ChaCha8Rng, shape: &SpaceShape) -> Ket {
        let amp = (0..shape.total_dim())
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        Ket::new(shape.clone(), amp).unwrap()
    }

    #[test]
    fn actions_match_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let shape = SpaceShape::new(vec![2, 3]).unwrap();
        let mix = KetMixture::new(
            shape.clone(),
            vec![(0.3, rand_ket(&mut rng, &shape)), (1.7, rand_ket(&mut rng, &shape))],
        )
        .unwrap();
        let dense = mix.to_dense().unwrap();
        let x: Vec<C64> = rand_ket(&mut rng, &shape).into_amplitudes();
        let a = OperatorAction::apply(&mix, &x);
        let b = dense.apply(&x);
        assert!(a.iter().zip(&b).all(|(p, q)| (p - q).norm() < 1e-13));
        assert!((OperatorAction::trace(&mix) - dense.trace()).norm() < 1e-13);
        for i in 0..2 {
            let r = mix.reduce_single(i).unwrap();
            let oracle = dense.partial_trace(&[i]).unwrap();
            assert!((r - oracle.entries()).camax() < 1e-13);
        }
        assert!(dense.is_semipositive());
    }

    #[test]
    fn basis_members_are_diagonal() {
        let shape = SpaceShape::uniform(2, 2).unwrap();
        let mix = KetMixture::new(
            shape.clone(),
            vec![
                (0.5, Ket::basis(shape.clone(), &[0, 1]).unwrap()),
                (0.5, Ket::basis(shape.clone(), &[1, 0]).unwrap()),
            ],
        )
        .unwrap();
        assert!(OperatorAction::is_diagonal(&mix));
        assert!(mix.as_rank_one().is_none());
    }

    #[test]
    fn rejects_negative_weight() {
        let shape = SpaceShape::uniform(2, 1).unwrap();
        let k = Ket::basis(shape.clone(), &[0]).unwrap();
        assert!(KetMixture::new(shape, vec![(-1.0, k)]).is_err());
    }
}
