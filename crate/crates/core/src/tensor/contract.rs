//! Low-level kernels on row-major tensors stored as flat slices.

use std::borrow::Cow;

use nalgebra::DMatrix;

use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Sums axis `axis` of `data` against `coeff`, removing that axis.
pub(crate) fn contract_axis(data: &[C64], dims: &[usize], axis: usize, coeff: &[C64]) -> Vec<C64> {
    let d = dims[axis];
    let inner: usize = dims[axis + 1..].iter().product();
    let outer = data.len() / (d * inner);
    let mut out = vec![ZERO; outer * inner];
    for o in 0..outer {
        let base = o * d * inner;
        let dst = &mut out[o * inner..(o + 1) * inner];
        for (a, &c) in coeff.iter().enumerate() {
            if c == ZERO {
                continue;
            }
            let src = &data[base + a * inner..base + (a + 1) * inner];
            for (x, &y) in dst.iter_mut().zip(src) {
                *x += c * y;
            }
        }
    }
    out
}

/// Contracts every axis except `keep` with the matching entry of `coeffs`.
///
/// Returns a vector of length `dims[keep]`.
pub(crate) fn contract_all_but(
    data: &[C64],
    dims: &[usize],
    coeffs: &[Vec<C64>],
    keep: usize,
) -> Vec<C64> {
    let mut cur: Cow<'_, [C64]> = Cow::Borrowed(data);
    let mut cur_dims = dims.to_vec();
    for j in (0..dims.len()).rev() {
        if j == keep {
            continue;
        }
        let next = contract_axis(&cur, &cur_dims, j, &coeffs[j]);
        cur_dims.remove(j);
        cur = Cow::Owned(next);
    }
    cur.into_owned()
}

/// Full contraction `Σ data[n_1…n_p] ∏ coeffs[i][n_i]`.
#[cfg(test)]
pub(crate) fn contract_all(data: &[C64], dims: &[usize], coeffs: &[Vec<C64>]) -> C64 {
    let last = dims.len() - 1;
    let v = contract_all_but(data, dims, coeffs, last);
    v.iter().zip(&coeffs[last]).map(|(a, b)| a * b).sum()
}

/// Applies the matrix `m` to axis `axis`: `y[…a…] = Σ_b m[a, b] x[…b…]`.
pub(crate) fn apply_axis(data: &[C64], dims: &[usize], axis: usize, m: &DMatrix<C64>) -> Vec<C64> {
    let d = dims[axis];
    let inner: usize = dims[axis + 1..].iter().product();
    let outer = data.len() / (d * inner);
    let mut out = vec![ZERO; data.len()];
    for o in 0..outer {
        let base = o * d * inner;
        for a in 0..d {
            let dst = base + a * inner;
            for b in 0..d {
                let c = m[(a, b)];
                if c == ZERO {
                    continue;
                }
                let src = base + b * inner;
                for i in 0..inner {
                    out[dst + i] += c * data[src + i];
                }
            }
        }
    }
    out
}

/// Applies `⊗_i mats[i]` to a row-major vector.
pub(crate) fn apply_local(data: &[C64], dims: &[usize], mats: &[DMatrix<C64>]) -> Vec<C64> {
    let mut cur = data.to_vec();
    for (axis, m) in mats.iter().enumerate() {
        cur = apply_axis(&cur, dims, axis, m);
    }
    cur
}

/// Single-partite reduction of `|x⟩⟨x|`: `R[a, b] = Σ_rest x[…a…] conj(x[…b…])`.
pub(crate) fn single_reduced(data: &[C64], dims: &[usize], axis: usize) -> DMatrix<C64> {
    let d = dims[axis];
    let inner: usize = dims[axis + 1..].iter().product();
    let outer = data.len() / (d * inner);
    let mut r = DMatrix::from_element(d, d, ZERO);
    for o in 0..outer {
        let base = o * d * inner;
        for a in 0..d {
            let xa = &data[base + a * inner..base + (a + 1) * inner];
            for b in a..d {
                let xb = &data[base + b * inner..base + (b + 1) * inner];
                let s: C64 = xa.iter().zip(xb).map(|(p, q)| p * q.conj()).sum();
                r[(a, b)] += s;
            }
        }
    }
    for a in 0..d {
        for b in 0..a {
            r[(a, b)] = r[(b, a)].conj();
        }
    }
    r
}

/// Kronecker product of a sequence of vectors, row-major.
pub(crate) fn kron_vectors(factors: &[Vec<C64>]) -> Vec<C64> {
    let mut out = vec![C64::new(1.0, 0.0)];
    for f in factors {
        let mut next = Vec::with_capacity(out.len() * f.len());
        for &a in &out {
            next.extend(f.iter().map(|&b| a * b));
        }
        out = next;
    }
    out
}

pub(crate) fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨x, y⟩`, conjugate-linear in `x`.
pub(crate) fn inner(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn contract_all_matches_explicit_sum() {
        let dims = [2, 3, 2];
        let data: Vec<C64> = (0..12).map(|k| c(k as f64, (k * k) as f64 * 0.1)).collect();
        let coeffs = vec![
            vec![c(1.0, 0.5), c(-0.3, 0.2)],
            vec![c(0.1, 0.0), c(0.0, 1.0), c(2.0, -1.0)],
            vec![c(0.7, 0.7), c(-1.0, 0.0)],
        ];
        let mut expected = c(0.0, 0.0);
        for a in 0..2 {
            for b in 0..3 {
                for d in 0..2 {
                    expected += data[a * 6 + b * 2 + d] * coeffs[0][a] * coeffs[1][b] * coeffs[2][d];
                }
            }
        }
        assert!((contract_all(&data, &dims, &coeffs) - expected).norm() < 1e-12);
        for keep in 0..3 {
            let v = contract_all_but(&data, &dims, &coeffs, keep);
            let total: C64 = v.iter().zip(&coeffs[keep]).map(|(x, y)| x * y).sum();
            assert!((total - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn reduced_of_product_vector_is_outer_product() {
        let a = vec![c(0.6, 0.0), c(0.0, 0.8)];
        let b = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let x = kron_vectors(&[a.clone(), b]);
        let r = single_reduced(&x, &[2, 3], 0);
        for i in 0..2 {
            for j in 0..2 {
                assert!((r[(i, j)] - a[i] * a[j].conj()).norm() < 1e-14);
            }
        }
    }
}
