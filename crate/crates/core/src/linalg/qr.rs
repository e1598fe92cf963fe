//! Householder QR with a real nonnegative diagonal on `R`.

use num_traits::{One, Zero};

use super::matrix::{vec_norm, CMatrix};
use super::svd::svd;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::scalar::{unit_phase, Real, C};

/// Thin factors `Z = Q R` of a full-column-rank `m×n` matrix (`m ≥ n`).
#[derive(Debug, Clone)]
pub struct QrFactors<T> {
    pub q: CMatrix<T>,
    pub r: CMatrix<T>,
}

/// Householder reflectors `H_k = I − τ_k v_k v_k^*` packed for later reuse.
struct Reflectors<T> {
    vs: Vec<Vec<C<T>>>,
    taus: Vec<T>,
}

impl<T: Real> Reflectors<T> {
    /// Apply `H_0 H_1 ⋯ H_{k-1}` to `x` (in place).
    fn apply_q(&self, x: &mut [C<T>]) {
        for k in (0..self.vs.len()).rev() {
            self.apply_one(k, x);
        }
    }

    fn apply_one(&self, k: usize, x: &mut [C<T>]) {
        let tau = self.taus[k];
        if tau == T::zero() {
            return;
        }
        let v = &self.vs[k];
        let mut s = C::<T>::zero();
        for (i, vi) in v.iter().enumerate() {
            s += vi.conj() * x[k + i];
        }
        s *= tau;
        for (i, vi) in v.iter().enumerate() {
            x[k + i] -= *vi * s;
        }
    }
}

/// Reduce `z` to upper triangular form; returns the reflectors and `R` (`n×n`).
fn householder<T: Real>(z: &CMatrix<T>) -> (Reflectors<T>, CMatrix<T>) {
    let (m, n) = z.shape();
    let steps = n.min(m);
    let mut a = z.clone();
    let mut vs = Vec::with_capacity(steps);
    let mut taus = Vec::with_capacity(steps);
    for k in 0..steps {
        let x: Vec<C<T>> = (k..m).map(|i| a[(i, k)]).collect();
        let tail = vec_norm(&x[1..]);
        if tail == T::zero() {
            vs.push(vec![C::zero(); m - k]);
            taus.push(T::zero());
            continue;
        }
        let norm = vec_norm(&x);
        let alpha = -unit_phase(x[0]) * norm;
        let mut v = x.clone();
        v[0] -= alpha;
        let vnorm2 = vec_norm(&v).powi(2);
        let tau = T::lit(2.0) / vnorm2;
        for j in k..n {
            let mut s = C::<T>::zero();
            for (i, vi) in v.iter().enumerate() {
                s += vi.conj() * a[(k + i, j)];
            }
            s *= tau;
            for (i, vi) in v.iter().enumerate() {
                let cur = a[(k + i, j)];
                a[(k + i, j)] = cur - *vi * s;
            }
        }
        for i in k + 1..m {
            a[(i, k)] = C::zero();
        }
        vs.push(v);
        taus.push(tau);
    }
    let r = CMatrix::from_fn(n, n, |i, j| if i <= j && i < m { a[(i, j)] } else { C::zero() });
    (Reflectors { vs, taus }, r)
}

/// QR factorization with a full-column-rank check.
pub fn qr_decompose<T: Real>(z: &CMatrix<T>, tol: &Tolerances) -> Result<QrFactors<T>> {
    let (m, n) = z.shape();
    let f = svd(z)?;
    let threshold = T::lit(tol.rank_tol) * f.sigma_max();
    if m < n || f.sigma_min() <= threshold {
        let smin = if m < n { 0.0 } else { f.sigma_min().as_f64() };
        return Err(Error::RankDeficient { sigma_min: smin, threshold: threshold.as_f64() });
    }
    Ok(qr_unchecked(z))
}

/// QR without the rank check; `R` may have zero diagonal entries.
pub fn qr_unchecked<T: Real>(z: &CMatrix<T>) -> QrFactors<T> {
    let (m, n) = z.shape();
    let (refl, mut r) = householder(z);
    let mut q = CMatrix::zeros(m, n);
    for j in 0..n {
        let mut e = vec![C::<T>::zero(); m];
        if j < m {
            e[j] = C::one();
        }
        refl.apply_q(&mut e);
        q.set_column(j, &e);
    }
    // phase convention: diag(R) real and nonnegative
    for k in 0..n.min(m) {
        let d = r[(k, k)];
        let ph = unit_phase(d);
        if ph == C::one() {
            continue;
        }
        for j in 0..n {
            r[(k, j)] *= ph.conj();
        }
        for i in 0..m {
            q[(i, k)] *= ph;
        }
        r[(k, k)] = C::new(d.norm(), T::zero());
    }
    QrFactors { q, r }
}

/// Orthonormal basis of the orthogonal complement of `span(Q)` (`n×(n−r)`).
pub fn complement_basis<T: Real>(q: &CMatrix<T>) -> CMatrix<T> {
    let (n, r) = q.shape();
    let (refl, _) = householder(q);
    let mut out = CMatrix::zeros(n, n - r);
    for j in r..n {
        let mut e = vec![C::<T>::zero(); n];
        e[j] = C::one();
        refl.apply_q(&mut e);
        out.set_column(j - r, &e);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn rnd(m: usize, n: usize, seed: u64) -> CMatrix<f64> {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        CMatrix::from_fn(m, n, |_, _| c(next(), next()))
    }

    #[test]
    fn identity_factors_trivially() {
        let f = qr_decompose(&CMatrix::<f64>::identity(3), &Tolerances::default()).unwrap();
        assert_eq!(f.q, CMatrix::identity(3));
        assert_eq!(f.r, CMatrix::identity(3));
    }

    #[test]
    fn upper_triangular_positive_diagonal_is_fixed_point() {
        let z = CMatrix::new(
            3,
            3,
            vec![
                c(2.0, 0.0),
                c(1.0, 1.0),
                c(-3.0, 0.5),
                c(0.0, 0.0),
                c(0.5, 0.0),
                c(0.0, 2.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(4.0, 0.0),
            ],
        )
        .unwrap();
        let f = qr_decompose(&z, &Tolerances::default()).unwrap();
        assert_eq!(f.q, CMatrix::identity(3));
        assert_eq!(f.r, z);
    }

    #[test]
    fn random_tall_residual() {
        let z = rnd(5, 3, 11);
        let f = qr_decompose(&z, &Tolerances::default()).unwrap();
        let zn = crate::linalg::svd::spectral_norm(&z).unwrap();
        assert!((&f.q.matmul(&f.r) - &z).norm_fro() / zn <= 1e-12);
        assert!(f.q.adjoint().matmul(&f.q).dist_to_identity() <= 1e-12 * 3.0);
        for k in 0..3 {
            assert_eq!(f.r[(k, k)].im, 0.0);
            assert!(f.r[(k, k)].re >= 0.0);
            for i in k + 1..3 {
                assert_eq!(f.r[(i, k)], C::zero());
            }
        }
    }

    #[test]
    fn rank_deficient_is_reported() {
        let col = [c(1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0)];
        let z = CMatrix::from_fn(3, 2, |i, _| col[i]);
        assert!(matches!(qr_decompose(&z, &Tolerances::default()), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn complement_is_unitary_completion() {
        let z = rnd(7, 3, 5);
        let q = qr_unchecked(&z).q;
        let qp = complement_basis(&q);
        let full = q.hstack(&qp);
        assert!(full.adjoint().matmul(&full).dist_to_identity() <= 1e-12);
    }
}
