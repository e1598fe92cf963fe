//! Thin singular value decomposition by one-sided (Hestenes) Jacobi rotations.
//!
//! One-sided Jacobi keeps small singular values to high relative accuracy,
//! which matters here: principal-angle sines and `σ_min` of ill-conditioned
//! eigenvector blocks are exactly the quantities under study.

use num_traits::{One, Zero};

use super::matrix::{dot_c, vec_norm, CMatrix};
use crate::error::{Error, Result};
use crate::scalar::{unit_phase, Real, C};

const MAX_SWEEPS: usize = 80;

/// `Z = U · diag(S) · V^*` with `U: m×k`, `V: n×k`, `k = min(m, n)`.
#[derive(Debug, Clone)]
pub struct SvdFactors<T> {
    pub u: CMatrix<T>,
    pub s: Vec<T>,
    pub v: CMatrix<T>,
}

impl<T: Real> SvdFactors<T> {
    pub fn sigma_max(&self) -> T {
        self.s.first().copied().unwrap_or_else(T::zero)
    }

    pub fn sigma_min(&self) -> T {
        self.s.last().copied().unwrap_or_else(T::zero)
    }

    /// `U diag(S) V^*`.
    pub fn reconstruct(&self) -> CMatrix<T> {
        let us = CMatrix::from_fn(self.u.rows(), self.s.len(), |i, j| self.u[(i, j)] * self.s[j]);
        us.matmul(&self.v.adjoint())
    }
}

pub fn svd<T: Real>(z: &CMatrix<T>) -> Result<SvdFactors<T>> {
    if z.rows() >= z.cols() {
        jacobi_tall(z)
    } else {
        let f = jacobi_tall(&z.adjoint())?;
        Ok(SvdFactors { u: f.v, s: f.s, v: f.u })
    }
}

/// Singular values only, nonincreasing.
pub fn singular_values<T: Real>(z: &CMatrix<T>) -> Result<Vec<T>> {
    Ok(svd(z)?.s)
}

fn jacobi_tall<T: Real>(z: &CMatrix<T>) -> Result<SvdFactors<T>> {
    let (m, n) = z.shape();
    // column-major working copies
    let mut a: Vec<Vec<C<T>>> = (0..n).map(|j| z.column(j)).collect();
    let mut v: Vec<Vec<C<T>>> =
        (0..n).map(|j| (0..n).map(|i| if i == j { C::one() } else { C::zero() }).collect()).collect();
    let tol = T::epsilon() * T::of_usize(m).sqrt();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = vec_norm(&a[p]).powi(2);
                let beta = vec_norm(&a[q]).powi(2);
                let gamma = dot_c(&a[p], &a[q]);
                let g = gamma.norm();
                if g == T::zero() || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = unit_phase(gamma);
                let two = T::lit(2.0);
                let zeta = (beta - alpha) / (two * g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = cs * t;
                rotate(&mut a, p, q, phase, cs, sn);
                rotate(&mut v, p, q, phase, cs, sn);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure { routine: "svd", iterations: MAX_SWEEPS });
    }

    let mut s: Vec<T> = a.iter().map(|col| vec_norm(col)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[j].partial_cmp(&s[i]).unwrap_or(std::cmp::Ordering::Equal).then(i.cmp(&j)));
    s = order.iter().map(|&k| s[k]).collect();

    let mut ucols: Vec<Vec<C<T>>> = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for (slot, &k) in order.iter().enumerate() {
        let sk = s[slot];
        if sk > T::zero() {
            ucols.push(a[k].iter().map(|&x| x / sk).collect());
        } else {
            ucols.push(vec![C::zero(); m]);
            missing.push(slot);
        }
    }
    complete_orthonormal(&mut ucols, &missing, m);
    let vcols: Vec<Vec<C<T>>> = order.iter().map(|&k| v[k].clone()).collect();
    Ok(SvdFactors { u: CMatrix::from_columns(&ucols), s, v: CMatrix::from_columns(&vcols) })
}

// [x_p, x_q] <- [x_p, x_q e^{-iφ}] [[c, s], [-s, c]]
fn rotate<T: Real>(cols: &mut [Vec<C<T>>], p: usize, q: usize, phase: C<T>, cs: T, sn: T) {
    let conj_phase = phase.conj();
    let (left, right) = cols.split_at_mut(q);
    let xp = &mut left[p];
    let xq = &mut right[0];
    for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
        let bp = *b * conj_phase;
        let ap = *a;
        *a = ap * cs - bp * sn;
        *b = ap * sn + bp * cs;
    }
}

/// Fill the listed zero columns with unit vectors orthogonal to all others.
fn complete_orthonormal<T: Real>(cols: &mut [Vec<C<T>>], missing: &[usize], m: usize) {
    let mut basis = 0usize;
    for &slot in missing {
        loop {
            let mut cand = vec![C::<T>::zero(); m];
            cand[basis % m] = C::one();
            basis += 1;
            for _ in 0..2 {
                for (k, col) in cols.iter().enumerate() {
                    if k == slot || vec_norm(col) == T::zero() {
                        continue;
                    }
                    let proj = dot_c(col, &cand);
                    for (c, &x) in cand.iter_mut().zip(col) {
                        *c -= x * proj;
                    }
                }
            }
            let nrm = vec_norm(&cand);
            if nrm > T::lit(0.5) || basis > 4 * m {
                cols[slot] = cand.into_iter().map(|x| x / nrm).collect();
                break;
            }
        }
    }
}

/// Spectral norm `σ_max(Z)`.
pub fn spectral_norm<T: Real>(z: &CMatrix<T>) -> Result<T> {
    Ok(svd(z)?.sigma_max())
}

/// `κ2(Z) = σ_max/σ_min`; `Singular` when `σ_min` is zero.
pub fn cond2<T: Real>(z: &CMatrix<T>) -> Result<T> {
    let f = svd(z)?;
    let smin = f.sigma_min();
    if smin <= T::zero() {
        return Err(Error::Singular { sigma_min: 0.0, threshold: 0.0 });
    }
    Ok(f.sigma_max() / smin)
}
