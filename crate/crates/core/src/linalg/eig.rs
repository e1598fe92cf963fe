//! Complex eigendecomposition: Householder Hessenberg reduction, implicitly
//! shifted single-shift QR to Schur form, and eigenvectors by triangular
//! back-substitution.

use num_traits::{One, Zero};

use super::lu::inverse;
use super::matrix::{vec_norm, CMatrix};
use super::svd::svd;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::scalar::{unit_phase, Real, C};

/// `A = X diag(λ) X^{-1}` with unit-norm columns in `X` and `V = (X^{-1})^*`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition<T> {
    pub x: CMatrix<T>,
    pub lambda: Vec<C<T>>,
    pub v: CMatrix<T>,
    pub kappa_x: T,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    /// `X diag(λ) X^{-1}` assembled from the factors.
    pub fn reassemble(&self) -> CMatrix<T> {
        let xl = CMatrix::from_fn(self.n(), self.n(), |i, j| self.x[(i, j)] * self.lambda[j]);
        xl.matmul(&self.v.adjoint())
    }
}

/// Schur form `A = Z T Z^*` with `T` upper triangular.
#[derive(Debug, Clone)]
pub struct Schur<T> {
    pub t: CMatrix<T>,
    pub z: CMatrix<T>,
}

fn hessenberg<T: Real>(a: &CMatrix<T>) -> (CMatrix<T>, CMatrix<T>) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let tail = vec_norm(&x[1..]);
        if tail == T::zero() {
            continue;
        }
        let alpha = -unit_phase(x[0]) * vec_norm(&x);
        let mut v = x;
        v[0] -= alpha;
        let tau = T::lit(2.0) / vec_norm(&v).powi(2);
        // H <- P H P with P = I - tau v v^* acting on rows/cols k+1..n
        for j in 0..n {
            let mut s = C::<T>::zero();
            for (i, vi) in v.iter().enumerate() {
                s += vi.conj() * h[(k + 1 + i, j)];
            }
            s *= tau;
            for (i, vi) in v.iter().enumerate() {
                let cur = h[(k + 1 + i, j)];
                h[(k + 1 + i, j)] = cur - *vi * s;
            }
        }
        for row in 0..n {
            let mut s = C::<T>::zero();
            for (i, vi) in v.iter().enumerate() {
                s += h[(row, k + 1 + i)] * *vi;
            }
            s *= tau;
            for (i, vi) in v.iter().enumerate() {
                let cur = h[(row, k + 1 + i)];
                h[(row, k + 1 + i)] = cur - s * vi.conj();
            }
            let mut s = C::<T>::zero();
            for (i, vi) in v.iter().enumerate() {
                s += q[(row, k + 1 + i)] * *vi;
            }
            s *= tau;
            for (i, vi) in v.iter().enumerate() {
                let cur = q[(row, k + 1 + i)];
                q[(row, k + 1 + i)] = cur - s * vi.conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C::zero();
        }
    }
    (h, q)
}

/// Givens pair `(c, s)` with `[c s; -s̄ c] [x; y] = [r; 0]`.
fn givens<T: Real>(x: C<T>, y: C<T>) -> (T, C<T>) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == T::zero() {
        return (T::one(), C::zero());
    }
    if ax == T::zero() {
        return (T::zero(), C::one());
    }
    let nrm = ax.hypot(ay);
    let c = ax / nrm;
    let s = (x / ax) * y.conj() / nrm;
    (c, s)
}

fn rotate_rows<T: Real>(h: &mut CMatrix<T>, k: usize, c: T, s: C<T>, cols: std::ops::Range<usize>) {
    for j in cols {
        let a = h[(k, j)];
        let b = h[(k + 1, j)];
        h[(k, j)] = a * c + s * b;
        h[(k + 1, j)] = -s.conj() * a + b * c;
    }
}

fn rotate_cols<T: Real>(h: &mut CMatrix<T>, k: usize, c: T, s: C<T>, rows: std::ops::Range<usize>) {
    for i in rows {
        let a = h[(i, k)];
        let b = h[(i, k + 1)];
        h[(i, k)] = a * c + b * s.conj();
        h[(i, k + 1)] = -a * s + b * c;
    }
}

/// Eigenvalue of the trailing 2×2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift<T: Real>(a: C<T>, b: C<T>, c: C<T>, d: C<T>) -> C<T> {
    let half = T::lit(0.5);
    let tr_half = (a - d) * half;
    let disc = (tr_half * tr_half + b * c).sqrt();
    let mu1 = d + tr_half - disc;
    let mu2 = d + tr_half + disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}

/// Complex Schur decomposition.
pub fn schur<T: Real>(a: &CMatrix<T>) -> Result<Schur<T>> {
    assert!(a.is_square(), "schur requires a square matrix");
    let n = a.rows();
    let (mut h, mut z) = hessenberg(a);
    if n == 1 {
        return Ok(Schur { t: h, z });
    }
    let eps = T::epsilon();
    let max_iter = 30 * n.max(10);
    let mut total = 0usize;
    let mut hi = n - 1;
    let mut iter = 0usize;
    while hi > 0 {
        // find start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let scale = if diag == T::zero() { T::one() } else { diag };
            if sub <= eps * scale {
                h[(lo, lo - 1)] = C::zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_iter * n {
            return Err(Error::ConvergenceFailure { routine: "schur", iterations: total });
        }
        let mu = if iter % 11 == 10 {
            // exceptional shift
            h[(hi, hi)] + C::new(h[(hi, hi - 1)].norm() * T::lit(0.75), T::zero())
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        // implicit single-shift sweep over [lo, hi]
        let (mut c, mut s) = givens(h[(lo, lo)] - mu, h[(lo + 1, lo)]);
        for k in lo..hi {
            if k > lo {
                let g = givens(h[(k, k - 1)], h[(k + 1, k - 1)]);
                c = g.0;
                s = g.1;
            }
            let col0 = if k > lo { k - 1 } else { k };
            rotate_rows(&mut h, k, c, s, col0..n);
            let row_end = (k + 3).min(hi + 1);
            rotate_cols(&mut h, k, c, s, 0..row_end);
            rotate_cols(&mut z, k, c, s, 0..n);
            if k > lo {
                h[(k + 1, k - 1)] = C::zero();
            }
        }
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = C::zero();
        }
    }
    Ok(Schur { t: h, z })
}

/// Right eigenvectors of upper-triangular `t`, unnormalized, as columns.
fn triangular_eigenvectors<T: Real>(t: &CMatrix<T>) -> CMatrix<T> {
    let n = t.rows();
    let tnorm = t.max_abs();
    let smin = (T::epsilon() * tnorm).max(T::min_positive_value());
    let mut y = CMatrix::zeros(n, n);
    for k in 0..n {
        let lam = t[(k, k)];
        y[(k, k)] = C::one();
        for j in (0..k).rev() {
            let mut s = C::<T>::zero();
            for m in j + 1..=k {
                s += t[(j, m)] * y[(m, k)];
            }
            let mut d = t[(j, j)] - lam;
            if d.norm() < smin {
                d = C::new(smin, T::zero());
            }
            y[(j, k)] = -s / d;
        }
    }
    y
}

/// Descending magnitude; magnitudes equal to within a few ulps count as ties,
/// broken by descending real part then descending imaginary part.
fn eigen_order<T: Real>(lambda: &[C<T>]) -> Vec<usize> {
    let n = lambda.len();
    let mut idx: Vec<usize> = (0..n).collect();
    let mag: Vec<T> = lambda.iter().map(|z| z.norm()).collect();
    idx.sort_by(|&a, &b| mag[b].partial_cmp(&mag[a]).unwrap().then(a.cmp(&b)));
    let scale = mag.iter().fold(T::zero(), |m, &x| m.max(x));
    let tie = T::lit(64.0) * T::epsilon() * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && mag[idx[end - 1]] - mag[idx[end]] <= tie {
            end += 1;
        }
        idx[start..end].sort_by(|&a, &b| {
            let (za, zb) = (lambda[a], lambda[b]);
            zb.re.partial_cmp(&za.re).unwrap().then(zb.im.partial_cmp(&za.im).unwrap()).then(a.cmp(&b))
        });
        start = end;
    }
    idx
}

/// Full eigendecomposition of a square matrix.
pub fn eig<T: Real>(a: &CMatrix<T>, tol: &Tolerances) -> Result<EigenDecomposition<T>> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch(format!("eig needs a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    let n = a.rows();
    let Schur { t, z } = schur(a)?;
    let y = triangular_eigenvectors(&t);
    let xraw = z.matmul(&y);
    let lambda_raw = t.diag();
    let order = eigen_order(&lambda_raw);
    let lambda: Vec<C<T>> = order.iter().map(|&k| lambda_raw[k]).collect();
    let mut x = CMatrix::zeros(n, n);
    for (slot, &k) in order.iter().enumerate() {
        let mut col = xraw.column(k);
        let nrm = vec_norm(&col);
        // phase convention: largest-magnitude entry made real positive
        let mut imax = 0;
        for i in 1..n {
            if col[i].norm() > col[imax].norm() {
                imax = i;
            }
        }
        let ph = unit_phase(col[imax]).conj();
        for v in col.iter_mut() {
            *v = *v * ph / nrm;
        }
        col[imax] = C::new(col[imax].norm(), T::zero());
        x.set_column(slot, &col);
    }
    let f = svd(&x)?;
    let smin = f.sigma_min();
    let kappa = if smin > T::zero() { f.sigma_max() / smin } else { T::infinity() };
    if !(kappa.as_f64() <= tol.kappa_cap) {
        return Err(Error::NotDiagonalizable { kappa: kappa.as_f64(), cap: tol.kappa_cap });
    }
    let xinv = inverse(&x, tol).map_err(|_| Error::NotDiagonalizable { kappa: kappa.as_f64(), cap: tol.kappa_cap })?;
    Ok(EigenDecomposition { x, lambda, v: xinv.adjoint(), kappa_x: kappa })
}

/// Eigenvalues only, in the same order `eig` would report them.
pub fn eigenvalues<T: Real>(a: &CMatrix<T>) -> Result<Vec<C<T>>> {
    let d = schur(a)?.t.diag();
    let order = eigen_order(&d);
    Ok(order.into_iter().map(|k| d[k]).collect())
}

/// `ρ(A) = max |λ|`.
pub fn spectral_radius<T: Real>(a: &CMatrix<T>) -> Result<T> {
    Ok(eigenvalues(a)?.iter().fold(T::zero(), |m, z| m.max(z.norm())))
}
