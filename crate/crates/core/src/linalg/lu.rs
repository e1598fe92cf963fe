//! Linear solves and inverses via LU with partial pivoting.

use num_traits::Zero;

use super::matrix::CMatrix;
use super::svd::svd;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::scalar::Real;

struct Lu<T> {
    lu: CMatrix<T>,
    perm: Vec<usize>,
}

fn factor<T: Real>(z: &CMatrix<T>) -> Lu<T> {
    let n = z.rows();
    let mut lu = z.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let p =
            (k..n).max_by(|&a, &b| lu[(a, k)].norm().partial_cmp(&lu[(b, k)].norm()).unwrap().then(b.cmp(&a))).unwrap();
        if p != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = t;
            }
            perm.swap(k, p);
        }
        let piv = lu[(k, k)];
        if piv.is_zero() {
            continue;
        }
        for i in k + 1..n {
            let l = lu[(i, k)] / piv;
            lu[(i, k)] = l;
            if l.is_zero() {
                continue;
            }
            for j in k + 1..n {
                let u = lu[(k, j)];
                lu[(i, j)] -= l * u;
            }
        }
    }
    Lu { lu, perm }
}

impl<T: Real> Lu<T> {
    fn solve_in_place(&self, b: &mut CMatrix<T>) {
        let n = self.lu.rows();
        let m = b.cols();
        let mut x = CMatrix::zeros(n, m);
        for i in 0..n {
            for j in 0..m {
                x[(i, j)] = b[(self.perm[i], j)];
            }
        }
        for j in 0..m {
            for i in 0..n {
                let mut s = x[(i, j)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, j)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s / self.lu[(i, i)];
            }
        }
        *b = x;
    }
}

fn check_nonsingular<T: Real>(z: &CMatrix<T>, tol: &Tolerances) -> Result<()> {
    if !z.is_square() {
        return Err(Error::ShapeMismatch(format!("expected square matrix, got {}x{}", z.rows(), z.cols())));
    }
    let f = svd(z)?;
    let threshold = T::lit(tol.rank_tol) * f.sigma_max();
    if f.sigma_min() <= threshold {
        return Err(Error::Singular { sigma_min: f.sigma_min().as_f64(), threshold: threshold.as_f64() });
    }
    Ok(())
}

/// Solve `Z X = B` for square nonsingular `Z`.
pub fn solve<T: Real>(z: &CMatrix<T>, b: &CMatrix<T>, tol: &Tolerances) -> Result<CMatrix<T>> {
    check_nonsingular(z, tol)?;
    if b.rows() != z.rows() {
        return Err(Error::ShapeMismatch(format!("rhs has {} rows, expected {}", b.rows(), z.rows())));
    }
    Ok(solve_unchecked(z, b))
}

/// Solve without the conditioning pre-check (for resolvent evaluation on contours).
pub fn solve_unchecked<T: Real>(z: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let f = factor(z);
    let mut x = b.clone();
    f.solve_in_place(&mut x);
    x
}

pub fn inverse<T: Real>(z: &CMatrix<T>, tol: &Tolerances) -> Result<CMatrix<T>> {
    solve(z, &CMatrix::identity(z.rows()), tol)
}

/// `B R^{-1}` for upper-triangular nonsingular `R` by column substitution.
pub fn right_divide_upper<T: Real>(b: &CMatrix<T>, r: &CMatrix<T>) -> CMatrix<T> {
    let n = r.rows();
    assert_eq!(b.cols(), n);
    let mut x = CMatrix::zeros(b.rows(), n);
    for i in 0..b.rows() {
        for j in 0..n {
            let mut s = b[(i, j)];
            for k in 0..j {
                s -= x[(i, k)] * r[(k, j)];
            }
            x[(i, j)] = s / r[(j, j)];
        }
    }
    x
}

/// `(R^{-1})^* B` for upper-triangular nonsingular `R` (forward substitution with `R^*`).
pub fn left_divide_upper_adjoint<T: Real>(r: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let n = r.rows();
    assert_eq!(b.rows(), n);
    let mut x = CMatrix::zeros(n, b.cols());
    for j in 0..b.cols() {
        for i in 0..n {
            let mut s = b[(i, j)];
            for k in 0..i {
                s -= r[(k, i)].conj() * x[(k, j)];
            }
            x[(i, j)] = s / r[(i, i)].conj();
        }
    }
    x
}
