//! Principal angles and sinΘ/tanΘ distances between subspaces given by
//! orthonormal bases.

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::qr::complement_basis;
use crate::linalg::svd::{singular_values, spectral_norm};
use crate::linalg::CMatrix;
use crate::scalar::Real;

/// Principal-angle summary of two `r`-dimensional subspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceDistance<T> {
    /// Cosines `ζ_1 ≥ … ≥ ζ_r`, clamped into `[0, 1]`.
    pub cosines: Vec<T>,
    /// Sines paired with `cosines` (so nondecreasing).
    pub sines: Vec<T>,
    pub sin_norm: T,
    /// `max sin/cos`; infinite when some cosine is zero.
    pub tan_norm: T,
}

fn check_orthonormal<T: Real>(q: &CMatrix<T>, tol: &Tolerances) -> Result<()> {
    let res = q.adjoint().matmul(q).dist_to_identity();
    let lim = T::lit(tol.tol_orth * q.cols().max(1) as f64);
    if !(res <= lim) || q.cols() > q.rows() {
        return Err(Error::NotOrthonormal { residual: res.as_f64(), tol: lim.as_f64() });
    }
    Ok(())
}

fn check_pair<T: Real>(q1: &CMatrix<T>, q2: &CMatrix<T>, tol: &Tolerances) -> Result<()> {
    if q1.shape() != q2.shape() {
        return Err(Error::ShapeMismatch(format!(
            "bases are {}x{} and {}x{}",
            q1.rows(),
            q1.cols(),
            q2.rows(),
            q2.cols()
        )));
    }
    check_orthonormal(q1, tol)?;
    check_orthonormal(q2, tol)
}

/// Orthonormal basis of the orthogonal complement of `span(Q)`.
pub fn orth_complement<T: Real>(q: &CMatrix<T>, tol: &Tolerances) -> Result<CMatrix<T>> {
    check_orthonormal(q, tol)?;
    if q.cols() >= q.rows() {
        return Err(Error::ShapeMismatch(format!("no complement for {}x{} basis", q.rows(), q.cols())));
    }
    Ok(complement_basis(q))
}

/// `‖Q1⊥^* Q2‖`, zero when `Q1` spans everything.
fn complement_norm<T: Real>(q1: &CMatrix<T>, q2: &CMatrix<T>) -> Result<(T, Vec<T>)> {
    if q1.cols() >= q1.rows() {
        return Ok((T::zero(), Vec::new()));
    }
    let s = singular_values(&complement_basis(q1).adjoint().matmul(q2))?;
    Ok((s.first().copied().unwrap_or_else(T::zero), s))
}

pub fn principal_angles<T: Real>(q1: &CMatrix<T>, q2: &CMatrix<T>, tol: &Tolerances) -> Result<SubspaceDistance<T>> {
    check_pair(q1, q2, tol)?;
    let r = q1.cols();
    let cosines: Vec<T> =
        singular_values(&q1.adjoint().matmul(q2))?.into_iter().map(|z| z.max(T::zero()).min(T::one())).collect();
    // small angles lose digits through sqrt(1 − ζ²); take sines from the complement
    let (_, s) = complement_norm(q1, q2)?;
    let mut sines = vec![T::zero(); r];
    for (k, &v) in s.iter().take(r).enumerate() {
        sines[r - 1 - k] = v.min(T::one());
    }
    let sin_norm = sines.iter().fold(T::zero(), |m, &x| m.max(x));
    let tan_norm = sines.iter().zip(&cosines).fold(T::zero(), |m, (&s, &c)| {
        let t = if c.is_zero() {
            if s.is_zero() {
                T::zero()
            } else {
                T::infinity()
            }
        } else {
            s / c
        };
        m.max(t)
    });
    Ok(SubspaceDistance { cosines, sines, sin_norm, tan_norm })
}

/// `‖sinΘ(Q1, Q2)‖`, cross-checked against `‖Q2⊥^* Q1‖` and `sqrt(1 − σ_min(Q1^*Q2)²)`.
pub fn sin_theta_norm<T: Real>(q1: &CMatrix<T>, q2: &CMatrix<T>, tol: &Tolerances) -> Result<T> {
    let d = principal_angles(q1, q2, tol)?;
    let (other, _) = complement_norm(q2, q1)?;
    let lim = T::lit(tol.cross_tol);
    if !((d.sin_norm - other).abs() <= lim) {
        return Err(Error::CrossCheckFailure { first: d.sin_norm.as_f64(), second: other.as_f64() });
    }
    let zmin = d.cosines.last().copied().unwrap_or_else(T::one);
    let via_cos = T::one() - zmin * zmin;
    if !((via_cos - d.sin_norm * d.sin_norm).abs() <= lim) {
        return Err(Error::CrossCheckFailure {
            first: d.sin_norm.as_f64(),
            second: via_cos.max(T::zero()).sqrt().as_f64(),
        });
    }
    Ok(d.sin_norm)
}

pub fn tan_theta_norm<T: Real>(q1: &CMatrix<T>, q2: &CMatrix<T>, tol: &Tolerances) -> Result<T> {
    Ok(principal_angles(q1, q2, tol)?.tan_norm)
}

/// `‖(I − Q1 Q1^*) Q2‖` by a route independent of the complement basis.
pub fn projector_sin_theta<T: Real>(q1: &CMatrix<T>, q2: &CMatrix<T>) -> Result<T> {
    let proj = q1.matmul(&q1.adjoint().matmul(q2));
    spectral_norm(&(q2 - &proj))
}

#[cfg(test)]
mod tests {
    use num_traits::Zero;

    use super::*;
    use crate::scalar::{c, C};

    fn basis(n: usize, idx: &[usize]) -> CMatrix<f64> {
        CMatrix::from_fn(n, idx.len(), |i, j| if i == idx[j] { c(1.0, 0.0) } else { C::zero() })
    }

    #[test]
    fn identical_subspaces() {
        let t = Tolerances::default();
        let q = basis(3, &[0, 1]);
        let d = principal_angles(&q, &q, &t).unwrap();
        assert_eq!(d.cosines, vec![1.0, 1.0]);
        assert_eq!(d.sin_norm, 0.0);
        assert_eq!(tan_theta_norm(&q, &q, &t).unwrap(), 0.0);
    }

    #[test]
    fn one_orthogonal_direction() {
        let t = Tolerances::default();
        let d = principal_angles(&basis(3, &[0, 1]), &basis(3, &[0, 2]), &t).unwrap();
        assert_eq!(d.cosines, vec![1.0, 0.0]);
        assert_eq!(d.sin_norm, 1.0);
        assert_eq!(d.tan_norm, f64::INFINITY);
    }

    #[test]
    fn rotation_gives_sin_and_tan() {
        let t = Tolerances::default();
        for th in [1e-9, 1e-4, 0.3, 1.2] {
            let q1 = basis(2, &[0]);
            let q2 = CMatrix::from_real_rows(&[&[f64::cos(th)], &[f64::sin(th)]]);
            let s = sin_theta_norm(&q1, &q2, &t).unwrap();
            assert!((s - th.sin()).abs() <= 1e-15 * th.sin().max(1e-300) + 1e-16, "{th}: {s}");
            let tn = tan_theta_norm(&q1, &q2, &t).unwrap();
            assert!((tn / th.tan() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn complement_of_coordinate_basis() {
        let t = Tolerances::default();
        let qp = orth_complement(&basis(2, &[0]), &t).unwrap();
        assert!(qp[(0, 0)].norm() < 1e-15);
        assert!((qp[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!(orth_complement(&CMatrix::from_real_rows(&[&[2.0], &[0.0]]), &t).is_err());
    }

    #[test]
    fn shape_mismatch() {
        let t = Tolerances::default();
        assert!(matches!(principal_angles(&basis(3, &[0]), &basis(3, &[0, 1]), &t), Err(Error::ShapeMismatch(_))));
    }
}
