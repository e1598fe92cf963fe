//! Dense complex linear algebra: the carrier type and its factorizations.

pub mod eig;
pub mod io;
pub mod lu;
pub mod matrix;
pub mod qr;
pub mod svd;

pub use eig::{eig, eigenvalues, schur, spectral_radius, EigenDecomposition, Schur};
pub use lu::{inverse, solve};
pub use matrix::{kron, CMatrix};
pub use qr::{complement_basis, qr_decompose, QrFactors};
pub use svd::{cond2, singular_values, spectral_norm, svd, SvdFactors};

use crate::error::Result;
use crate::scalar::Real;

/// Spectral and Frobenius norms together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms<T> {
    pub spectral: T,
    pub frobenius: T,
}

pub fn norms<T: Real>(z: &CMatrix<T>) -> Result<Norms<T>> {
    Ok(Norms { spectral: spectral_norm(z)?, frobenius: z.norm_fro() })
}
