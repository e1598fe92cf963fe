//! Numerical workbench for invariant-subspace perturbation bounds.

// `!(x > 0.0)` is deliberate: it rejects NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod config;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod oracles;
pub mod partition;
pub mod scalar;
pub mod subspace;
pub mod suites;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use scalar::{Real, C};

/// Double-precision complex matrix, the default carrier.
pub type Matrix = CMatrix<f64>;
/// Double-precision complex scalar.
pub type Complex64 = C<f64>;
