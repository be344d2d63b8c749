//! Temporary build scaffold; full module set lands incrementally.
mod error;
pub mod matrix;
mod par;
pub mod svd;

pub use error::{Error, Result};
pub use matrix::{sum_sq_dist, DenseMatrix, SparseMatrix};
pub use svd::{random_orthonormal, thin_svd, SvdFactors};
