//! Small dense linear algebra and scalar normal-distribution helpers.
//!
//! Everything here is sized for covariance matrices of a few to a few dozen
//! features. Matrices are row-major and always finite.

mod cholesky;
mod eigen;
mod matrix;
mod normal;

pub use cholesky::{cholesky, spd_solve, Cholesky, CONDITION_LIMIT};
pub use eigen::{symmetric_eigen, SymmetricEigen};
pub use matrix::{Matrix, Vector};
pub use normal::{std_normal_cdf, std_normal_pdf, std_normal_quantile, std_normal_sf};
