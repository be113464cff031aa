//! Covariance matrices of 1st and 2nd order discrete-time fractional Brownian
//! motion (dfBm), their asymptotic diagonalization by the even DCT, and
//! perturbation models of their eigenstructure.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`] dense symmetric eigendecomposition, norms and basis alignment,
//! * [`fbm`] exact auto-covariances and the structural approximation `R̂`,
//! * [`dct`] the even DCT basis, Jacobi matrices and the Wiener precision matrix,
//! * [`perturbation`] component matrices and the analytic eigen-models (`Q̂`),
//! * [`experiments`] Algorithm A, the four error metrics and table/figure grids,
//! * [`checks`] a runnable invariant suite.

pub mod checks;
pub mod dct;
pub mod error;
pub mod experiments;
pub mod fbm;
pub mod linalg;
pub mod perturbation;

pub use error::{Error, Result};
pub use fbm::{CovSpec, HurstParams};
pub use linalg::{Matrix, SpectralDecomp, SymMatrix};
