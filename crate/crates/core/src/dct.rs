//! Even DCT basis, tri-diagonal Jacobi matrices and the Wiener precision matrix.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::linalg::{Matrix, SymMatrix};

/// Orthonormal even DCT (DCT-II) basis as columns.
///
/// Column 0 is the constant vector `1/√M`; column `k ≥ 1` has entries
/// `√(2/M)·cos(π(2i + 1)k / 2M)` for rows `i = 0..M`.
pub fn dct_matrix(m: usize) -> Matrix {
    assert!(m >= 1, "DCT size must be at least 1");
    let mf = m as f64;
    let c0 = (1.0 / mf).sqrt();
    let ck = (2.0 / mf).sqrt();
    Matrix::from_fn(m, m, |i, k| {
        if k == 0 {
            c0
        } else {
            ck * (PI * (2 * i + 1) as f64 * k as f64 / (2.0 * mf)).cos()
        }
    })
}

/// DCT columns reordered to pair with ascending covariance eigenvalues.
///
/// DCT frequency `k` pairs with eigenvalue rank `M − 1 − k`, so the constant
/// column comes last (largest eigenvalue) and the highest frequency first.
pub fn dct_matrix_by_eigenvalue(m: usize) -> Matrix {
    let q = dct_matrix(m);
    Matrix::from_fn(m, m, |i, k| q[(i, m - 1 - k)])
}

/// Parameters of the Jacobi matrix `J_D(k1, k2, k3, k4)` with coupling `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiParams {
    pub alpha: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
}

impl JacobiParams {
    pub fn new(alpha: f64, k1: f64, k2: f64, k3: f64, k4: f64) -> Self {
        JacobiParams { alpha, k1, k2, k3, k4 }
    }

    /// `J_D(1, 1, 0, 0)` with `alpha = 0.5`, whose eigenvectors are the even DCT.
    pub fn even_dct() -> Self {
        Self::new(0.5, 1.0, 1.0, 0.0, 0.0)
    }
}

/// Tri-diagonal Jacobi matrix with optional corner entries.
///
/// Diagonal `(1 − k1·α, 1, …, 1, 1 − k2·α)`, off-diagonals `−α`, and corners
/// `(0, M−1) = k3·α`, `(M−1, 0) = k4·α`. For `M = 2` the corners coincide
/// with the off-diagonal and are added to it.
pub fn jacobi_matrix(m: usize, p: &JacobiParams) -> Matrix {
    assert!(m >= 2, "Jacobi matrix needs M >= 2");
    let mut j = Matrix::identity(m, m);
    j[(0, 0)] = 1.0 - p.k1 * p.alpha;
    j[(m - 1, m - 1)] = 1.0 - p.k2 * p.alpha;
    for i in 0..m - 1 {
        j[(i, i + 1)] = -p.alpha;
        j[(i + 1, i)] = -p.alpha;
    }
    j[(0, m - 1)] += p.k3 * p.alpha;
    j[(m - 1, 0)] += p.k4 * p.alpha;
    j
}

/// Inverse of the `H = 1/2` (Wiener) covariance matrix at time index `n`:
/// `2·J_D(1 − 1/n, 1, 0, 0)` with `alpha = 0.5`.
pub fn precision_half(n: u64, m: usize) -> SymMatrix {
    assert!(n >= 1, "time index must be at least 1");
    let p = JacobiParams::new(0.5, 1.0 - 1.0 / n as f64, 1.0, 0.0, 0.0);
    let j = jacobi_matrix(m, &p) * 2.0;
    SymMatrix::from_upper(j).expect("square by construction")
}
