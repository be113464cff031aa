//! Dense symmetric linear algebra.
//!
//! Every matrix in this crate is small (window lengths of a few to a few
//! dozen samples), so everything here is dense and favours exact
//! reproducibility over speed: the eigensolver is a cyclic Jacobi method with
//! a fixed sweep order and a fixed sign convention on the output vectors.

use std::ops::Deref;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Dense real matrix used throughout the crate.
pub type Matrix = DMatrix<f64>;

/// Maximum number of cyclic Jacobi sweeps before giving up.
const MAX_SWEEPS: usize = 100;

/// Problems up to this size are aligned by exact search over all matchings.
const EXACT_ALIGN_MAX_DIM: usize = 16;

/// A dense square matrix that is symmetric by construction.
///
/// Constructors only ever read the upper triangle and mirror it, so
/// `m[(i, j)] == m[(j, i)]` holds bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    /// Builds a `dim × dim` matrix from `f(i, j)` evaluated on `i <= j`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(dim >= 1, "SymMatrix needs dim >= 1");
        let mut m = Matrix::zeros(dim, dim);
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymMatrix(m)
    }

    /// Wraps a square matrix, mirroring its upper triangle onto the lower one.
    pub fn from_upper(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::Domain("empty matrix".into()));
        }
        Ok(Self::from_fn(m.nrows(), |i, j| m[(i, j)]))
    }

    /// Like [`SymMatrix::from_upper`], but rejects inputs whose two triangles
    /// differ by more than `tol` relative to the largest entry.
    pub fn from_matrix(m: Matrix, tol: f64) -> Result<Self> {
        let scale = m.amax().max(1.0);
        let asym = (&m - m.transpose()).amax();
        if asym > tol * scale {
            return Err(Error::Domain(format!(
                "matrix is not symmetric (max asymmetry {asym:e})"
            )));
        }
        Self::from_upper(m)
    }

    pub fn identity(dim: usize) -> Self {
        SymMatrix(Matrix::identity(dim, dim))
    }

    /// The all-ones matrix.
    pub fn ones(dim: usize) -> Self {
        SymMatrix(Matrix::from_element(dim, dim, 1.0))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    /// Congruence `Qᵀ·self·Q`, re-symmetrized.
    pub fn congruence(&self, q: &Matrix) -> SymMatrix {
        let m = q.transpose() * &self.0 * q;
        Self::from_fn(m.nrows(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
    }

    pub fn scale(&self, s: f64) -> SymMatrix {
        SymMatrix(&self.0 * s)
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, s: f64, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.dim(), other.dim());
        SymMatrix(&self.0 + &other.0 * s)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }
}

impl Deref for SymMatrix {
    type Target = Matrix;

    fn deref(&self) -> &Matrix {
        &self.0
    }
}

impl AsRef<Matrix> for SymMatrix {
    fn as_ref(&self) -> &Matrix {
        &self.0
    }
}

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors
/// (column `k` belongs to `eigenvalues[k]`).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomp {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl SpectralDecomp {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Q·Λ·Qᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let q = &self.eigenvectors;
        let scaled = Matrix::from_fn(q.nrows(), q.ncols(), |i, k| q[(i, k)] * self.eigenvalues[k]);
        scaled * q.transpose()
    }

    pub fn largest(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Output eigenvalues are ascending; each eigenvector is normalised so that
/// its largest-magnitude entry (first one on near-ties) is positive.
pub fn sym_eig(a: &SymMatrix) -> Result<SpectralDecomp> {
    if !a.is_finite() {
        return Err(Error::NonFinite("sym_eig input".into()));
    }
    let n = a.dim();
    let mut m = a.as_matrix().clone();
    let mut v = Matrix::identity(n, n);
    let total = frobenius_norm(&m);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&m);
        if off == 0.0 || off <= f64::EPSILON * total {
            break;
        }
        if sweeps == MAX_SWEEPS {
            if off <= 1e-12 * total {
                break;
            }
            return Err(Error::NoConvergence { sweeps, residual: off });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (m[(p, p)], m[(q, q)]);
                // After a few sweeps, drop elements below the diagonal's resolution.
                let g = 100.0 * apq.abs();
                if sweeps > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    m[(p, q)] = 0.0;
                    m[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut m, &mut v, p, q, c, s, t);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let eigenvalues = order.iter().map(|&k| m[(k, k)]).collect();
    let mut eigenvectors = Matrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    for k in 0..n {
        fix_sign(&mut eigenvectors, k);
    }
    Ok(SpectralDecomp {
        eigenvalues,
        eigenvectors,
    })
}

/// Applies the Jacobi rotation zeroing `m[(p, q)]` to `m` and accumulates it into `v`.
fn rotate(m: &mut Matrix, v: &mut Matrix, p: usize, q: usize, c: f64, s: f64, t: f64) {
    let n = m.nrows();
    let apq = m[(p, q)];
    m[(p, p)] -= t * apq;
    m[(q, q)] += t * apq;
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;
    for k in 0..n {
        if k != p && k != q {
            let akp = m[(k, p)];
            let akq = m[(k, q)];
            let new_kp = c * akp - s * akq;
            let new_kq = s * akp + c * akq;
            m[(k, p)] = new_kp;
            m[(p, k)] = new_kp;
            m[(k, q)] = new_kq;
            m[(q, k)] = new_kq;
        }
    }
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

fn fix_sign(q: &mut Matrix, col: usize) {
    let max = q.column(col).amax();
    let lead = (0..q.nrows())
        .find(|&i| q[(i, col)].abs() >= max * (1.0 - 1e-12))
        .unwrap_or(0);
    if q[(lead, col)] < 0.0 {
        q.column_mut(col).neg_mut();
    }
}

/// Square root of the sum of squared entries.
pub fn frobenius_norm(a: &Matrix) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Frobenius norm of the strictly off-diagonal part.
pub fn off_diagonal_norm(a: &Matrix) -> f64 {
    let mut acc = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if i != j {
                acc += a[(i, j)] * a[(i, j)];
            }
        }
    }
    acc.sqrt()
}

/// `‖QᵀQ − I‖_F`.
pub fn orthonormality_defect(q: &Matrix) -> f64 {
    let gram = q.transpose() * q;
    frobenius_norm(&(gram - Matrix::identity(q.ncols(), q.ncols())))
}

/// Permutes and sign-flips the columns of `candidate` to best match `reference`.
///
/// The objective is `trace(referenceᵀ · aligned)`, maximised over all signed
/// column permutations. Both inputs must be square, of equal size and
/// orthonormal to within `1e-8`.
pub fn align_columns(reference: &Matrix, candidate: &Matrix) -> Result<Matrix> {
    for m in [reference, candidate] {
        if !m.is_square() {
            return Err(Error::Dimension {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("align_columns input".into()));
        }
        let defect = orthonormality_defect(m);
        if defect > 1e-8 {
            return Err(Error::Domain(format!(
                "columns are not orthonormal (defect {defect:e})"
            )));
        }
    }
    if reference.nrows() != candidate.nrows() {
        return Err(Error::Dimension {
            expected: reference.nrows(),
            got: candidate.nrows(),
        });
    }
    Ok(signed_permutation_align(reference, candidate))
}

/// The search behind [`align_columns`], without the orthonormality check.
///
/// Useful for model bases whose columns are unit vectors but only
/// approximately orthogonal. Exact for up to 16 columns (dynamic programming
/// over column subsets); greedy beyond that.
pub fn signed_permutation_align(reference: &Matrix, candidate: &Matrix) -> Matrix {
    assert_eq!(reference.shape(), candidate.shape());
    let n = reference.ncols();
    let gram = reference.transpose() * candidate;
    let weight = |i: usize, j: usize| gram[(i, j)].abs();

    let assignment = if n <= EXACT_ALIGN_MAX_DIM {
        best_matching(n, weight)
    } else {
        greedy_matching(n, weight)
    };

    let mut aligned = Matrix::zeros(candidate.nrows(), n);
    for (i, &j) in assignment.iter().enumerate() {
        let sign = if gram[(i, j)] < 0.0 { -1.0 } else { 1.0 };
        aligned.set_column(i, &(candidate.column(j) * sign));
    }
    aligned
}

/// Maximum-weight perfect matching, reference column `i` -> candidate column.
fn best_matching(n: usize, weight: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    let full = 1usize << n;
    let mut best = vec![f64::NEG_INFINITY; full];
    let mut choice = vec![usize::MAX; full];
    best[0] = 0.0;
    for mask in 0..full {
        if best[mask] == f64::NEG_INFINITY {
            continue;
        }
        let i = mask.count_ones() as usize;
        if i == n {
            continue;
        }
        for j in 0..n {
            if mask & (1 << j) == 0 {
                let next = mask | (1 << j);
                let value = best[mask] + weight(i, j);
                if value > best[next] {
                    best[next] = value;
                    choice[next] = j;
                }
            }
        }
    }
    let mut assignment = vec![0; n];
    let mut mask = full - 1;
    for i in (0..n).rev() {
        let j = choice[mask];
        assignment[i] = j;
        mask &= !(1 << j);
    }
    assignment
}

fn greedy_matching(n: usize, weight: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    pairs.sort_by(|a, b| weight(b.0, b.1).total_cmp(&weight(a.0, a.1)));
    let mut assignment = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for (i, j) in pairs {
        if assignment[i] == usize::MAX && !used[j] {
            assignment[i] = j;
            used[j] = true;
        }
    }
    assignment
}

/// Number of eigenvalues whose magnitude exceeds `tol · max(1, |λ|max)`.
pub fn numeric_rank(a: &SymMatrix, tol: f64) -> Result<usize> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("rank tolerance must be positive, got {tol}")));
    }
    let decomp = sym_eig(a)?;
    let largest = decomp.eigenvalues.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let cutoff = tol * largest.max(1.0);
    Ok(decomp.eigenvalues.iter().filter(|v| v.abs() > cutoff).count())
}
