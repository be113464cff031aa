//! Analytic perturbation model of the dfBm covariance eigenstructure.
//!
//! For large `n` the normalised 1st-order covariance is a small perturbation
//! of the all-ones matrix `A`, whose spectrum is `{0 (M − 1 times), M}`:
//!
//! ```text
//! R̂ / (σ²·n^{2H}) = A + ε₁·H·B − ε₂·C
//! ```
//!
//! The `M − 1` minor eigenpairs come from the compression `Z₁₀(−C)Z₁₀` of the
//! lag matrix onto the kernel of `A` (`Z₁₀·B·Z₁₀ = 0`), and are independent of
//! `n`. The major eigenvector is the constant vector plus the first-order
//! correction `E₂·(ε₁HB − ε₂C)·φ_M`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fbm::{lag_matrix, sigma_h_sq, sum_matrix, HurstParams};
use crate::linalg::{sym_eig, Matrix, SymMatrix};

/// Component matrices of the all-ones matrix and the reduced resolvents
/// `E₁`, `E₂` at its two eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSet {
    /// Projector onto the kernel (eigenvalue 0).
    pub z10: Matrix,
    /// Projector onto the constant vector (eigenvalue `M`).
    pub z20: Matrix,
    /// Nilpotent components `Z₁ᵣ = A·Z₁,ᵣ₋₁` for `r = 1..=M−2`.
    pub z1r: Vec<Matrix>,
    pub e1: Matrix,
    pub e2: Matrix,
}

pub fn component_matrices(m: usize) -> Result<ComponentSet> {
    if m < 2 {
        return Err(Error::Domain(format!("component matrices need M >= 2, got {m}")));
    }
    let mf = m as f64;
    let z20 = Matrix::from_element(m, m, 1.0 / mf);
    let z10 = Matrix::identity(m, m) - &z20;
    // A·Z₁₀ = 0 exactly; forming the products would only accumulate rounding.
    let z1r = vec![Matrix::zeros(m, m); m - 2];
    Ok(ComponentSet {
        e1: -&z20 / mf,
        e2: &z10 / mf,
        z10,
        z20,
        z1r,
    })
}

/// Resolvent `(zI − A)⁻¹` of the all-ones matrix, assembled from its
/// component matrices.
pub fn resolvent(z: f64, m: usize) -> Result<Matrix> {
    let mf = m as f64;
    let tiny = 1e-12 * mf;
    if !z.is_finite() {
        return Err(Error::NonFinite(format!("resolvent argument {z}")));
    }
    if z.abs() <= tiny || (z - mf).abs() <= tiny {
        return Err(Error::Pole(z));
    }
    let c = component_matrices(m)?;
    let mut out = &c.z10 / z + &c.z20 / (z - mf);
    let mut factorial = 1.0;
    for (idx, zr) in c.z1r.iter().enumerate() {
        let r = idx + 1;
        factorial *= r as f64;
        out += zr * (factorial / z.powi(r as i32 + 1));
    }
    Ok(out)
}

/// The compression `S = Z₁₀·(−C)·Z₁₀` of the lag matrix onto the kernel of `A`.
pub fn reduced_operator(m: usize, h: f64) -> Result<SymMatrix> {
    check_first_order(h)?;
    let z10 = component_matrices(m)?.z10;
    let c = lag_matrix(m, h);
    SymMatrix::from_upper(-(&z10 * c.as_matrix() * &z10))
}

fn check_first_order(h: f64) -> Result<()> {
    if h > 0.0 && h < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("eigen-models need 0 < H < 1, got {h}")))
    }
}

/// Nonzero eigenpairs of the reduced operator.
#[derive(Debug, Clone, PartialEq)]
pub struct MinorSpectrum {
    /// `M − 1` eigenvalues, ascending.
    pub a: Vec<f64>,
    /// Matching eigenvectors as columns (`M × (M − 1)`), each orthogonal to
    /// the constant vector.
    pub phi: Matrix,
}

pub fn minor_spectrum(m: usize, h: f64) -> Result<MinorSpectrum> {
    let s = reduced_operator(m, h)?;
    let decomp = sym_eig(&s)?;
    // The kernel direction is the constant vector; drop the eigenpair closest to it.
    let kernel = (0..m)
        .max_by(|&i, &j| {
            let si = decomp.eigenvectors.column(i).sum().abs();
            let sj = decomp.eigenvectors.column(j).sum().abs();
            si.total_cmp(&sj)
        })
        .expect("m >= 2");
    let keep: Vec<usize> = (0..m).filter(|&k| k != kernel).collect();
    let a = keep.iter().map(|&k| decomp.eigenvalues[k]).collect();
    let phi = Matrix::from_fn(m, m - 1, |i, r| decomp.eigenvectors[(i, keep[r])]);
    Ok(MinorSpectrum { a, phi })
}

/// Model of the `M − 1` smallest covariance eigenvalues, `(σ²_H / 2)·a₁ᵣ`.
pub fn minor_eigenvalue_model(m: usize, hurst: &HurstParams) -> Result<Vec<f64>> {
    if hurst.order() != 1 {
        return Err(Error::UnsupportedOrder(hurst.order()));
    }
    let s2 = sigma_h_sq(hurst);
    Ok(minor_spectrum(m, hurst.h())?.a.iter().map(|a| 0.5 * s2 * a).collect())
}

/// Model of the largest covariance eigenvalue at time index `n`.
pub fn lambda_major(n: u64, m: usize, h: f64) -> Result<f64> {
    check_first_order(h)?;
    check_index(n, m)?;
    let s2 = sigma_h_sq(&HurstParams::first_order(h)?);
    let (nf, mf) = (n as f64, m as f64);
    let lag_moment: f64 = (1..m).map(|i| i as f64 * ((m - i) as f64).powf(2.0 * h)).sum();
    let leading = 2.0 * mf * nf.powf(2.0 * h) + 2.0 * h * nf.powf(2.0 * h - 1.0) * mf * (mf - 1.0);
    let trailing = -2.0 / mf * lag_moment + 2.0 * h * h * nf.powf(2.0 * h - 2.0) * mf * (mf * mf - 1.0) / 12.0;
    Ok(0.5 * s2 * (leading + trailing))
}

fn check_index(n: u64, m: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::Domain("time index n must be at least 1".into()));
    }
    if m < 2 {
        return Err(Error::Domain(format!("window length M must be at least 2, got {m}")));
    }
    Ok(())
}

/// Direction in which the first-order correction is added to the constant
/// vector when building the major eigenvector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MajorCorrection {
    /// `φ_M + ε·φ_M⁽¹⁾`, the first-order perturbation expansion.
    Forward,
    /// `φ_M − ε·φ_M⁽¹⁾`. This is what the published Table I values for
    /// `M = 2` (and roughly half of the other cells) correspond to.
    Reflected,
}

impl MajorCorrection {
    fn sign(self) -> f64 {
        match self {
            MajorCorrection::Forward => 1.0,
            MajorCorrection::Reflected => -1.0,
        }
    }
}

/// Model of the eigenvector belonging to the largest covariance eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorEigenvector {
    /// Unit-norm `φ_M ± ε·E₂A⁽¹⁾φ_M`.
    pub vector: DVector<f64>,
    /// `ε·E₂A⁽¹⁾φ_M` before normalisation.
    pub correction: DVector<f64>,
    /// Scalar multiple of `φ_M` in the closed-form expression
    /// `1 + HM(M−1)/n − Σ i(M−i)^{2H} / (M·n^{2H})`.
    pub scalar_model: f64,
    /// `‖scalar_model·φ_M − (φ_M + ε·E₂A⁽¹⁾φ_M)‖₂`: how far the closed-form
    /// scalar expression is from the first-order vector.
    pub scalar_form_gap: f64,
}

/// First-order major eigenvector model (see [`MajorCorrection::Forward`]).
pub fn phi_major(n: u64, m: usize, h: f64) -> Result<MajorEigenvector> {
    phi_major_with(n, m, h, MajorCorrection::Forward)
}

pub fn phi_major_with(n: u64, m: usize, h: f64, direction: MajorCorrection) -> Result<MajorEigenvector> {
    check_first_order(h)?;
    check_index(n, m)?;
    let (nf, mf) = (n as f64, m as f64);
    let eps1 = 1.0 / nf;
    let eps2 = 1.0 / (2.0 * nf.powf(2.0 * h));
    let phi = DVector::from_element(m, 1.0 / mf.sqrt());
    let comps = component_matrices(m)?;
    // ε·A⁽¹⁾ = ε₁·H·B − ε₂·C
    let perturbation = sum_matrix(m).scale(eps1 * h).add_scaled(-eps2, &lag_matrix(m, h));
    let correction = &comps.e2 * perturbation.as_matrix() * &phi;

    let vector = (&phi + &correction * direction.sign()).normalize();

    let lag_moment: f64 = (1..m).map(|i| i as f64 * ((m - i) as f64).powf(2.0 * h)).sum();
    let scalar_model = 1.0 + h * mf * (mf - 1.0) / nf - lag_moment / (nf.powf(2.0 * h) * mf);
    let scalar_form_gap = (&phi * scalar_model - (&phi + &correction)).norm();
    Ok(MajorEigenvector {
        vector,
        correction,
        scalar_model,
        scalar_form_gap,
    })
}

/// Model eigenbasis `Q̂`: minor eigenvectors by ascending `a₁ᵣ`, then the
/// major eigenvector.
///
/// Every column has unit norm. The basis is not re-orthonormalised: the
/// major column's correction is `O(1/n)`-oblique to the minor columns, and
/// projecting it out would return the plain constant vector.
pub fn q_hat(n: u64, m: usize, h: f64, direction: MajorCorrection) -> Result<Matrix> {
    let minor = minor_spectrum(m, h)?;
    let major = phi_major_with(n, m, h, direction)?;
    let mut q = Matrix::zeros(m, m);
    q.columns_mut(0, m - 1).copy_from(&minor.phi);
    q.set_column(m - 1, &major.vector);
    Ok(q)
}
