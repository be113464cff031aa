//! Auto-covariance of m-th order discrete-time fractional Brownian motion and
//! the structural large-`n` approximation of its covariance matrix.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, SymMatrix};

/// Hurst exponent together with the process order `m`, with `m − 1 < H < m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HurstParams {
    h: f64,
    order: u32,
}

impl HurstParams {
    pub fn new(h: f64, order: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::Domain("process order must be at least 1".into()));
        }
        if !h.is_finite() {
            return Err(Error::NonFinite(format!("Hurst exponent {h}")));
        }
        let lo = f64::from(order - 1);
        if !(h > lo && h < lo + 1.0) {
            return Err(Error::Domain(format!(
                "order-{order} process needs {lo} < H < {}, got H = {h}",
                lo + 1.0
            )));
        }
        Ok(HurstParams { h, order })
    }

    /// Order-1 parameters (`0 < H < 1`).
    pub fn first_order(h: f64) -> Result<Self> {
        Self::new(h, 1)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// `H − (m − 1)`, the exponent of the underlying 1st-order process.
    pub fn fractional(&self) -> f64 {
        self.h - f64::from(self.order - 1)
    }
}

/// Addresses the covariance matrix of `[B(n), …, B(n + M − 1)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovSpec {
    pub n: u64,
    pub window: usize,
    pub hurst: HurstParams,
}

impl CovSpec {
    pub fn new(n: u64, window: usize, hurst: HurstParams) -> Result<Self> {
        if n < 1 {
            return Err(Error::Domain("time index n must be at least 1".into()));
        }
        if window < 2 {
            return Err(Error::Domain(format!(
                "window length M must be at least 2, got {window}"
            )));
        }
        Ok(CovSpec { n, window, hurst })
    }

    /// Shorthand for `CovSpec::new(n, window, HurstParams::new(h, order)?)`.
    pub fn with(n: u64, window: usize, h: f64, order: u32) -> Result<Self> {
        Self::new(n, window, HurstParams::new(h, order)?)
    }

    pub fn h(&self) -> f64 {
        self.hurst.h()
    }

    pub fn order(&self) -> u32 {
        self.hurst.order()
    }
}

/// `1 / (Γ(2H+1)·|sin πH|)`.
pub fn sigma_h_sq_gamma_form(h: f64) -> f64 {
    1.0 / (gamma(2.0 * h + 1.0) * (PI * h).sin().abs())
}

/// Variance scale `σ²_H`.
///
/// Order 1 uses the Gamma closed form. Higher orders use the integration
/// chain `σ²_{H−m+1} / ((2H)(2H−1)…(2H−(2m−3)))`; see
/// [`sigma_h_sq_gamma_form`] for the equivalent closed form.
pub fn sigma_h_sq(hurst: &HurstParams) -> f64 {
    let base = sigma_h_sq_gamma_form(hurst.fractional());
    let two_h = 2.0 * hurst.h();
    let steps = 2 * hurst.order() as i64 - 3;
    let denom: f64 = (0..=steps).map(|k| two_h - k as f64).product();
    base / denom
}

/// Generalized binomial coefficient `(x choose j)`.
fn binom(x: f64, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (x - f64::from(i)) / f64::from(i + 1))
}

/// Auto-covariance `r(n1, n2)` of the m-th order dfBm.
pub fn autocov(n1: u64, n2: u64, hurst: &HurstParams) -> f64 {
    let s2 = sigma_h_sq(hurst);
    let two_h = 2.0 * hurst.h();
    let (a, b) = (n1.min(n2) as f64, n1.max(n2) as f64);
    let lag = (b - a).powf(two_h);
    match hurst.order() {
        1 => 0.5 * s2 * (a.powf(two_h) - lag + b.powf(two_h)),
        2 => {
            0.5 * s2 * (lag - a.powf(two_h) - b.powf(two_h))
                + 0.5 * s2 * (two_h * a * b.powf(two_h - 1.0) + two_h * b * a.powf(two_h - 1.0))
        }
        _ => autocov_series(n1, n2, hurst),
    }
}

/// Auto-covariance from the general order-m binomial series, valid for every order.
///
/// `(n1/n2)^j·n2^{2H}` is evaluated as `n1^j·n2^{2H−j}`, which stays finite at
/// `n2 = 0` because `2H > j` for every term.
pub fn autocov_series(n1: u64, n2: u64, hurst: &HurstParams) -> f64 {
    let s2 = sigma_h_sq(hurst);
    let two_h = 2.0 * hurst.h();
    let (a, b) = (n1 as f64, n2 as f64);
    let m = hurst.order();
    let sum: f64 = (0..m)
        .map(|j| {
            let jf = f64::from(j);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * binom(two_h, j) * (a.powf(jf) * b.powf(two_h - jf) + b.powf(jf) * a.powf(two_h - jf))
        })
        .sum();
    let parity = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    parity * 0.5 * s2 * ((a - b).abs().powf(two_h) - sum)
}

/// Exact `M × M` covariance matrix with entries `r(n + i, n + j)`.
pub fn covariance_matrix(spec: &CovSpec) -> SymMatrix {
    let n = spec.n;
    SymMatrix::from_fn(spec.window, |i, j| autocov(n + i as u64, n + j as u64, &spec.hurst))
}

/// Smallest time index beyond which the structural approximation error is
/// at most `alpha` (order-1 bound, `0 < H < 1`).
pub fn n_min(window: usize, h: f64, alpha: f64) -> Result<u64> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::Domain(format!("n_min needs 0 < H < 1, got {h}")));
    }
    let m1 = window.saturating_sub(1) as f64;
    let v = m1 * h * ((2.0 - 1.0 / h).abs() / alpha).sqrt();
    Ok(v.ceil() as u64)
}

/// [`n_min`] for a process of any supported order, using the fractional exponent.
pub fn n_min_for(window: usize, hurst: &HurstParams, alpha: f64) -> Result<u64> {
    n_min(window, hurst.fractional(), alpha)
}

/// Building blocks of the structural approximation.
///
/// All matrices use zero-based indices: `b[i][j] = i + j`,
/// `c[i][j] = |i − j|^{c_exponent}`, `d[i][j] = min(i, j)` and
/// `a_half = ones + d / n` (the scaled Wiener covariance).
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralSet {
    pub ones: SymMatrix,
    pub a_half: SymMatrix,
    pub b: SymMatrix,
    pub c: SymMatrix,
    pub d: SymMatrix,
    pub c_exponent: f64,
    pub eps1: f64,
    pub eps2: f64,
}

/// The lag matrix `|i − j|^{2H}` for a window of length `window`.
pub fn lag_matrix(window: usize, h: f64) -> SymMatrix {
    SymMatrix::from_fn(window, |i, j| (j as f64 - i as f64).abs().powf(2.0 * h))
}

pub fn sum_matrix(window: usize) -> SymMatrix {
    SymMatrix::from_fn(window, |i, j| (i + j) as f64)
}

pub fn min_matrix(window: usize) -> SymMatrix {
    SymMatrix::from_fn(window, |i, j| i.min(j) as f64)
}

pub fn structural_matrices(spec: &CovSpec) -> Result<StructuralSet> {
    let m = spec.window;
    let n = spec.n as f64;
    let h = spec.h();
    let eps2 = match spec.order() {
        1 => 1.0 / (2.0 * n.powf(2.0 * h)),
        2 => 1.0 / (2.0 * n.powf(2.0 * h) * (2.0 * h - 1.0)),
        other => return Err(Error::UnsupportedOrder(other)),
    };
    let ones = SymMatrix::ones(m);
    let d = min_matrix(m);
    Ok(StructuralSet {
        a_half: ones.add_scaled(1.0 / n, &d),
        ones,
        b: sum_matrix(m),
        c: lag_matrix(m, h),
        d,
        c_exponent: 2.0 * h,
        eps1: 1.0 / n,
        eps2,
    })
}

/// Structural approximation `R̂` of the covariance matrix (orders 1 and 2).
///
/// `R̂ = s·(A_half + ε₁(H·B − D) ∓ ε₂·C)` with `s = σ²_H·n^{2H}` for order 1
/// and `s = σ²_H·n^{2H}·(2H − 1)` for order 2. The lag term enters with the
/// sign it has in the exact auto-covariance: negative for order 1, positive
/// for order 2.
pub fn covariance_hat(spec: &CovSpec) -> Result<SymMatrix> {
    let parts = structural_matrices(spec)?;
    let h = spec.h();
    let n = spec.n as f64;
    let s2 = sigma_h_sq(&spec.hurst);
    let (prefactor, lag_sign) = match spec.order() {
        1 => (s2 * n.powf(2.0 * h), -1.0),
        _ => (s2 * n.powf(2.0 * h) * (2.0 * h - 1.0), 1.0),
    };
    let linear = parts.b.scale(h).add_scaled(-1.0, &parts.d);
    let inner = parts
        .a_half
        .add_scaled(parts.eps1, &linear)
        .add_scaled(lag_sign * parts.eps2, &parts.c);
    Ok(inner.scale(prefactor))
}

/// `100·‖R − R̂‖_F / ‖R‖_F`.
pub fn approx_error_hat(spec: &CovSpec) -> Result<f64> {
    let exact = covariance_matrix(spec);
    let approx = covariance_hat(spec)?;
    Ok(100.0 * frobenius_norm(&(exact.as_matrix() - approx.as_matrix())) / frobenius_norm(&exact))
}
