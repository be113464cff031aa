//! DCT approximation of dfBm covariances (Algorithm A), the four normalised
//! error metrics, and the parameter grids of the published tables and figures.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dct::{dct_matrix, dct_matrix_by_eigenvalue};
use crate::error::{Error, Result};
use crate::fbm::{covariance_matrix, CovSpec};
use crate::linalg::{align_columns, frobenius_norm, signed_permutation_align, sym_eig, Matrix, SymMatrix};
use crate::perturbation::{q_hat, MajorCorrection};

/// Which table or figure a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArtifactId {
    Table1,
    Table2,
    Table3,
    Table4,
    Table5,
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl ArtifactId {
    pub fn table(id: u8) -> Result<Self> {
        Ok(match id {
            1 => ArtifactId::Table1,
            2 => ArtifactId::Table2,
            3 => ArtifactId::Table3,
            4 => ArtifactId::Table4,
            5 => ArtifactId::Table5,
            _ => return Err(Error::Domain(format!("no table {id} (expected 1..=5)"))),
        })
    }

    pub fn figure(id: u8) -> Result<Self> {
        Ok(match id {
            1 => ArtifactId::Fig1,
            2 => ArtifactId::Fig2,
            3 => ArtifactId::Fig3,
            4 => ArtifactId::Fig4,
            5 => ArtifactId::Fig5,
            _ => return Err(Error::Domain(format!("no figure {id} (expected 1..=5)"))),
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ArtifactId::Table1 => "table1",
            ArtifactId::Table2 => "table2",
            ArtifactId::Table3 => "table3",
            ArtifactId::Table4 => "table4",
            ArtifactId::Table5 => "table5",
            ArtifactId::Fig1 => "fig1",
            ArtifactId::Fig2 => "fig2",
            ArtifactId::Fig3 => "fig3",
            ArtifactId::Fig4 => "fig4",
            ArtifactId::Fig5 => "fig5",
        }
    }
}

impl fmt::Display for ArtifactId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The four normalised errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    /// Exact eigenbasis vs the perturbation model `Q̂`.
    #[serde(rename = "e_Qhat")]
    QHat,
    /// Exact eigenbasis vs the DCT.
    #[serde(rename = "e_Qdct")]
    QDct,
    /// Exact eigenvalues vs the diagonal of `Q_DCTᵀ·R·Q_DCT`.
    #[serde(rename = "e_lambda")]
    Lambda,
    /// `R` vs its DCT-diagonal approximation `R̃`.
    #[serde(rename = "e_R")]
    R,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::QHat => "e_Qhat",
            Metric::QDct => "e_Qdct",
            Metric::Lambda => "e_lambda",
            Metric::R => "e_R",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One cell of a table or one point of a figure series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub artifact_id: ArtifactId,
    #[serde(rename = "M")]
    pub m: usize,
    pub n: u64,
    #[serde(rename = "H")]
    pub h: f64,
    pub order: u32,
    pub metric: Metric,
    pub value_pct: f64,
}

/// Output of Algorithm A.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmAResult {
    /// Full congruence `Q_DCTᵀ·R·Q_DCT`.
    pub dq: Matrix,
    /// Diagonal of `dq`, in DCT column order.
    pub lambda_tilde: Vec<f64>,
    /// `Q_DCT·diag(lambda_tilde)·Q_DCTᵀ`.
    pub r_tilde: SymMatrix,
}

fn check_order(spec: &CovSpec) -> Result<()> {
    match spec.order() {
        1 | 2 => Ok(()),
        other => Err(Error::UnsupportedOrder(other)),
    }
}

pub fn algorithm_a(spec: &CovSpec) -> Result<AlgorithmAResult> {
    check_order(spec)?;
    let r = covariance_matrix(spec);
    Ok(algorithm_a_on(&r))
}

/// Algorithm A applied to an arbitrary symmetric matrix.
pub fn algorithm_a_on(r: &SymMatrix) -> AlgorithmAResult {
    let m = r.dim();
    let q = dct_matrix(m);
    let dq = q.transpose() * r.as_matrix() * &q;
    let lambda_tilde: Vec<f64> = (0..m).map(|k| dq[(k, k)]).collect();
    let scaled = Matrix::from_fn(m, m, |i, k| q[(i, k)] * lambda_tilde[k]);
    let r_tilde = SymMatrix::from_upper(scaled * q.transpose()).expect("square");
    AlgorithmAResult {
        dq,
        lambda_tilde,
        r_tilde,
    }
}

/// `100·‖R − R̃‖_F / ‖R‖_F`.
pub fn e_tilde_r(spec: &CovSpec) -> Result<f64> {
    check_order(spec)?;
    let r = covariance_matrix(spec);
    let a = algorithm_a_on(&r);
    Ok(100.0 * frobenius_norm(&(r.as_matrix() - a.r_tilde.as_matrix())) / frobenius_norm(&r))
}

/// `100·‖Λ − Λ̃‖_F / ‖Λ‖_F`, both sorted ascending before differencing.
pub fn e_tilde_lambda(spec: &CovSpec) -> Result<f64> {
    check_order(spec)?;
    let r = covariance_matrix(spec);
    let exact = sym_eig(&r)?.eigenvalues;
    let mut approx = algorithm_a_on(&r).lambda_tilde;
    approx.sort_by(f64::total_cmp);
    let diff: f64 = exact.iter().zip(&approx).map(|(a, b)| (a - b) * (a - b)).sum();
    let norm: f64 = exact.iter().map(|a| a * a).sum();
    Ok(100.0 * (diff / norm).sqrt())
}

/// Reference basis for [`e_q`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    Dct,
    QHat(MajorCorrection),
}

/// `100·‖Q − align(Q, Q_ref)‖_F / ‖Q‖_F` for the exact eigenbasis `Q`.
///
/// The DCT is first reordered so that frequency `k` pairs with eigenvalue
/// rank `M − 1 − k`; the signed-permutation alignment then settles signs.
pub fn e_q(spec: &CovSpec, reference: Reference) -> Result<f64> {
    if spec.order() != 1 {
        return Err(Error::UnsupportedOrder(spec.order()));
    }
    let m = spec.window;
    let actual = sym_eig(&covariance_matrix(spec))?.eigenvectors;
    let aligned = match reference {
        Reference::Dct => align_columns(&actual, &dct_matrix_by_eigenvalue(m))?,
        Reference::QHat(direction) => signed_permutation_align(&actual, &q_hat(spec.n, m, spec.h(), direction)?),
    };
    Ok(100.0 * frobenius_norm(&(&actual - aligned)) / (m as f64).sqrt())
}

/// Major-column convention used when regenerating Table I.
pub const TABLE1_CORRECTION: MajorCorrection = MajorCorrection::Reflected;

/// Evaluates `metric` for `spec`.
pub fn evaluate(metric: Metric, spec: &CovSpec) -> Result<f64> {
    match metric {
        Metric::QHat => e_q(spec, Reference::QHat(TABLE1_CORRECTION)),
        Metric::QDct => e_q(spec, Reference::Dct),
        Metric::Lambda => e_tilde_lambda(spec),
        Metric::R => e_tilde_r(spec),
    }
}

/// Window lengths of every table and of figures 2–5.
pub const WINDOWS: std::ops::RangeInclusive<usize> = 2..=9;

/// `(n, H)` column headers of a table, in printed order.
pub fn table_columns(id: u8) -> Result<[(u64, f64); 6]> {
    let hs = match id {
        1..=4 => [0.2, 0.45, 0.8],
        5 => [1.2, 1.45, 1.8],
        _ => return Err(Error::Domain(format!("no table {id} (expected 1..=5)"))),
    };
    Ok([
        (200, hs[0]),
        (2000, hs[0]),
        (200, hs[1]),
        (2000, hs[1]),
        (200, hs[2]),
        (2000, hs[2]),
    ])
}

fn table_metric(id: u8) -> Metric {
    match id {
        1 => Metric::QHat,
        2 => Metric::QDct,
        3 => Metric::Lambda,
        _ => Metric::R,
    }
}

/// All cells of table `id` (1..=5), row by row (M ascending), columns in
/// printed order.
pub fn run_table(id: u8) -> Result<Vec<ErrorRow>> {
    let artifact = ArtifactId::table(id)?;
    let columns = table_columns(id)?;
    let metric = table_metric(id);
    let order = if id == 5 { 2 } else { 1 };
    let mut rows = Vec::with_capacity(WINDOWS.count() * columns.len());
    for m in WINDOWS {
        for &(n, h) in &columns {
            let spec = CovSpec::with(n, m, h, order)?;
            rows.push(ErrorRow {
                artifact_id: artifact,
                m,
                n,
                h,
                order,
                metric,
                value_pct: evaluate(metric, &spec)?,
            });
        }
    }
    Ok(rows)
}

/// Time indices of every figure series.
pub const FIGURE_SERIES: [u64; 3] = [200, 500, 2000];

/// Hurst grid of figure 1: `0.05, 0.10, …, 0.95`.
pub fn figure1_hurst_grid() -> Vec<f64> {
    (1..=19).map(|k| k as f64 / 20.0).collect()
}

/// `e_R` series of figure `id` (1..=5), ordered by `(M, n, H)`.
pub fn run_figure(id: u8) -> Result<Vec<ErrorRow>> {
    let artifact = ArtifactId::figure(id)?;
    let mut cells: Vec<(usize, u64, f64, u32)> = Vec::new();
    match id {
        1 => {
            for n in FIGURE_SERIES {
                for h in figure1_hurst_grid() {
                    cells.push((5, n, h, 1));
                }
            }
        }
        _ => {
            let (h, order) = match id {
                2 => (0.45, 1),
                3 => (0.8, 1),
                4 => (1.2, 2),
                _ => (1.55, 2),
            };
            for m in WINDOWS {
                for n in FIGURE_SERIES {
                    cells.push((m, n, h, order));
                }
            }
        }
    }
    cells
        .into_iter()
        .map(|(m, n, h, order)| {
            let spec = CovSpec::with(n, m, h, order)?;
            Ok(ErrorRow {
                artifact_id: artifact,
                m,
                n,
                h,
                order,
                metric: Metric::R,
                value_pct: e_tilde_r(&spec)?,
            })
        })
        .collect()
}

/// Every metric that applies to `spec`: all four for order 1, `e_lambda`
/// and `e_R` for order 2.
pub fn all_metrics(spec: &CovSpec) -> Result<Vec<(Metric, f64)>> {
    check_order(spec)?;
    let metrics: &[Metric] = if spec.order() == 1 {
        &[Metric::QHat, Metric::QDct, Metric::Lambda, Metric::R]
    } else {
        &[Metric::Lambda, Metric::R]
    };
    metrics.iter().map(|&m| Ok((m, evaluate(m, spec)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::off_diagonal_norm;
    use approx::assert_relative_eq;

    fn spec(n: u64, m: usize, h: f64, order: u32) -> CovSpec {
        CovSpec::with(n, m, h, order).unwrap()
    }

    #[test]
    fn algorithm_a_identities() {
        for (n, m, h, o) in [(200, 5, 0.45, 1), (2000, 9, 0.8, 1), (7, 3, 0.2, 1), (200, 6, 1.45, 2)] {
            let s = spec(n, m, h, o);
            let r = covariance_matrix(&s);
            let a = algorithm_a(&s).unwrap();
            for k in 0..m {
                assert_eq!(a.lambda_tilde[k], a.dq[(k, k)]);
            }
            let tr: f64 = a.lambda_tilde.iter().sum();
            assert_relative_eq!(tr, r.trace(), max_relative = 1e-10);
            let lhs = frobenius_norm(&(r.as_matrix() - a.r_tilde.as_matrix()));
            assert_relative_eq!(lhs, off_diagonal_norm(&a.dq), max_relative = 1e-8);
            let pct = e_tilde_r(&s).unwrap();
            let rn = frobenius_norm(&r);
            assert_relative_eq!(
                (pct * rn).powi(2),
                off_diagonal_norm(&a.dq).powi(2) * 1e4,
                max_relative = 1e-8
            );
        }
        assert!(matches!(
            algorithm_a(&spec(10, 4, 2.5, 3)),
            Err(Error::UnsupportedOrder(3))
        ));
    }

    #[test]
    fn metric_anchors() {
        assert_relative_eq!(e_tilde_r(&spec(200, 5, 0.45, 1)).unwrap(), 0.4780, epsilon = 5e-5);
        assert_relative_eq!(e_tilde_r(&spec(200, 2, 0.2, 1)).unwrap(), 0.0727, epsilon = 5e-5);
        assert_relative_eq!(e_tilde_r(&spec(2000, 9, 0.8, 1)).unwrap(), 0.1458, epsilon = 5e-5);
        assert_relative_eq!(e_tilde_r(&spec(200, 9, 1.8, 2)).unwrap(), 3.2200, epsilon = 5e-5);
        assert_relative_eq!(
            e_tilde_lambda(&spec(2000, 5, 0.45, 1)).unwrap(),
            0.1467e-4,
            max_relative = 1e-3
        );
        assert_relative_eq!(
            e_tilde_lambda(&spec(200, 2, 0.2, 1)).unwrap(),
            3.8564e-5,
            max_relative = 1e-3
        );
        assert_relative_eq!(
            e_q(&spec(2000, 2, 0.2, 1), Reference::Dct).unwrap(),
            0.0051,
            epsilon = 5e-5
        );
        assert_relative_eq!(
            e_q(&spec(200, 5, 0.8, 1), Reference::Dct).unwrap(),
            3.4596,
            epsilon = 5e-5
        );
        let qhat = Reference::QHat(TABLE1_CORRECTION);
        assert_relative_eq!(e_q(&spec(200, 2, 0.45, 1), qhat).unwrap(), 0.1781, epsilon = 5e-5);
        assert_relative_eq!(e_q(&spec(2000, 2, 0.2, 1), qhat).unwrap(), 0.0080, epsilon = 5e-5);
    }

    #[test]
    fn forward_correction_matches_other_table1_cells() {
        let fwd = Reference::QHat(MajorCorrection::Forward);
        assert_relative_eq!(e_q(&spec(200, 3, 0.2, 1), fwd).unwrap(), 0.1940, epsilon = 5e-5);
        assert_relative_eq!(e_q(&spec(200, 6, 0.8, 1), fwd).unwrap(), 0.5372, epsilon = 5e-5);
    }

    #[test]
    fn e_lambda_small_at_half() {
        for m in 2..=9 {
            for n in [200, 2000] {
                let v = e_tilde_lambda(&spec(n, m, 0.5, 1)).unwrap();
                assert!(v < 1e-2, "n={n} M={m}: {v}");
            }
        }
    }

    #[test]
    fn e_q_rejects_order_two() {
        assert!(matches!(
            e_q(&spec(200, 4, 1.2, 2), Reference::Dct),
            Err(Error::UnsupportedOrder(2))
        ));
    }

    #[test]
    fn table_shapes() {
        let t3 = run_table(3).unwrap();
        assert_eq!(t3.len(), 48);
        assert!(t3.iter().all(|r| r.metric == Metric::Lambda && r.order == 1));
        let t4 = run_table(4).unwrap();
        let cell = t4.iter().find(|r| r.m == 3 && r.n == 2000 && r.h == 0.45).unwrap();
        assert_relative_eq!(cell.value_pct, 0.0279, epsilon = 5e-5);
        let t5 = run_table(5).unwrap();
        assert_eq!((t5[0].m, t5[0].n, t5[0].h, t5[0].order), (2, 200, 1.2, 2));
        assert_relative_eq!(t5[0].value_pct, 0.4232, epsilon = 5e-5);
        assert!(run_table(0).is_err() && run_table(6).is_err());
    }

    #[test]
    fn table_rows_follow_printed_order() {
        let t = run_table(4).unwrap();
        let cols = table_columns(4).unwrap();
        for (i, row) in t.iter().enumerate() {
            assert_eq!(row.m, 2 + i / 6);
            assert_eq!((row.n, row.h), cols[i % 6]);
        }
    }

    #[test]
    fn tables_are_deterministic() {
        for id in 1..=5 {
            assert_eq!(run_table(id).unwrap(), run_table(id).unwrap());
        }
    }

    #[test]
    fn error_decreases_with_n() {
        for id in [4u8, 5] {
            let t = run_table(id).unwrap();
            for pair in t.chunks(2) {
                assert_eq!(pair[0].n, 200);
                assert!(pair[1].value_pct < pair[0].value_pct, "{:?}", pair[0]);
            }
        }
    }

    #[test]
    fn dct_error_smallest_near_half() {
        let at = |h| e_tilde_r(&spec(2000, 5, h, 1)).unwrap();
        let half = at(0.5);
        assert!(half < at(0.2) && half < at(0.8));
        // The sweep minimum sits just below 1/2 rather than exactly on it.
        assert!(at(0.45) < half);
    }

    #[test]
    fn figure_grids() {
        let f1 = run_figure(1).unwrap();
        assert_eq!(f1.len(), 3 * 19);
        let at = |n: u64, h: f64| {
            f1.iter()
                .find(|r| r.n == n && (r.h - h).abs() < 1e-12)
                .unwrap()
                .value_pct
        };
        assert_relative_eq!(at(200, 0.45), 0.4780, epsilon = 5e-5);
        for n in FIGURE_SERIES {
            let series: Vec<&ErrorRow> = f1.iter().filter(|r| r.n == n).collect();
            let best = series
                .iter()
                .min_by(|a, b| a.value_pct.total_cmp(&b.value_pct))
                .unwrap();
            assert!((0.40..=0.50).contains(&best.h), "n={n}: min at {}", best.h);
            assert!(at(n, 0.5) < at(n, 0.05) && at(n, 0.5) < at(n, 0.95));
        }
        for id in 2..=5u8 {
            let f = run_figure(id).unwrap();
            assert_eq!(f.len(), 8 * 3);
            assert!(f.iter().all(|r| r.metric == Metric::R));
        }
        assert!(run_figure(5).unwrap().iter().all(|r| r.h == 1.55 && r.order == 2));
        assert!(run_figure(9).is_err());
    }

    #[test]
    fn metric_serde_names() {
        assert_eq!(serde_json::to_string(&Metric::QHat).unwrap(), "\"e_Qhat\"");
        assert_eq!(serde_json::to_string(&ArtifactId::Fig3).unwrap(), "\"fig3\"");
    }
}
