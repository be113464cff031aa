//! Acceptance gate: one test per primary criterion, each printing a single
//! PASS/FAIL line. Run with `cargo test --test acceptance -- --nocapture`.

#![allow(clippy::approx_constant)]

use std::time::Instant;

use dfbm_core::dct::precision_half;
use dfbm_core::experiments::{e_tilde_lambda, run_table, table_columns, ErrorRow};
use dfbm_core::fbm::{approx_error_hat, covariance_matrix, n_min, sum_matrix, CovSpec, HurstParams};
use dfbm_core::linalg::{numeric_rank, sym_eig, Matrix};
use dfbm_core::perturbation::{component_matrices, lambda_major, minor_eigenvalue_model, reduced_operator, resolvent};

type Grid = [[f64; 6]; 8];

const TABLE_I: Grid = [
    [0.0820, 0.0080, 0.1781, 0.0178, 0.3158, 0.0316],
    [0.1940, 0.0713, 0.1234, 0.0126, 0.2112, 0.0211],
    [0.5020, 0.1880, 0.1562, 0.0160, 0.3926, 0.1098],
    [0.5423, 0.2016, 0.3549, 0.0366, 0.4745, 0.1346],
    [0.2767, 0.0988, 0.2086, 0.0214, 0.5372, 0.1515],
    [0.5796, 0.2119, 0.2306, 0.0236, 0.5835, 0.1728],
    [0.2990, 0.2139, 0.2506, 0.0257, 0.8950, 0.1817],
    [0.5980, 0.2150, 0.4926, 0.0509, 0.6557, 0.1754],
];

const TABLE_II: Grid = [
    [0.0531, 0.0051, 0.1127, 0.0113, 0.1995, 0.0200],
    [0.2727, 0.1007, 0.1662, 0.0170, 0.2825, 0.0283],
    [2.6047, 2.5861, 0.5137, 0.4590, 2.6653, 2.8256],
    [3.4915, 3.4579, 0.6691, 0.6028, 3.4596, 3.6393],
    [4.1735, 4.1326, 0.7930, 0.7166, 4.1227, 4.3194],
    [4.6706, 4.6222, 0.8853, 0.7987, 4.6057, 4.8067],
    [5.0760, 5.0226, 0.9622, 0.8662, 5.0069, 5.2117],
    [5.4022, 5.3444, 1.0253, 0.9204, 5.3307, 5.5360],
];

const TABLE_III: Grid = [
    [3.8564e-5, 3.6638e-7, 0.0002, 0.0179e-4, 0.0006, 0.0057e-3],
    [0.0015, 0.0002, 0.0005, 0.0519e-4, 0.0015, 0.0151e-3],
    [0.0037, 0.0011, 0.0009, 0.0926e-4, 0.0028, 0.0277e-3],
    [0.0064, 0.0021, 0.0015, 0.1467e-4, 0.0044, 0.0440e-3],
    [0.0086, 0.0029, 0.0022, 0.2130e-4, 0.0064, 0.0639e-3],
    [0.0104, 0.0035, 0.0030, 0.2919e-4, 0.0087, 0.0874e-3],
    [0.0120, 0.0041, 0.0039, 0.3835e-4, 0.0113, 0.1145e-3],
    [0.0134, 0.0046, 0.0050, 0.4879e-4, 0.0143, 0.1454e-3],
];

const TABLE_IV: Grid = [
    [0.0727, 0.0072, 0.1590, 0.0159, 0.2821, 0.0283],
    [0.4610, 0.1732, 0.2720, 0.0279, 0.4596, 0.0462],
    [0.6428, 0.2403, 0.3768, 0.0390, 0.6279, 0.0632],
    [0.7754, 0.2876, 0.4780, 0.0496, 0.7923, 0.0799],
    [0.8837, 0.3251, 0.5773, 0.0600, 0.9546, 0.0965],
    [0.9775, 0.3567, 0.6754, 0.0703, 1.1153, 0.1130],
    [1.0617, 0.3842, 0.7725, 0.0805, 1.2747, 0.1294],
    [1.1391, 0.4090, 0.8689, 0.0906, 1.4331, 0.1458],
];

const TABLE_V: Grid = [
    [0.4232, 0.0424, 0.5114, 0.0513, 0.6348, 0.0636],
    [0.6894, 0.0692, 0.8330, 0.0837, 1.0340, 0.1039],
    [0.9416, 0.0948, 1.1377, 0.1145, 1.4123, 0.1422],
    [1.1881, 0.1199, 1.4355, 0.1449, 1.7819, 0.1798],
    [1.4312, 0.1447, 1.7292, 0.1749, 2.1463, 0.2171],
    [1.6718, 0.1695, 2.0200, 0.2048, 2.5071, 0.2542],
    [1.9106, 0.1941, 2.3083, 0.2345, 2.8648, 0.2911],
    [2.1476, 0.2187, 2.5947, 0.2642, 3.2200, 0.3280],
];

const GRID_H: [f64; 3] = [0.2, 0.45, 0.8];

fn report(name: &str, pass: bool, detail: &str) {
    println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name}: {detail}");
}

fn cell(rows: &[ErrorRow], m: usize, col: usize) -> f64 {
    rows[(m - 2) * 6 + col].value_pct
}

/// Cells of `table` outside `ok(ours, theirs)`, formatted for the report.
fn misses(id: u8, table: &Grid, ok: impl Fn(usize, f64, f64) -> bool) -> (Vec<String>, Vec<ErrorRow>) {
    let rows = run_table(id).unwrap();
    let cols = table_columns(id).unwrap();
    let mut bad = Vec::new();
    for m in 2..=9 {
        for (c, &(n, h)) in cols.iter().enumerate() {
            let (ours, theirs) = (cell(&rows, m, c), table[m - 2][c]);
            if !ok(m, ours, theirs) {
                bad.push(format!("M={m} n={n} H={h}: {ours:.6} vs {theirs}"));
            }
        }
    }
    (bad, rows)
}

fn rel(ours: f64, theirs: f64) -> f64 {
    (ours - theirs).abs() / theirs.abs()
}

fn summary(bad: &[String], total: usize) -> String {
    if bad.is_empty() {
        format!("{total}/{total} cells within tolerance")
    } else {
        format!(
            "{}/{total} cells within tolerance; misses: {}",
            total - bad.len(),
            bad.join("; ")
        )
    }
}

#[test]
fn table_iv_reproduction() {
    let start = Instant::now();
    let (bad, _) = misses(4, &TABLE_IV, |_, o, t| (o - t).abs() <= (0.02 * t).max(0.002));
    let secs = start.elapsed().as_secs_f64();
    let pass = bad.is_empty() && secs < 5.0;
    report(
        "table_iv_reproduction",
        pass,
        &format!("{} in {secs:.3}s", summary(&bad, 48)),
    );
}

#[test]
fn table_v_reproduction() {
    let (bad, _) = misses(5, &TABLE_V, |_, o, t| (o - t).abs() <= (0.03 * t).max(0.005));
    report("table_v_reproduction", bad.is_empty(), &summary(&bad, 48));
}

#[test]
fn table_iii_reproduction() {
    let (bad, _) = misses(3, &TABLE_III, |_, o, t| rel(o, t) <= 0.15);
    report("table_iii_reproduction", bad.is_empty(), &summary(&bad, 48));
}

#[test]
fn table_ii_reproduction() {
    let (mut bad, rows) = misses(2, &TABLE_II, |m, o, t| rel(o, t) <= if m <= 3 { 0.05 } else { 0.25 });
    for m in 4..=9 {
        for (low, mid, high) in [(0, 2, 4), (1, 3, 5)] {
            let v = |c| cell(&rows, m, c);
            if !(v(mid) < v(low) && v(mid) < v(high)) {
                bad.push(format!("M={m}: H=0.45 not below H=0.2 and H=0.8 (col {mid})"));
            }
        }
    }
    report("table_ii_reproduction", bad.is_empty(), &summary(&bad, 48));
}

#[test]
fn table_i_reproduction() {
    let (bad, rows) = misses(1, &TABLE_I, |m, o, t| o < 1.0 && (m != 2 || rel(o, t) <= 0.10));
    let worst = rows.iter().map(|r| r.value_pct).fold(0.0, f64::max);
    report(
        "table_i_reproduction",
        bad.is_empty(),
        &format!("{}; max cell {worst:.4}", summary(&bad, 48)),
    );
}

#[test]
fn exactness_at_half() {
    let mut hat = 0.0f64;
    let mut lam = 0.0f64;
    for m in 2..=9 {
        let spec = CovSpec::with(2000, m, 0.5, 1).unwrap();
        hat = hat.max(approx_error_hat(&spec).unwrap());
        lam = lam.max(e_tilde_lambda(&spec).unwrap());
    }
    let pass = hat <= 1e-10 && lam < 1e-6;
    report(
        "exactness_at_half",
        pass,
        &format!("max approx_error_hat {hat:.3e} (tol 1e-10), max e_lambda {lam:.3e}% (tol 1e-6)"),
    );
}

#[test]
fn precision_identity() {
    let mut worst = 0.0f64;
    for n in [1u64, 2, 10, 200] {
        for m in 2..=9 {
            let r = covariance_matrix(&CovSpec::with(n, m, 0.5, 1).unwrap());
            let prod = precision_half(n, m).as_matrix() * r.as_matrix();
            worst = worst.max((prod - Matrix::identity(m, m)).amax());
        }
    }
    report(
        "precision_identity",
        worst <= 1e-8,
        &format!("max |P·R − I| {worst:.3e}"),
    );
}

#[test]
fn perturbation_property_suite() {
    let mut ident = 0.0f64;
    let mut kernel = 0.0f64;
    let mut resolv = 0.0f64;
    let mut rank_bad = Vec::new();
    for m in 2..=9 {
        let c = component_matrices(m).unwrap();
        let id = Matrix::identity(m, m);
        let ones = Matrix::from_element(m, m, 1.0);
        for r in [
            &c.z10 + &c.z20 - &id,
            &c.z10 * &c.z10 - &c.z10,
            &c.z20 * &c.z20 - &c.z20,
            &c.z10 * &c.z20,
        ] {
            ident = ident.max(r.amax());
        }
        kernel = kernel.max((&c.z10 * sum_matrix(m).as_matrix() * &c.z10).amax());
        for k in 1..=19 {
            let h = k as f64 / 20.0;
            let rank = numeric_rank(&reduced_operator(m, h).unwrap(), 1e-10).unwrap();
            if rank != m - 1 {
                rank_bad.push(format!("M={m} H={h}: {rank}"));
            }
        }
        for z in [-3.5, 0.3, 1.7, m as f64 + 0.25, 20.0] {
            let direct = (&id * z - &ones).try_inverse().unwrap();
            resolv = resolv.max((resolvent(z, m).unwrap() - direct).amax());
        }
    }
    let pass = ident <= 1e-12 && kernel <= 1e-12 && rank_bad.is_empty() && resolv <= 1e-10;
    report(
        "perturbation_property_suite",
        pass,
        &format!(
            "identities {ident:.3e}, Z10·B·Z10 {kernel:.3e}, rank misses [{}], resolvent {resolv:.3e}",
            rank_bad.join("; ")
        ),
    );
}

#[test]
fn eigen_model_accuracy() {
    let mut major = 0.0f64;
    let mut minor = (0.0f64, String::new());
    for m in [2, 3, 5] {
        for h in GRID_H {
            let exact = sym_eig(&covariance_matrix(&CovSpec::with(2000, m, h, 1).unwrap())).unwrap();
            major = major.max((lambda_major(2000, m, h).unwrap() / exact.largest() - 1.0).abs());
            let model = minor_eigenvalue_model(m, &HurstParams::first_order(h).unwrap()).unwrap();
            for (e, mo) in exact.eigenvalues.iter().zip(&model) {
                let r = (mo / e - 1.0).abs();
                if r > minor.0 {
                    minor = (r, format!("M={m} H={h}"));
                }
            }
        }
    }
    let oracle = (lambda_major(200, 2, 0.5).unwrap() / 400.500625 - 1.0).abs();
    let pass = major <= 0.01 && minor.0 <= 0.05 && oracle <= 1e-9;
    report(
        "eigen_model_accuracy",
        pass,
        &format!(
            "lambda_major worst {:.3e}% (tol 1%), minor worst {:.3}% at {} (tol 5%), oracle rel {oracle:.1e}",
            100.0 * major,
            100.0 * minor.0,
            minor.1
        ),
    );
}

#[test]
fn structural_error_bound() {
    let mut worst = 0.0f64;
    let mut tested = 0usize;
    for alpha in [0.01, 0.05] {
        for m in 2..=9 {
            for h in GRID_H {
                let nm = n_min(m, h, alpha).unwrap();
                for n in [nm + 1, 2 * nm + 1, 200, 2000] {
                    if n <= nm {
                        continue;
                    }
                    let e = approx_error_hat(&CovSpec::with(n, m, h, 1).unwrap()).unwrap() / 100.0;
                    worst = worst.max(e / alpha);
                    tested += 1;
                }
            }
        }
    }
    report(
        "structural_error_bound",
        worst <= 1.0,
        &format!("{tested} cases, worst error/alpha {worst:.3e}"),
    );
}
