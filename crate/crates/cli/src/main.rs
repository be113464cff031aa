use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dfbm_core::checks::{run_all, CheckOutcome};
use dfbm_core::experiments::{all_metrics, run_figure, run_table, ErrorRow};
use dfbm_core::fbm::{covariance_hat, covariance_matrix, n_min_for, sigma_h_sq, sigma_h_sq_gamma_form, CovSpec};
use dfbm_core::linalg::{sym_eig, Matrix};

#[derive(Parser, Debug)]
#[command(
    name = "dfbm",
    version,
    about = "Covariance matrices, DCT errors and experiment grids for dfBm"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the exact covariance matrix, or its structural approximation.
    Matrix {
        #[command(flatten)]
        spec: SpecArgs,
        /// Use the structural approximation instead of the exact matrix.
        #[arg(long)]
        approx: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print eigenvalues (ascending) and eigenvectors of the covariance matrix.
    Eig {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print the error metrics for one parameter set.
    Errors {
        #[command(flatten)]
        spec: SpecArgs,
        /// Tolerance for the reported n_min.
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Regenerate a table grid.
    Table {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
        id: u8,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Regenerate the data behind a figure.
    Figure {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
        id: u8,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the invariant suite; exits 1 if any check fails.
    Check {
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Debug)]
struct SpecArgs {
    /// Start time index.
    #[arg(long)]
    n: u64,
    /// Window length.
    #[arg(long = "M")]
    m: usize,
    /// Hurst exponent, in (order - 1, order).
    #[arg(long = "H", allow_negative_numbers = true)]
    h: f64,
    #[arg(long, default_value_t = 1)]
    order: u32,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file, or `-` for standard output.
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

enum Failure {
    Usage(String),
    Compute(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Compute(e.into())
    }
}

fn spec_of(args: &SpecArgs) -> std::result::Result<CovSpec, Failure> {
    CovSpec::with(args.n, args.m, args.h, args.order).map_err(|e| Failure::Usage(e.to_string()))
}

fn run(cli: Cli) -> std::result::Result<ExitCode, Failure> {
    match cli.command {
        Command::Matrix { spec, approx, output } => {
            let s = spec_of(&spec)?;
            let r = if approx {
                covariance_hat(&s)?
            } else {
                covariance_matrix(&s)
            };
            emit(&output, &matrix_text(r.as_matrix(), output.format)?)?;
        }
        Command::Eig { spec, output } => {
            let s = spec_of(&spec)?;
            let d = sym_eig(&covariance_matrix(&s))?;
            let text = match output.format {
                Format::Csv => {
                    let m = d.dim();
                    let mut w = csv::Writer::from_writer(Vec::new());
                    let mut header = vec!["k".to_string(), "eigenvalue".to_string()];
                    header.extend((0..m).map(|i| format!("v{i}")));
                    w.write_record(&header)?;
                    for k in 0..m {
                        let mut rec = vec![k.to_string(), num(d.eigenvalues[k])];
                        rec.extend(d.eigenvectors.column(k).iter().map(|&x| num(x)));
                        w.write_record(&rec)?;
                    }
                    finish(w)?
                }
                Format::Json => {
                    let vectors: Vec<Vec<f64>> = (0..d.dim())
                        .map(|k| d.eigenvectors.column(k).iter().copied().collect())
                        .collect();
                    json(&serde_json::json!({ "eigenvalues": d.eigenvalues, "eigenvectors": vectors }))?
                }
            };
            emit(&output, &text)?;
        }
        Command::Errors { spec, alpha, output } => {
            let s = spec_of(&spec)?;
            if alpha.is_nan() || alpha <= 0.0 {
                return Err(Failure::Usage(format!("alpha must be positive, got {alpha}")));
            }
            emit(&output, &errors_text(&s, alpha, output.format)?)?;
        }
        Command::Table { id, output } => emit(&output, &rows_text(&run_table(id)?, output.format)?)?,
        Command::Figure { id, output } => emit(&output, &rows_text(&run_figure(id)?, output.format)?)?,
        Command::Check { output } => {
            let outcomes = run_all();
            emit(&output, &check_text(&outcomes, output.format)?)?;
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            eprintln!("{} passed, {failed} failed", outcomes.len() - failed);
            if failed > 0 {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Shortest decimal that parses back to the same `f64`.
fn num(x: f64) -> String {
    format!("{x:?}")
}

/// `x` rounded to 6 significant digits.
fn sig6(x: f64) -> String {
    let rounded: f64 = format!("{x:.5e}").parse().expect("valid float");
    format!("{rounded}")
}

fn json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("csv flush: {e}"))?;
    Ok(String::from_utf8(bytes)?)
}

fn matrix_text(m: &Matrix, format: Format) -> Result<String> {
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.write_record(r.iter().map(|&x| num(x)))?;
            }
            finish(w)
        }
        Format::Json => json(&rows),
    }
}

fn errors_text(spec: &CovSpec, alpha: f64, format: Format) -> Result<String> {
    let metrics = all_metrics(spec)?;
    let n_min = n_min_for(spec.window, &spec.hurst, alpha)?;
    let mut extra: Vec<(&str, f64)> = Vec::new();
    if spec.order() >= 2 {
        extra.push(("sigma2_chain", sigma_h_sq(&spec.hurst)));
        extra.push(("sigma2_gamma", sigma_h_sq_gamma_form(spec.h())));
    }
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["quantity", "value"])?;
            for (m, v) in &metrics {
                w.write_record([m.as_str(), &sig6(*v)])?;
            }
            w.write_record(["n_min", &n_min.to_string()])?;
            for (k, v) in &extra {
                w.write_record([*k, &sig6(*v)])?;
            }
            finish(w)
        }
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("n".into(), spec.n.into());
            obj.insert("M".into(), spec.window.into());
            obj.insert("H".into(), spec.h().into());
            obj.insert("order".into(), spec.order().into());
            for (m, v) in &metrics {
                obj.insert(m.as_str().into(), sig6(*v).parse::<f64>()?.into());
            }
            obj.insert("n_min".into(), n_min.into());
            for (k, v) in &extra {
                obj.insert((*k).into(), sig6(*v).parse::<f64>()?.into());
            }
            json(&obj)
        }
    }
}

fn rows_text(rows: &[ErrorRow], format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            if rows.is_empty() {
                w.write_record(["artifact_id", "M", "n", "H", "order", "metric", "value_pct"])?;
            }
            for r in rows {
                w.serialize(r)?;
            }
            finish(w)
        }
        Format::Json => json(rows),
    }
}

fn check_text(outcomes: &[CheckOutcome], format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["check", "status", "detail"])?;
            for o in outcomes {
                w.write_record([o.name, if o.passed { "PASS" } else { "FAIL" }, &o.detail])?;
            }
            finish(w)
        }
        Format::Json => json(outcomes),
    }
}

fn emit(output: &OutputArgs, text: &str) -> Result<()> {
    if output.out == "-" {
        let mut out = io::stdout().lock();
        out.write_all(text.as_bytes())?;
        out.flush()?;
    } else {
        fs::write(&output.out, text).with_context(|| format!("writing {}", output.out))?;
    }
    Ok(())
}
