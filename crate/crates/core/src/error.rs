use thiserror::Error;

/// Errors raised by the dfBm library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A matrix or parameter contains a NaN or infinite value.
    #[error("non-finite input: {0}")]
    NonFinite(String),

    /// Matrix dimensions do not agree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// An iterative routine exhausted its iteration budget.
    #[error("no convergence after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    /// The resolvent was evaluated on the spectrum of the operator.
    #[error("resolvent pole: z = {0} lies in the spectrum")]
    Pole(f64),

    /// Matrix approximations exist only for process orders 1 and 2.
    #[error("unsupported process order {0} (only 1 and 2 are supported here)")]
    UnsupportedOrder(u32),
}

pub type Result<T> = std::result::Result<T, Error>;
