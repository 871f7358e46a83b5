use thiserror::Error;

/// Errors raised anywhere in the simulation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("b-modulation infeasible: max |b| = {max_abs:.6} reaches the limit {limit:.6}")]
    BModAmplitude { max_abs: f64, limit: f64 },

    #[error("burst leaks into the window edges: edge energy fraction {fraction:.3e} > {threshold:.1e}")]
    EdgeEnergy { fraction: f64, threshold: f64 },

    #[error("inverse NFT did not converge: residual {residual:.3e} after {iterations} iterations (tolerance {tolerance:.1e})")]
    Convergence {
        residual: f64,
        iterations: usize,
        tolerance: f64,
    },

    #[error("nonlinear phase per step {phase:.3e} rad exceeds the cap {cap:.1e} rad")]
    StepSize { phase: f64, cap: f64 },

    #[error("subcarrier center λ = {lambda} is not representable on the grid: {reason}")]
    GridMismatch { lambda: f64, reason: String },

    #[error("ICI matrix condition number {cond:.3e} exceeds the cap {cap:.1e}")]
    IllConditioned { cond: f64, cap: f64 },

    #[error("sphere decoder node budget of {budget} exhausted")]
    Timeout { budget: u64 },

    #[error("length mismatch in {what}: {left} vs {right}")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{count} simulated block(s) failed; {summary}")]
    BlockFailures { count: usize, summary: String },

    #[error("{0}")]
    Domain(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
