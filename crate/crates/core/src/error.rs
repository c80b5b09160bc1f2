use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value: {context}")]
    NonFinite { context: String },

    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: String,
    },

    #[error("non-finite value after layer {layer}")]
    NonFiniteLayer { layer: usize },

    #[error("malformed network: {0}")]
    Malformed(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("tolerance infeasible: {0}")]
    Infeasible(String),

    #[error("clip precondition violated: raw output {value} at x = {at} is outside [-1, 2]")]
    ClipRange { value: f64, at: f64 },

    #[error("width mismatch: first layer has {got} rows, the certificate needs {expected}")]
    WidthMismatch { expected: usize, got: usize },

    #[error("search budget exhausted: best deviation {}", .0.deviation)]
    Shortfall(Box<Shortfall>),

    #[error("tolerance {} not met: best sup error {}", .0.epsilon, .0.sup_error)]
    Unmet(Box<crate::univariate::FitReport>),

    #[error("{component} fit failed: best sup error {best} (target {target})")]
    SubFit {
        component: String,
        best: f64,
        target: f64,
    },
}

/// Best-effort result of a search that missed its contract.
#[derive(Debug, Clone)]
pub struct Shortfall {
    pub network: crate::Network,
    /// Achieved worst-case deviation.
    pub deviation: f64,
    /// Search evaluations spent.
    pub evals: usize,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
