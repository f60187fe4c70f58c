use thiserror::Error;

/// Errors raised by body construction, quadrature and functional evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{op} is not supported for {kind} bodies")]
    UnsupportedKind { op: &'static str, kind: &'static str },

    #[error("body is not C2+ admissible: {0}")]
    Admissibility(String),

    #[error("approximation failed: residual {residual:e} above tolerance {tolerance:e}")]
    Approximation { residual: f64, tolerance: f64 },

    #[error("exponent p = {p} is at (or within 1e-6 of) the pole p = -n; use {route}")]
    ExponentPole { p: f64, route: &'static str },

    #[error("non-finite integrand value {value} at quadrature node {node}")]
    Evaluation { node: usize, value: f64 },

    #[error("illumination body is unbounded at s = {s} (direction {direction:?})")]
    UnboundedBody { s: f64, direction: Vec<f64> },

    #[error("unsupported dimension n = {n}: {reason}")]
    UnsupportedDimension { n: usize, reason: &'static str },
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;
