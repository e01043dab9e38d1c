//! Crate-wide error type.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error(
        "matrix is not symmetric: relative deviation {deviation:.3e} exceeds {tolerance:.1e}"
    )]
    NotSymmetric { deviation: f64, tolerance: f64 },

    #[error(
        "matrix is not positive definite: min eigenvalue {min_eig:.6e}, max {max_eig:.6e}"
    )]
    NotPositiveDefinite { min_eig: f64, max_eig: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("t = {t} lies outside the geodesic existence interval ({lo}, {hi})")]
    OutsideExistence { t: f64, lo: f64, hi: f64 },

    #[error(
        "direction is a conformal shrink lambda*g0 with lambda = {lambda:.6} <= -4/n = {bound:.6}; \
         outside the exponential domain (U-ray)"
    )]
    ExpDomain { lambda: f64, bound: f64 },

    #[error(
        "target metric outside the logarithm domain (V-inequality): \
         tr(A0^2) = {value:.6} >= (4 pi)^2/n = {bound:.6}"
    )]
    LogDomain { value: f64, bound: f64 },

    #[error("input lies on the excluded ray x = 0, y <= -4/n")]
    ExcludedRay,

    #[error(
        "degenerate direction ({quantity} = {value:.3e}): closed form undefined, \
         use the ODE fallback"
    )]
    DegenerateDirection { quantity: &'static str, value: f64 },

    #[error("fields are defined over different bases: {detail}")]
    BaseMismatch { detail: String },

    #[error("sampling grid error: {0}")]
    Grid(String),

    #[error("at point '{id}': {source}")]
    AtPoint { id: String, source: Box<Error> },

    #[error("linear-map probe failed: relative deviation {deviation:.3e} (map is not linear)")]
    NotLinear { deviation: f64 },

    #[error("malformed document: {0}")]
    Document(String),
}

impl Error {
    /// Wraps an error with the id of the field point where it occurred.
    pub fn at_point(self, id: &str) -> Error {
        Error::AtPoint {
            id: id.to_string(),
            source: Box::new(self),
        }
    }

    /// True for violations of the exponential/logarithm domains or the
    /// geodesic existence interval, at any nesting depth.
    pub fn is_domain_violation(&self) -> bool {
        match self {
            Error::OutsideExistence { .. }
            | Error::ExpDomain { .. }
            | Error::LogDomain { .. }
            | Error::ExcludedRay => true,
            Error::AtPoint { source, .. } => source.is_domain_violation(),
            _ => false,
        }
    }
}
