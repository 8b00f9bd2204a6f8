//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Spherical harmonic order outside `|m| <= l`.
    #[error("invalid spherical harmonic order: |m|={m} exceeds degree l={l}")]
    InvalidOrder { l: usize, m: i64 },

    /// A coordinate-chart singularity at a free (non-gauge) point. The fix is
    /// to rotate the configuration away from the pole and re-pin the gauge.
    #[error(
        "pole singularity at point {index}: sin(theta)={sin_theta:.3e}; \
         re-gauge the configuration before requesting theta-derivatives"
    )]
    PoleSingularity { index: usize, sin_theta: f64 },

    /// The first two points are (anti)parallel, so the gauge rotation is not
    /// unique.
    #[error("degenerate gauge: the first two points are colinear")]
    DegenerateGauge,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Chain levels and filter bank are incompatible.
    #[error("chain/bank mismatch: {0}")]
    ChainMismatch(String),

    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
