use thiserror::Error;

/// Errors shared across the samplers, transforms and experiments.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what} exceeds capacity: requested {requested}, cap {cap}")]
    CapacityExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("index out of range: {what} = {got}, valid range {lo}..={hi}")]
    IndexOutOfRange {
        what: &'static str,
        got: usize,
        lo: usize,
        hi: usize,
    },

    #[error("matrix is numerically rank deficient (min |r_ii| = {min_diag:.3e})")]
    RankDeficient { min_diag: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
