use thiserror::Error;

/// Errors raised by the statistics and resampling routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("conditioning depth must be at least 1")]
    ZeroDepth,
    #[error("shot string is empty")]
    EmptyString,
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("significance level {0} is outside (0, 1)")]
    InvalidAlpha(f64),
    #[error("resample count must be at least 1")]
    ZeroResamples,
    #[error("hit count {hits} exceeds string length {length}")]
    InvalidHitCount { length: usize, hits: usize },
    #[error("null model {0} cannot be used here")]
    WrongNullModel(&'static str),
    /// `C(length, hits)` arrangements is more than the enumeration cap allows.
    #[error("exact enumeration of C({length}, {hits}) arrangements exceeds the cap of {cap}")]
    CapExceeded { length: usize, hits: usize, cap: u64 },
}
