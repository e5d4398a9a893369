// SPDX-License-Identifier: Apache-2.0
use thiserror::Error;

/// Errors raised by input validation and the receiver/SNR computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid comb: {0}")]
    InvalidComb(String),
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("transmissivity {value} on line {line} is outside [0, 1]")]
    Transmissivity { line: i64, value: f64 },
    #[error("line {line} is outside [-{n_half}, {n_half}]")]
    LineOutOfRange { line: i64, n_half: usize },
    #[error("beat index m = 0 is the filtered DC component")]
    DcBeat,
    #[error("squeezing gain {0} is below 1")]
    GainBelowOne(f64),
    #[error("cross-line pairing needs G(n) = G(-n); line {line} has {plus} vs {minus}")]
    AsymmetricGain { line: i64, plus: f64, minus: f64 },
    #[error("no pairing: classical combs carry no two-mode squeezing")]
    NoPairing,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("ratio undefined: A_m B_m* + A_-m* B_-m vanishes at m = {0}")]
    RatioUndefined(i64),
    #[error("unsupported protocol: {0}")]
    Unsupported(String),
    #[error("no closed form: {0}")]
    NoClosedForm(String),
    #[error("variance is zero, SNR undefined")]
    ZeroVariance,
    #[error("covariance block is not positive definite")]
    NotPositiveDefinite,
    #[error("empty feasible set: {0}")]
    EmptyFeasibleSet(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
