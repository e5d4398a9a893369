// SPDX-License-Identifier: Apache-2.0
//! Noise and SNR model for dual-comb absorption spectroscopy with squeezed
//! frequency combs.
//!
//! The physics is generic over the scalar type; the aliases below fix it to
//! `f64`, which is what the Monte Carlo oracle and the CLI use.

// Negated comparisons reject NaN inputs.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod comb;
pub mod constants;
pub mod error;
pub mod oracle;
pub mod receivers;
pub mod sample;
pub mod scalar;
pub mod snr;
pub mod squeezing;

pub use error::{Error, Result};
pub use receivers::{Protocol, ReceiverKind};
pub use scalar::Real;
pub use squeezing::SqueezingStructure;

pub type CombGeometry = comb::CombGeometry<f64>;
pub type CombSpec = comb::CombSpec<f64>;
pub type PowerConstraint = comb::PowerConstraint<f64>;
pub type AmplitudeBudget = comb::AmplitudeBudget<f64>;
pub type SampleSpec = sample::SampleSpec<f64>;
pub type SqueezingSpec = squeezing::SqueezingSpec<f64>;
pub type CovarianceModel = squeezing::CovarianceModel<f64>;
pub type Experiment = receivers::Experiment<f64>;
pub type NoiseCoefficients = receivers::NoiseCoefficients<f64>;
pub type PhotocurrentStats = receivers::PhotocurrentStats<f64>;
pub type LineScenario = snr::LineScenario<f64>;
pub type RunSpec = snr::RunSpec<f64>;
pub type SnrReport = snr::SnrReport<f64>;
pub type ProtocolParams = snr::ProtocolParams<f64>;
