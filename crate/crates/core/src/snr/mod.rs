// SPDX-License-Identifier: Apache-2.0
//! Local/global SNR, asymptotic and power-constrained optima, split optimisation.

mod asymptotic;
mod optimize;
mod report;
mod scenario;

pub use asymptotic::{asymptotic_snr, constrained_optimal_snr, phase_noise_snr, snr_c_star2, ConstrainedOptimum, ProtocolParams};
pub use optimize::{golden_section_max, optimize_power_split, Objective, SplitSearch, PRE_GRID};
pub use report::{evaluate_asymptotic, evaluate_constrained, Allocation, Baseline, Method, RunSpec, SnrReport};
pub use scenario::{LineScenario, LoPower};

use crate::error::{Error, Result};
use crate::receivers::{PhotocurrentStats, ReceiverKind};
use crate::scalar::Real;

/// Fisher-form SNR² = |∂μ/∂√κ_m|²/σ².
pub fn local_snr<T: Real>(stats: &PhotocurrentStats<T>) -> Result<T> {
    if !(stats.variance > T::zero()) {
        return Err(Error::ZeroVariance);
    }
    Ok(stats.slope.norm_sqr() / stats.variance)
}

/// Finite-difference SNR² = |μ(κ) − μ(1)|²/σ²(κ).
pub fn global_snr<T: Real>(at_kappa: &PhotocurrentStats<T>, at_unity: &PhotocurrentStats<T>) -> Result<T> {
    if !(at_kappa.variance > T::zero()) {
        return Err(Error::ZeroVariance);
    }
    Ok((at_kappa.mean - at_unity.mean).norm_sqr() / at_kappa.variance)
}

/// c_{l→g}(κ) for the single-line scenario.
pub fn local_to_global<T: Real>(receiver: ReceiverKind, kappa: T) -> T {
    match receiver {
        ReceiverKind::DivisionReceiver => (kappa - T::one()).powi(2) / (T::of(4.0) * kappa),
        ReceiverKind::HeterodyneSubtraction => (kappa.sqrt() - T::one()).powi(2),
    }
}
