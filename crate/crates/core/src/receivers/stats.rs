// SPDX-License-Identifier: Apache-2.0
use num_complex::Complex;
use serde::Serialize;

use crate::error::Result;
use crate::scalar::Real;
use crate::squeezing::SqueezingStructure;

use super::closed_form::{variance_closed_form, variance_strong_lo};
use super::{differential_mean, ratio_mean, Experiment, Protocol, RatioMean, ReceiverKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StatMethod {
    ClosedForm,
    OracleQuadraticForm,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StatContext<T> {
    Ratio(RatioMean<T>),
    Differential { strong_lo: bool },
}

/// Mean and variance of the receiver statistic at one beat index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhotocurrentStats<T> {
    pub m: i64,
    pub receiver: ReceiverKind,
    pub mean: Complex<T>,
    pub variance: T,
    /// ∂mean/∂√κ_m.
    pub slope: Complex<T>,
    pub method: StatMethod,
    pub context: StatContext<T>,
}

/// Division receiver: r̂_m = −I_A/I_B.
pub fn ratio_statistics<T: Real>(exp: &Experiment<T>, structure: SqueezingStructure, m: i64) -> Result<PhotocurrentStats<T>> {
    let protocol = Protocol::new(ReceiverKind::DivisionReceiver, structure)?;
    let rm = ratio_mean(&exp.signal, &exp.lo, &exp.sample, m)?;
    let variance = variance_closed_form(protocol, exp, m)?;
    Ok(PhotocurrentStats {
        m,
        receiver: ReceiverKind::DivisionReceiver,
        mean: rm.ratio,
        variance,
        slope: rm.c_plus * (T::of(2.0) * exp.sample.kappa(m).sqrt()),
        method: StatMethod::ClosedForm,
        context: StatContext::Ratio(rm),
    })
}

/// Heterodyne receiver: d̂_m = I_A − I_B with a finite LO.
pub fn differential_statistics<T: Real>(
    exp: &Experiment<T>,
    structure: SqueezingStructure,
    m: i64,
) -> Result<PhotocurrentStats<T>> {
    let protocol = Protocol::new(ReceiverKind::HeterodyneSubtraction, structure)?;
    let variance = variance_closed_form(protocol, exp, m)?;
    het_stats(exp, m, variance, false)
}

/// Heterodyne receiver in the strong-LO limit; mean and variance are per unit LO
/// amplitude and `exp.lo` is the LO profile.
pub fn differential_statistics_strong_lo<T: Real>(
    exp: &Experiment<T>,
    structure: SqueezingStructure,
    m: i64,
) -> Result<PhotocurrentStats<T>> {
    let protocol = Protocol::new(ReceiverKind::HeterodyneSubtraction, structure)?;
    let variance = variance_strong_lo(protocol, exp, m)?;
    het_stats(exp, m, variance, true)
}

fn het_stats<T: Real>(exp: &Experiment<T>, m: i64, variance: T, strong_lo: bool) -> Result<PhotocurrentStats<T>> {
    let mean = differential_mean(&exp.signal, &exp.lo, &exp.sample, m)?;
    let slope = Complex::from_polar(T::one(), exp.sample.theta(m)) * exp.signal.amplitude(m) * exp.lo.amplitude(m).conj();
    Ok(PhotocurrentStats {
        m,
        receiver: ReceiverKind::HeterodyneSubtraction,
        mean,
        variance,
        slope,
        method: StatMethod::ClosedForm,
        context: StatContext::Differential { strong_lo },
    })
}

/// Dispatches on the protocol's receiver.
pub fn statistics<T: Real>(protocol: Protocol, exp: &Experiment<T>, m: i64) -> Result<PhotocurrentStats<T>> {
    match protocol.receiver {
        ReceiverKind::DivisionReceiver => ratio_statistics(exp, protocol.structure, m),
        ReceiverKind::HeterodyneSubtraction => differential_statistics(exp, protocol.structure, m),
    }
}
