// SPDX-License-Identifier: Apache-2.0
//! Leading-order (M ≫ G) SNR formulas for uniform combs and one absorbing line.

use serde::Serialize;

use crate::comb::{ConstraintKind, PowerConstraint};
use crate::constants::photon_energy;
use crate::error::{invalid, Result};
use crate::receivers::{Protocol, ReceiverKind};
use crate::scalar::Real;
use crate::squeezing::{amplified, rotated_pair_variance, SqueezingStructure};

/// Scalar single-line parameters. `b2 = ∞` selects the strong-LO limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolParams<T> {
    pub lines: usize,
    pub a2: T,
    pub b2: T,
    pub gain_a: T,
    pub gain_b: T,
    pub kappa: T,
    pub theta: T,
    pub delta: Option<T>,
}

impl<T: Real> ProtocolParams<T> {
    pub fn symmetric(lines: usize, power: T, gain: T, kappa: T) -> Self {
        Self { lines, a2: power, b2: power, gain_a: gain, gain_b: gain, kappa, theta: T::zero(), delta: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lines < 3 || self.lines % 2 == 0 {
            return Err(invalid("lines", format!("M = {} must be odd and >= 3", self.lines)));
        }
        if !(self.kappa >= T::zero() && self.kappa <= T::one()) {
            return Err(invalid("kappa", format!("{} outside [0, 1]", self.kappa)));
        }
        if !(self.gain_a >= T::one() && self.gain_b >= T::one()) {
            return Err(invalid("gain", "gains must be >= 1"));
        }
        Ok(())
    }

    fn warn_regime(&self) {
        let g = self.gain_a.max(self.gain_b);
        if T::of(self.lines as f64) < T::of(10.0) * g {
            log::warn!("M = {} is not much larger than G = {g}; asymptotic formulas are inaccurate", self.lines);
        }
    }
}

/// Local SNR² from the leading-order formulas.
pub fn asymptotic_snr<T: Real>(protocol: Protocol, params: &ProtocolParams<T>) -> Result<T> {
    protocol.check()?;
    params.validate()?;
    params.warn_regime();
    let (ga, gb) = match protocol.structure {
        SqueezingStructure::Classical => (T::one(), T::one()),
        _ => (params.gain_a, params.gain_b),
    };
    let m = T::of(params.lines as f64);
    let (a2, b2, k) = (params.a2, params.b2, params.kappa);
    Ok(match protocol.receiver {
        ReceiverKind::HeterodyneSubtraction => {
            if b2.is_infinite() {
                a2 * ga / m
            } else {
                a2 * b2 / (m * (a2 / gb + b2 / ga))
            }
        }
        ReceiverKind::DivisionReceiver => {
            let self_beat = (T::of(3.0) + k).powi(2) * (a2 / ga + b2 / gb);
            let mismatch = if protocol.structure == SqueezingStructure::CrossLineEntangled {
                a2 / gb + b2 / ga
            } else {
                a2 * amplified(gb) + b2 * amplified(ga)
            };
            let bracket = self_beat + (T::one() - k).powi(2) * mismatch;
            T::of(16.0) * k * a2 * b2 / (m * bracket)
        }
    })
}

/// Heterodyne intra-line SNR² with every line mismatched by phase δ.
pub fn phase_noise_snr<T: Real>(params: &ProtocolParams<T>) -> Result<T> {
    params.validate()?;
    let d = params.delta.unwrap_or_else(T::zero);
    let m = T::of(params.lines as f64);
    let inv = m / (params.a2 * params.b2)
        * (params.a2 * rotated_pair_variance(params.gain_b, d) + params.b2 * rotated_pair_variance(params.gain_a, d));
    Ok(inv.recip())
}

/// SNR_C*² = PT/(M²ħΩ_c).
pub fn snr_c_star2<T: Real>(budget: T, duration: T, lines: usize, carrier: T) -> T {
    let m = T::of(lines as f64);
    budget * duration / (m * m * photon_energy(carrier))
}

/// Optimal local SNR² under a power constraint, leading order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstrainedOptimum<T> {
    pub snr2: T,
    pub classical_snr2: T,
    pub snr_c_star2: T,
    /// Fraction of the constrained power in comb A.
    pub split: T,
    pub strong_lo: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn constrained_optimal_snr<T: Real>(
    protocol: Protocol,
    constraint: &PowerConstraint<T>,
    gain: T,
    kappa: T,
    lines: usize,
    duration: T,
    carrier: T,
) -> Result<ConstrainedOptimum<T>> {
    protocol.check()?;
    if !(gain >= T::one()) {
        return Err(invalid("gain", "must be >= 1"));
    }
    if !(kappa >= T::zero() && kappa <= T::one()) {
        return Err(invalid("kappa", "outside [0, 1]"));
    }
    let star = snr_c_star2(constraint.budget, duration, lines, carrier);
    let g = if protocol.structure == SqueezingStructure::Classical { T::one() } else { gain };
    let cross = protocol.structure == SqueezingStructure::CrossLineEntangled;
    let rate = |g: T| -> T {
        match (protocol.receiver, constraint.kind) {
            (ReceiverKind::HeterodyneSubtraction, ConstraintKind::SamplePower) => g,
            (ReceiverKind::HeterodyneSubtraction, ConstraintKind::DetectorPower) => g / T::of(2.0),
            (ReceiverKind::DivisionReceiver, _) => {
                let mismatch = if cross { g.recip() } else { amplified(g) };
                T::of(8.0) * kappa / ((T::of(3.0) + kappa).powi(2) / g + (T::one() - kappa).powi(2) * mismatch)
            }
        }
    };
    let strong_lo =
        protocol.receiver == ReceiverKind::HeterodyneSubtraction && constraint.kind == ConstraintKind::SamplePower;
    Ok(ConstrainedOptimum {
        snr2: rate(g) * star,
        classical_snr2: rate(T::one()) * star,
        snr_c_star2: star,
        split: if strong_lo { T::one() } else { T::of(0.5) },
        strong_lo,
    })
}
