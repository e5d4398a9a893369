// SPDX-License-Identifier: Apache-2.0
//! Single-absorption-line scenario on uniform real combs, evaluated exactly.

use num_complex::Complex;
use serde::Serialize;

use crate::comb::{CombGeometry, CombRole, CombSpec};
use crate::error::{Error, Result};
use crate::receivers::{
    differential_statistics, differential_statistics_strong_lo, ratio_statistics, Experiment, PhotocurrentStats,
    Protocol, ReceiverKind, StatContext,
};
use crate::sample::single_line_sample;
use crate::scalar::Real;
use crate::squeezing::{SqueezingSpec, SqueezingStructure};

use super::{global_snr, local_snr};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LoPower<T> {
    /// |B|² per line.
    Finite(T),
    /// |B|² → ∞; statistics are per unit LO amplitude.
    StrongLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineScenario<T> {
    pub protocol: Protocol,
    pub n_half: usize,
    /// Absorbing line m.
    pub line: i64,
    pub kappa: T,
    pub theta: T,
    /// Phase θ_n on every line other than m.
    pub background_theta: T,
    /// Environment occupation E on every line.
    pub thermal: T,
    pub gain_signal: T,
    pub gain_lo: T,
    /// |A|² per line.
    pub a2: T,
    pub lo: LoPower<T>,
}

impl<T: Real> LineScenario<T> {
    pub fn lines(&self) -> usize {
        2 * self.n_half + 1
    }

    /// Same scenario with unit gains and no squeezing.
    pub fn classical(&self) -> Self {
        Self {
            protocol: Protocol::classical(self.protocol.receiver),
            gain_signal: T::one(),
            gain_lo: T::one(),
            ..*self
        }
    }

    pub fn with_kappa(&self, kappa: T) -> Self {
        Self { kappa, ..*self }
    }

    pub fn with_powers(&self, a2: T, lo: LoPower<T>) -> Self {
        Self { a2, lo, ..*self }
    }

    pub fn experiment(&self) -> Result<Experiment<T>> {
        self.protocol.check()?;
        let geometry = CombGeometry::for_lines(self.n_half, T::of(1.2e15), T::one())?;
        let b = match self.lo {
            LoPower::Finite(b2) => b2.sqrt(),
            LoPower::StrongLimit => T::one(),
        };
        let zero = T::zero();
        let signal = CombSpec::uniform(CombRole::Signal, geometry, self.n_half, Complex::new(self.a2.sqrt(), zero))?;
        let lo = CombSpec::uniform(CombRole::LocalOscillator, geometry, self.n_half, Complex::new(b, zero))?;
        let st = self.protocol.structure;
        let sqz = |g: T| -> Result<SqueezingSpec<T>> {
            if st == SqueezingStructure::Classical {
                Ok(SqueezingSpec::classical(self.n_half))
            } else {
                SqueezingSpec::uniform(st, self.n_half, g)
            }
        };
        let mut sample = single_line_sample(self.n_half, self.line, self.kappa, self.theta)?.with_uniform_thermal(self.thermal)?;
        if self.background_theta != T::zero() {
            let mut phases = vec![self.background_theta; self.lines()];
            phases[(self.line + self.n_half as i64) as usize] = self.theta;
            sample = sample.with_phases(phases)?;
        }
        Experiment::new(signal, lo, sqz(self.gain_signal)?, sqz(self.gain_lo)?, sample)
    }

    pub fn stats(&self) -> Result<PhotocurrentStats<T>> {
        let exp = self.experiment()?;
        let st = self.protocol.structure;
        match (self.protocol.receiver, self.lo) {
            (ReceiverKind::DivisionReceiver, LoPower::Finite(_)) => ratio_statistics(&exp, st, self.line),
            (ReceiverKind::DivisionReceiver, LoPower::StrongLimit) => {
                Err(Error::Unsupported("the division receiver has no strong-LO limit".into()))
            }
            (ReceiverKind::HeterodyneSubtraction, LoPower::Finite(_)) => differential_statistics(&exp, st, self.line),
            (ReceiverKind::HeterodyneSubtraction, LoPower::StrongLimit) => {
                differential_statistics_strong_lo(&exp, st, self.line)
            }
        }
    }

    pub fn local_snr2(&self) -> Result<T> {
        local_snr(&self.stats()?)
    }

    pub fn global_snr2(&self) -> Result<T> {
        global_snr(&self.stats()?, &self.with_kappa(T::one()).stats()?)
    }

    /// Local SNR² per unit κ_m for the division receiver (finite at κ_m = 0),
    /// local SNR² otherwise. Ratios of this score equal ratios of local SNR².
    pub fn local_score(&self) -> Result<T> {
        let s = self.stats()?;
        if !(s.variance > T::zero()) {
            return Err(Error::ZeroVariance);
        }
        Ok(match s.context {
            StatContext::Ratio(rm) => T::of(4.0) * rm.c_plus.norm_sqr() / s.variance,
            StatContext::Differential { .. } => s.slope.norm_sqr() / s.variance,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::db_to_linear;

    fn scen(protocol: Protocol, kappa: f64, g: f64, lo: LoPower<f64>) -> LineScenario<f64> {
        LineScenario { protocol, n_half: 50, line: 7, kappa, theta: 0.0, background_theta: 0.0, thermal: 0.0, gain_signal: g, gain_lo: g, a2: 1e6, lo }
    }

    #[test]
    fn classical_heterodyne_lossless() {
        let s = scen(Protocol::classical(ReceiverKind::HeterodyneSubtraction), 1.0, 1.0, LoPower::Finite(4e6));
        let inv = 1.0 / s.local_snr2().unwrap();
        assert!((inv / (101.0 * (1.0 / 1e6 + 1.0 / 4e6)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn division_cross_lossless_gain() {
        let g = db_to_linear(15.0);
        let s = scen(Protocol::cross(ReceiverKind::DivisionReceiver), 1.0, g, LoPower::Finite(1e6));
        let v = s.local_snr2().unwrap();
        assert!((v / (g * 1e6 / (2.0 * 101.0)) - 1.0).abs() < 1e-12, "{v}");
        assert_eq!(s.with_kappa(0.0).local_snr2().unwrap(), 0.0);
        assert!(s.with_kappa(0.0).local_score().unwrap() > 0.0);
    }

    #[test]
    fn strong_lo_limit_matches_large_lo() {
        let g = 5.0;
        let p = Protocol::cross(ReceiverKind::HeterodyneSubtraction);
        let strong = scen(p, 0.4, g, LoPower::StrongLimit).local_snr2().unwrap();
        let big = scen(p, 0.4, g, LoPower::Finite(1e16)).local_snr2().unwrap();
        assert!((strong / big - 1.0).abs() < 1e-8, "{strong} {big}");
        assert!(scen(Protocol::classical(ReceiverKind::DivisionReceiver), 0.4, 1.0, LoPower::StrongLimit).stats().is_err());
    }
}
