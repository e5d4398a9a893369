// SPDX-License-Identifier: Apache-2.0
//! Heterodyne-subtraction and division receivers: means, linearised noise
//! coefficients, closed-form variances and photocurrent statistics.

mod closed_form;
mod coefficients;
mod mean;
mod stats;

pub use closed_form::{numerator_closed_form, variance_as_printed, variance_closed_form, variance_strong_lo, FormVariant};
pub use coefficients::{noise_coefficients, noise_coefficients_strong_lo, noise_coefficients_with_ratio, NoiseCoefficients};
pub use mean::{differential_mean, mean_spectrum, ratio_mean, RatioMean};
pub use stats::{differential_statistics, differential_statistics_strong_lo, ratio_statistics, statistics, PhotocurrentStats, StatContext, StatMethod};

use serde::{Deserialize, Serialize};

use crate::comb::CombSpec;
use crate::error::{Error, Result};
use crate::sample::SampleSpec;
use crate::scalar::Real;
use crate::squeezing::{SqueezingSpec, SqueezingStructure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReceiverKind {
    /// Signal probes the sample, then beats with the LO (pass-then-combine).
    HeterodyneSubtraction,
    /// Combs are mixed first, one output probes the sample (combine-then-pass).
    DivisionReceiver,
}

impl ReceiverKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::HeterodyneSubtraction => "heterodyne",
            Self::DivisionReceiver => "division",
        }
    }
}

/// Post-processing of the two detector spectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Processing {
    Subtraction,
    Division,
}

/// Only subtraction after heterodyne and division after combine-then-pass are modelled.
pub fn check_processing(receiver: ReceiverKind, processing: Processing) -> Result<()> {
    match (receiver, processing) {
        (ReceiverKind::HeterodyneSubtraction, Processing::Subtraction)
        | (ReceiverKind::DivisionReceiver, Processing::Division) => Ok(()),
        (ReceiverKind::HeterodyneSubtraction, Processing::Division) => Err(Error::Unsupported(
            "dividing the two heterodyne detector spectra cancels the sample response: both carry the same \
             √κ-weighted beat with opposite sign, so the ratio is -1 regardless of absorption"
                .into(),
        )),
        (ReceiverKind::DivisionReceiver, Processing::Subtraction) => Err(Error::Unsupported(
            "subtraction after combine-then-pass is not modelled; only the self-calibrating ratio is".into(),
        )),
    }
}

/// Receiver plus squeezing structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Protocol {
    pub receiver: ReceiverKind,
    pub structure: SqueezingStructure,
}

impl Protocol {
    pub fn new(receiver: ReceiverKind, structure: SqueezingStructure) -> Result<Self> {
        let p = Self { receiver, structure };
        p.check()?;
        Ok(p)
    }

    /// Intra-line squeezing in the variant the receiver uses.
    pub fn intra(receiver: ReceiverKind) -> Self {
        Self { receiver, structure: SqueezingStructure::intra_for(receiver) }
    }

    pub fn cross(receiver: ReceiverKind) -> Self {
        Self { receiver, structure: SqueezingStructure::CrossLineEntangled }
    }

    pub fn classical(receiver: ReceiverKind) -> Self {
        Self { receiver, structure: SqueezingStructure::Classical }
    }

    /// The four analysed quantum protocols.
    pub fn quantum_four() -> [Self; 4] {
        use ReceiverKind::*;
        [Self::intra(HeterodyneSubtraction), Self::cross(HeterodyneSubtraction), Self::intra(DivisionReceiver), Self::cross(DivisionReceiver)]
    }

    pub fn check(&self) -> Result<()> {
        use SqueezingStructure::*;
        match (self.receiver, self.structure) {
            (_, Classical) | (_, CrossLineEntangled) => Ok(()),
            (ReceiverKind::HeterodyneSubtraction, IntraCrossReferred) => Ok(()),
            (ReceiverKind::DivisionReceiver, IntraSelfReferred) => Ok(()),
            (r, s) => Err(Error::Unsupported(format!(
                "{} receiver with {} squeezing is not an analysed combination",
                r.label(),
                s.label()
            ))),
        }
    }

    pub fn label(&self) -> String {
        format!("{}+{}", self.receiver.label(), self.structure.label())
    }
}

/// Both combs, their squeezing and the sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment<T: Real> {
    pub signal: CombSpec<T>,
    pub lo: CombSpec<T>,
    pub sqz_signal: SqueezingSpec<T>,
    pub sqz_lo: SqueezingSpec<T>,
    pub sample: SampleSpec<T>,
}

impl<T: Real> Experiment<T> {
    pub fn new(
        signal: CombSpec<T>,
        lo: CombSpec<T>,
        sqz_signal: SqueezingSpec<T>,
        sqz_lo: SqueezingSpec<T>,
        sample: SampleSpec<T>,
    ) -> Result<Self> {
        let n = signal.n_half();
        for got in [lo.n_half(), sqz_signal.n_half(), sqz_lo.n_half(), sample.n_half()] {
            if got != n {
                return Err(Error::DimensionMismatch { expected: n, got });
            }
        }
        Ok(Self { signal, lo, sqz_signal, sqz_lo, sample })
    }

    pub fn n_half(&self) -> usize {
        self.signal.n_half()
    }

    /// Replaces both squeezing specs, keeping combs and sample.
    pub fn with_squeezing(&self, sqz_signal: SqueezingSpec<T>, sqz_lo: SqueezingSpec<T>) -> Result<Self> {
        Self::new(self.signal.clone(), self.lo.clone(), sqz_signal, sqz_lo, self.sample.clone())
    }

    pub fn with_sample(&self, sample: SampleSpec<T>) -> Result<Self> {
        Self::new(self.signal.clone(), self.lo.clone(), self.sqz_signal.clone(), self.sqz_lo.clone(), sample)
    }

    /// Both specs must be `structure` or classical for a closed form to apply.
    pub(crate) fn check_structure(&self, structure: SqueezingStructure) -> Result<()> {
        for (name, s) in [("signal", &self.sqz_signal), ("LO", &self.sqz_lo)] {
            let st = s.structure();
            if st != structure && st != SqueezingStructure::Classical {
                return Err(Error::Unsupported(format!(
                    "{name} comb is squeezed as {} but the formula assumes {}",
                    st.label(),
                    structure.label()
                )));
            }
        }
        Ok(())
    }
}

pub(crate) fn check_beat(m: i64, n_half: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::DcBeat);
    }
    if m.unsigned_abs() as usize > n_half {
        return Err(Error::LineOutOfRange { line: m, n_half });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn processing_rejections() {
        assert!(check_processing(ReceiverKind::HeterodyneSubtraction, Processing::Subtraction).is_ok());
        assert!(check_processing(ReceiverKind::DivisionReceiver, Processing::Division).is_ok());
        assert!(check_processing(ReceiverKind::HeterodyneSubtraction, Processing::Division).is_err());
        assert!(check_processing(ReceiverKind::DivisionReceiver, Processing::Subtraction).is_err());
    }

    #[test]
    fn protocol_combinations() {
        for p in Protocol::quantum_four() {
            assert!(p.check().is_ok());
        }
        assert!(Protocol::new(ReceiverKind::DivisionReceiver, SqueezingStructure::IntraCrossReferred).is_err());
        assert_eq!(Protocol::intra(ReceiverKind::DivisionReceiver).label(), "division+intra_self");
    }
}
