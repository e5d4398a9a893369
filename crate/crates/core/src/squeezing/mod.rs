// SPDX-License-Identifier: Apache-2.0
//! Two-mode squeezing structures, pairing rules and scalar variance kernels.

mod covariance;

pub use covariance::{build_covariance, BlockKind, CovBlock, CovarianceModel};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::comb::{line_slot, Field};
use crate::error::{Error, Result};
use crate::receivers::ReceiverKind;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SqueezingStructure {
    Classical,
    /// Pairs centred on each line's own beat partner (division topology).
    IntraSelfReferred,
    /// Pairs centred on the other comb's line (heterodyne topology).
    IntraCrossReferred,
    /// Pairs mirrored about the carrier across the whole comb.
    CrossLineEntangled,
}

impl SqueezingStructure {
    /// The intra-line variant each receiver is analysed with.
    pub fn intra_for(receiver: ReceiverKind) -> Self {
        match receiver {
            ReceiverKind::HeterodyneSubtraction => Self::IntraCrossReferred,
            ReceiverKind::DivisionReceiver => Self::IntraSelfReferred,
        }
    }

    pub fn is_intra(self) -> bool {
        matches!(self, Self::IntraSelfReferred | Self::IntraCrossReferred)
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Classical => "classical",
            Self::IntraSelfReferred => "intra_self",
            Self::IntraCrossReferred => "intra_cross",
            Self::CrossLineEntangled => "cross",
        }
    }
}

/// Squeezing structure plus linear gains G_n for n ∈ [−N, N].
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezingSpec<T> {
    structure: SqueezingStructure,
    gains: Vec<T>,
}

impl<T: Real> SqueezingSpec<T> {
    /// Classical specs have their gains forced to 1.
    pub fn new(structure: SqueezingStructure, gains: Vec<T>) -> Result<Self> {
        if gains.len() % 2 == 0 {
            return Err(Error::DimensionMismatch { expected: gains.len() + 1, got: gains.len() });
        }
        if let Some(g) = gains.iter().find(|g| !(**g >= T::one()) || !g.is_finite()) {
            return Err(Error::GainBelowOne(g.to_f64_lossy()));
        }
        let h = (gains.len() / 2) as i64;
        if structure == SqueezingStructure::CrossLineEntangled {
            for n in 1..=h {
                let (p, m) = (gains[(h + n) as usize], gains[(h - n) as usize]);
                if p != m {
                    return Err(Error::AsymmetricGain { line: n, plus: p.to_f64_lossy(), minus: m.to_f64_lossy() });
                }
            }
        }
        let gains = if structure == SqueezingStructure::Classical { vec![T::one(); gains.len()] } else { gains };
        Ok(Self { structure, gains })
    }

    pub fn uniform(structure: SqueezingStructure, n_half: usize, gain: T) -> Result<Self> {
        Self::new(structure, vec![gain; 2 * n_half + 1])
    }

    pub fn classical(n_half: usize) -> Self {
        Self { structure: SqueezingStructure::Classical, gains: vec![T::one(); 2 * n_half + 1] }
    }

    pub fn structure(&self) -> SqueezingStructure {
        self.structure
    }

    pub fn n_half(&self) -> usize {
        self.gains.len() / 2
    }

    pub fn gains(&self) -> &[T] {
        &self.gains
    }

    /// Gain of line n (1 outside the comb).
    pub fn gain(&self, n: i64) -> T {
        line_slot(n, self.n_half()).map_or(T::one(), |i| self.gains[i])
    }

    pub fn max_gain(&self) -> T {
        self.gains.iter().copied().fold(T::one(), T::max)
    }
}

/// Partner of a lattice site under a pairing rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Partner {
    Mode { line: i64, detuning: i64 },
    /// The site is its own image (pairing centre).
    SelfPaired,
    /// Image falls beyond |k| ≤ 2N.
    OutsideLattice { line: i64, detuning: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairingRule {
    structure: SqueezingStructure,
    field: Field,
    n_half: usize,
}

pub fn pairing_rule(structure: SqueezingStructure, field: Field, n_half: usize) -> Result<PairingRule> {
    if structure == SqueezingStructure::Classical {
        return Err(Error::NoPairing);
    }
    if field == Field::Env {
        return Err(Error::Unsupported("environment modes are never squeezed".into()));
    }
    Ok(PairingRule { structure, field, n_half })
}

impl PairingRule {
    pub fn structure(&self) -> SqueezingStructure {
        self.structure
    }

    /// Image site of (n, k) before the lattice-range check.
    pub fn image(&self, line: i64, detuning: i64) -> (i64, i64) {
        use SqueezingStructure::*;
        let around_line = (line, 2 * line - detuning);
        let around_zero = (line, -detuning);
        match (self.structure, self.field) {
            (CrossLineEntangled, _) => (-line, -detuning),
            (IntraSelfReferred, Field::A) | (IntraCrossReferred, Field::B) => around_line,
            (IntraSelfReferred, _) | (IntraCrossReferred, _) => around_zero,
            (Classical, _) => unreachable!("classical rules are never built"),
        }
    }

    pub fn partner(&self, line: i64, detuning: i64) -> Partner {
        let (l, d) = self.image(line, detuning);
        let h = self.n_half as i64;
        if (l, d) == (line, detuning) {
            Partner::SelfPaired
        } else if l.abs() <= h && d.abs() <= 2 * h {
            Partner::Mode { line: l, detuning: d }
        } else {
            Partner::OutsideLattice { line: l, detuning: d }
        }
    }
}

/// G′ = (G + 1/G)/2.
pub fn amplification_noise<T: Real>(g: T) -> Result<T> {
    if !(g >= T::one()) {
        return Err(Error::GainBelowOne(g.to_f64_lossy()));
    }
    Ok(amplified(g))
}

#[inline]
pub(crate) fn amplified<T: Real>(g: T) -> T {
    (g + g.recip()) / T::of(2.0)
}

/// var(e^{iθ}a₁ + e^{−iθ}a₂†) = [(G²+1) − (G²−1)cos 2θ]/(2G).
pub fn rotated_pair_variance<T: Real>(g: T, theta: T) -> T {
    let g2 = g * g;
    ((g2 + T::one()) - (g2 - T::one()) * (T::of(2.0) * theta).cos()) / (T::of(2.0) * g)
}

/// var(c₁a₁ + c₂a₂†) for a two-mode squeezed pair of gain G.
pub fn pair_variance<T: Real>(g: T, c1: Complex<T>, c2: Complex<T>) -> T {
    ((c1 + c2).norm_sqr() / g + (c1 - c2).norm_sqr() * g) / T::of(4.0)
}
