// SPDX-License-Identifier: Apache-2.0
//! Comb specifications, the double-index noise-mode lattice and power bookkeeping.

use std::ops::RangeInclusive;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::constants::photon_energy;
use crate::error::{invalid, Error, Result};
use crate::receivers::ReceiverKind;
use crate::sample::SampleSpec;
use crate::scalar::Real;

/// Which line spacing a comb uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombRole {
    /// Lines at n(ω_r + Δω_r).
    Signal,
    /// Lines at nω_r.
    LocalOscillator,
}

/// Spacings, carrier and acquisition time shared by both combs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombGeometry<T> {
    pub rep_rate: T,
    pub rep_offset: T,
    pub carrier: T,
    pub duration: T,
}

impl<T: Real> CombGeometry<T> {
    pub fn new(rep_rate: T, rep_offset: T, carrier: T, duration: T) -> Result<Self> {
        let g = Self { rep_rate, rep_offset, carrier, duration };
        if !(rep_rate > T::zero()) {
            return Err(invalid("rep_rate", "must be positive"));
        }
        if !(rep_offset > T::zero()) {
            return Err(invalid("rep_offset", "must be positive"));
        }
        if !(carrier > T::zero()) {
            return Err(invalid("carrier", "must be positive"));
        }
        if !(duration > T::zero()) {
            return Err(invalid("duration", "must be positive"));
        }
        Ok(g)
    }

    /// Geometry for a given carrier with ω_r = 2π·100 MHz and the largest
    /// offset that keeps `n_half` lines non-overlapping with margin two.
    pub fn for_lines(n_half: usize, carrier: T, duration: T) -> Result<Self> {
        let rep = T::of(2.0e8) * T::PI();
        let offset = rep / T::of((4 * n_half + 2) as f64);
        Self::new(rep, offset, carrier, duration)
    }

    /// Checks 2N·Δω_r < ω_r.
    pub fn check_lines(&self, n_half: usize) -> Result<()> {
        if T::of(2.0 * n_half as f64) * self.rep_offset >= self.rep_rate {
            return Err(Error::InvalidComb(format!(
                "2N·Δω_r must stay below ω_r for N = {n_half} (modes would overlap)"
            )));
        }
        Ok(())
    }
}

/// One comb: geometry, role and complex line amplitudes for n ∈ [−N, N].
#[derive(Debug, Clone, PartialEq)]
pub struct CombSpec<T> {
    n_half: usize,
    amplitudes: Vec<Complex<T>>,
    geometry: CombGeometry<T>,
    role: CombRole,
}

impl<T: Real> CombSpec<T> {
    /// `amplitudes[i]` is line `i - N`; the length must be odd.
    pub fn new(role: CombRole, geometry: CombGeometry<T>, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.len() % 2 == 0 {
            return Err(Error::InvalidComb(format!(
                "line count {} must be odd (M = 2N + 1)",
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidComb("non-finite line amplitude".into()));
        }
        let n_half = amplitudes.len() / 2;
        geometry.check_lines(n_half)?;
        Ok(Self { n_half, amplitudes, geometry, role })
    }

    pub fn uniform(role: CombRole, geometry: CombGeometry<T>, n_half: usize, amplitude: Complex<T>) -> Result<Self> {
        Self::new(role, geometry, vec![amplitude; 2 * n_half + 1])
    }

    pub fn n_half(&self) -> usize {
        self.n_half
    }

    /// Number of lines M.
    pub fn lines(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn line_indices(&self) -> RangeInclusive<i64> {
        -(self.n_half as i64)..=self.n_half as i64
    }

    pub fn role(&self) -> CombRole {
        self.role
    }

    pub fn geometry(&self) -> &CombGeometry<T> {
        &self.geometry
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    /// Amplitude of line `n`; zero outside the comb.
    pub fn amplitude(&self, n: i64) -> Complex<T> {
        line_slot(n, self.n_half).map_or(Complex::new(T::zero(), T::zero()), |i| self.amplitudes[i])
    }

    pub fn line_frequency(&self, n: i64) -> T {
        let spacing = match self.role {
            CombRole::Signal => self.geometry.rep_rate + self.geometry.rep_offset,
            CombRole::LocalOscillator => self.geometry.rep_rate,
        };
        T::of(n as f64) * spacing
    }

    pub fn is_real(&self) -> bool {
        self.amplitudes.iter().all(|a| a.im == T::zero())
    }

    pub fn with_amplitudes(&self, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        Self::new(self.role, self.geometry, amplitudes)
    }

    pub fn scaled(&self, c: T) -> Self {
        let amplitudes = self.amplitudes.iter().map(|a| a * c).collect();
        Self { amplitudes, ..self.clone() }
    }
}

pub(crate) fn line_slot(n: i64, n_half: usize) -> Option<usize> {
    let h = n_half as i64;
    (-h..=h).contains(&n).then(|| (n + h) as usize)
}

/// Mode families of the lattice, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    /// Noise of comb A (signal).
    A,
    /// Noise of comb B (local oscillator).
    B,
    /// Environment coupled in by sample loss.
    Env,
}

/// Lattice site (n, k): sideband k·Δω_r around line n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeId {
    pub field: Field,
    pub line: i64,
    pub detuning: i64,
}

impl ModeId {
    pub const fn new(field: Field, line: i64, detuning: i64) -> Self {
        Self { field, line, detuning }
    }
}

/// Index set n ∈ [−N, N], k ∈ [−2N, 2N] for each of A, B and the environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeLattice {
    n_half: usize,
}

impl ModeLattice {
    pub fn new(n_half: usize) -> Self {
        Self { n_half }
    }

    pub fn n_half(&self) -> usize {
        self.n_half
    }

    pub fn lines(&self) -> usize {
        2 * self.n_half + 1
    }

    pub fn detunings(&self) -> usize {
        4 * self.n_half + 1
    }

    /// Sites per field.
    pub fn block_len(&self) -> usize {
        self.lines() * self.detunings()
    }

    /// Comb noise modes (A and B).
    pub fn comb_modes(&self) -> usize {
        2 * self.block_len()
    }

    /// All modes including the environment block.
    pub fn len(&self) -> usize {
        3 * self.block_len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, line: i64, detuning: i64) -> bool {
        let h = self.n_half as i64;
        line.abs() <= h && detuning.abs() <= 2 * h
    }

    pub fn index(&self, id: ModeId) -> Option<usize> {
        if !self.contains(id.line, id.detuning) {
            return None;
        }
        let h = self.n_half as i64;
        let block = match id.field {
            Field::A => 0,
            Field::B => 1,
            Field::Env => 2,
        };
        let row = (id.line + h) as usize;
        let col = (id.detuning + 2 * h) as usize;
        Some(block * self.block_len() + row * self.detunings() + col)
    }

    pub fn mode(&self, index: usize) -> ModeId {
        assert!(index < self.len(), "mode index {index} out of range");
        let h = self.n_half as i64;
        let field = [Field::A, Field::B, Field::Env][index / self.block_len()];
        let r = index % self.block_len();
        let line = (r / self.detunings()) as i64 - h;
        let detuning = (r % self.detunings()) as i64 - 2 * h;
        ModeId { field, line, detuning }
    }

    pub fn iter(&self) -> impl Iterator<Item = ModeId> + '_ {
        (0..self.len()).map(|i| self.mode(i))
    }

    /// Offset from the carrier, nω_r + kΔω_r.
    pub fn absolute_frequency<T: Real>(&self, line: i64, detuning: i64, geometry: &CombGeometry<T>) -> T {
        T::of(line as f64) * geometry.rep_rate + T::of(detuning as f64) * geometry.rep_offset
    }
}

pub fn build_mode_lattice(n_half: usize) -> ModeLattice {
    ModeLattice::new(n_half)
}

/// Optical power (ħΩ_c/T)·Σ|X_n|².
pub fn comb_power<T: Real>(comb: &CombSpec<T>) -> T {
    let g = comb.geometry();
    let photons: T = comb.amplitudes().iter().map(|a| a.norm_sqr()).sum();
    photon_energy(g.carrier) * photons / g.duration
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    /// Power that reaches the sample.
    SamplePower,
    /// Total power on the detectors.
    DetectorPower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerConstraint<T> {
    pub kind: ConstraintKind,
    /// Watts.
    pub budget: T,
}

impl<T: Real> PowerConstraint<T> {
    pub fn new(kind: ConstraintKind, budget: T) -> Result<Self> {
        if !(budget > T::zero()) || !budget.is_finite() {
            return Err(invalid("power budget", "must be positive and finite"));
        }
        Ok(Self { kind, budget })
    }
}

/// How the per-line photon budget constrains the two combs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetForm {
    /// |A|² is fixed, |B|² is free.
    SignalOnly,
    /// (|A|² + |B|²)/2 is fixed.
    Mean,
}

/// Budget equation returned by [`amplitude_from_constraint`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeBudget<T> {
    pub form: BudgetForm,
    /// PT/(MħΩ_c).
    pub per_line: T,
}

impl<T: Real> AmplitudeBudget<T> {
    /// (|A|², |B|²) for fraction f of the constrained power placed in comb A.
    /// Under [`BudgetForm::SignalOnly`] the LO is unconstrained and returned as `None`.
    pub fn split(&self, f: T) -> Result<(T, Option<T>)> {
        if !(f >= T::zero() && f <= T::one()) {
            return Err(invalid("split", format!("fraction {f} must lie in [0, 1]")));
        }
        Ok(match self.form {
            BudgetForm::SignalOnly => (self.per_line * f, None),
            BudgetForm::Mean => {
                let total = T::of(2.0) * self.per_line;
                (total * f, Some(total * (T::one() - f)))
            }
        })
    }

    /// |A|² = |B|², saturating the budget.
    pub fn symmetric(&self) -> (T, T) {
        (self.per_line, self.per_line)
    }
}

pub fn amplitude_from_constraint<T: Real>(
    constraint: &PowerConstraint<T>,
    receiver: ReceiverKind,
    lines: usize,
    duration: T,
    carrier: T,
) -> Result<AmplitudeBudget<T>> {
    if lines == 0 {
        return Err(invalid("lines", "must be positive"));
    }
    if !(duration > T::zero()) {
        return Err(invalid("duration", "must be positive"));
    }
    if !(constraint.budget > T::zero()) {
        return Err(invalid("power budget", "must be positive"));
    }
    if !(carrier > T::zero()) {
        return Err(invalid("carrier", "must be positive"));
    }
    let per_line = constraint.budget * duration / (T::of(lines as f64) * photon_energy(carrier));
    let form = match (constraint.kind, receiver) {
        (ConstraintKind::SamplePower, ReceiverKind::HeterodyneSubtraction) => BudgetForm::SignalOnly,
        _ => BudgetForm::Mean,
    };
    Ok(AmplitudeBudget { form, per_line })
}

/// Line amplitudes after the sample: √κ_n e^{iθ_n} X_n.
pub fn mean_field_after_sample<T: Real>(comb: &CombSpec<T>, sample: &SampleSpec<T>) -> Result<Vec<Complex<T>>> {
    if sample.n_half() != comb.n_half() {
        return Err(Error::DimensionMismatch { expected: comb.n_half(), got: sample.n_half() });
    }
    Ok(comb
        .line_indices()
        .map(|n| Complex::from_polar(sample.kappa(n).sqrt(), sample.theta(n)) * comb.amplitude(n))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::carrier_from_wavelength;
    use crate::sample::single_line_sample;
    use std::collections::HashSet;

    fn geom(n_half: usize) -> CombGeometry<f64> {
        CombGeometry::for_lines(n_half, carrier_from_wavelength(1563e-9), 1.0).unwrap()
    }

    #[test]
    fn lattice_counts() {
        assert_eq!(build_mode_lattice(0).comb_modes(), 2);
        assert_eq!(build_mode_lattice(0).len(), 3);
        let l1 = build_mode_lattice(1);
        assert_eq!(l1.block_len(), 15);
        assert_eq!(l1.comb_modes(), 30);
        assert_eq!(build_mode_lattice(8).block_len(), 561);
    }

    #[test]
    fn lattice_index_roundtrip() {
        let l = build_mode_lattice(3);
        for (i, id) in l.iter().enumerate() {
            assert_eq!(l.index(id), Some(i));
        }
        assert_eq!(l.index(ModeId::new(Field::A, 0, 13)), None);
        assert_eq!(l.mode(0), ModeId::new(Field::A, -3, -6));
        assert_eq!(l.mode(l.block_len()).field, Field::B);
    }

    #[test]
    fn frequencies_are_unique() {
        let n = 4;
        let l = build_mode_lattice(n);
        let g = geom(n);
        let mut seen = HashSet::new();
        for id in l.iter().filter(|m| m.field == Field::A) {
            let f = l.absolute_frequency(id.line, id.detuning, &g);
            assert!(seen.insert(f.to_bits()), "duplicate frequency at {id:?}");
        }
    }

    #[test]
    fn power_of_uniform_comb() {
        let g = geom(1);
        let c = CombSpec::uniform(CombRole::Signal, g, 1, Complex::new(1.0, 0.0)).unwrap();
        let e = photon_energy(g.carrier);
        assert!((comb_power(&c) - 3.0 * e).abs() < 1e-30);
        assert_eq!(comb_power(&c.scaled(0.0)), 0.0);
    }

    #[test]
    fn fig_power_and_budget() {
        let carrier = carrier_from_wavelength(1563e-9);
        let g = geom(500);
        let a2: f64 = 1.179e14;
        let c = CombSpec::uniform(CombRole::Signal, g, 500, Complex::new(a2.sqrt(), 0.0)).unwrap();
        assert!((comb_power(&c) - 0.015).abs() < 2e-5);
        let pc = PowerConstraint::new(ConstraintKind::SamplePower, 0.015_f64).unwrap();
        let b = amplitude_from_constraint(&pc, ReceiverKind::HeterodyneSubtraction, 1001, 1.0, carrier).unwrap();
        assert_eq!(b.form, BudgetForm::SignalOnly);
        assert!((b.per_line / 1.179e14 - 1.0).abs() < 1e-3);
        let d = amplitude_from_constraint(&pc, ReceiverKind::DivisionReceiver, 1001, 1.0, carrier).unwrap();
        assert_eq!(d.form, BudgetForm::Mean);
        assert_eq!(d.symmetric(), (d.per_line, d.per_line));
        let pc2 = PowerConstraint::new(ConstraintKind::SamplePower, 0.030_f64).unwrap();
        let b2 = amplitude_from_constraint(&pc2, ReceiverKind::HeterodyneSubtraction, 1001, 1.0, carrier).unwrap();
        assert!((b2.per_line / b.per_line - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(PowerConstraint::new(ConstraintKind::DetectorPower, 0.0).is_err());
        let pc = PowerConstraint::new(ConstraintKind::DetectorPower, 1.0).unwrap();
        assert!(amplitude_from_constraint(&pc, ReceiverKind::DivisionReceiver, 0, 1.0, 1.0).is_err());
        assert!(amplitude_from_constraint(&pc, ReceiverKind::DivisionReceiver, 3, -1.0, 1.0).is_err());
        let g = geom(1);
        assert!(CombSpec::new(CombRole::Signal, g, vec![Complex::new(1.0, 0.0); 4]).is_err());
        let tight = CombGeometry::new(1.0, 0.5, 1.0, 1.0).unwrap();
        assert!(CombSpec::uniform(CombRole::Signal, tight, 1, Complex::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn mean_field_examples() {
        let g = geom(2);
        let c = CombSpec::uniform(CombRole::Signal, g, 2, Complex::new(2.0, 0.0)).unwrap();
        let s = single_line_sample(2, 1, 0.25, std::f64::consts::FRAC_PI_2).unwrap();
        let out = mean_field_after_sample(&c, &s).unwrap();
        assert!((out[3] - Complex::new(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(out[0], Complex::new(2.0, 0.0));
        let s0 = single_line_sample(2, -1, 0.0, 0.0).unwrap();
        assert_eq!(mean_field_after_sample(&c, &s0).unwrap()[1], Complex::new(0.0, 0.0));
    }
}
