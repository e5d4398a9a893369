// SPDX-License-Identifier: Apache-2.0
//! Per-line phase-loss channel with a thermal environment.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::comb::line_slot;
use crate::constants::{BOLTZMANN, HBAR};
use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Transmissivity κ_n, phase θ_n and environment occupation E_n per line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    into = "SampleTable<T>",
    try_from = "SampleTable<T>",
    bound = "T: Real + Serialize + DeserializeOwned"
)]
pub struct SampleSpec<T: Real> {
    n_half: usize,
    kappa: Vec<T>,
    theta: Vec<T>,
    thermal: Vec<T>,
}

impl<T: Real> SampleSpec<T> {
    pub fn new(kappa: Vec<T>, theta: Vec<T>, thermal: Vec<T>) -> Result<Self> {
        let len = kappa.len();
        if len % 2 == 0 {
            return Err(invalid("kappa", format!("length {len} must be odd")));
        }
        for (name, v) in [("theta", &theta), ("thermal", &thermal)] {
            if v.len() != len {
                return Err(invalid(name, format!("length {} differs from kappa length {len}", v.len())));
            }
        }
        let n_half = len / 2;
        for (i, &k) in kappa.iter().enumerate() {
            if !(k >= T::zero() && k <= T::one()) {
                return Err(Error::Transmissivity { line: i as i64 - n_half as i64, value: k.to_f64_lossy() });
            }
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(invalid("theta", "must be finite"));
        }
        if thermal.iter().any(|e| !(*e >= T::zero()) || !e.is_finite()) {
            return Err(invalid("thermal", "occupation must be finite and >= 0"));
        }
        Ok(Self { n_half, kappa, theta, thermal })
    }

    /// κ = 1, θ = 0, E = 0 on every line.
    pub fn transparent(n_half: usize) -> Self {
        let m = 2 * n_half + 1;
        Self { n_half, kappa: vec![T::one(); m], theta: vec![T::zero(); m], thermal: vec![T::zero(); m] }
    }

    pub fn n_half(&self) -> usize {
        self.n_half
    }

    fn slot(&self, n: i64) -> usize {
        line_slot(n, self.n_half).unwrap_or_else(|| panic!("line {n} outside sample of half-width {}", self.n_half))
    }

    pub fn kappa(&self, n: i64) -> T {
        self.kappa[self.slot(n)]
    }

    pub fn theta(&self, n: i64) -> T {
        self.theta[self.slot(n)]
    }

    pub fn thermal(&self, n: i64) -> T {
        self.thermal[self.slot(n)]
    }

    pub fn kappas(&self) -> &[T] {
        &self.kappa
    }

    pub fn thetas(&self) -> &[T] {
        &self.theta
    }

    pub fn thermals(&self) -> &[T] {
        &self.thermal
    }

    pub fn with_line(mut self, n: i64, kappa: T, theta: T) -> Result<Self> {
        let i = line_slot(n, self.n_half).ok_or(Error::LineOutOfRange { line: n, n_half: self.n_half })?;
        if !(kappa >= T::zero() && kappa <= T::one()) {
            return Err(Error::Transmissivity { line: n, value: kappa.to_f64_lossy() });
        }
        self.kappa[i] = kappa;
        self.theta[i] = theta;
        Ok(self)
    }

    pub fn with_thermal(mut self, thermal: Vec<T>) -> Result<Self> {
        self.thermal = thermal;
        Self::new(self.kappa, self.theta, self.thermal)
    }

    pub fn with_uniform_thermal(self, e: T) -> Result<Self> {
        let m = self.kappa.len();
        self.with_thermal(vec![e; m])
    }

    pub fn with_phases(mut self, theta: Vec<T>) -> Result<Self> {
        self.theta = theta;
        Self::new(self.kappa, self.theta, self.thermal)
    }
}

/// Single absorption line m inside a transparent background.
pub fn single_line_sample<T: Real>(n_half: usize, line: i64, kappa: T, theta: T) -> Result<SampleSpec<T>> {
    SampleSpec::transparent(n_half).with_line(line, kappa, theta)
}

/// Bose-Einstein occupation at the carrier frequency.
pub fn thermal_occupation<T: Real>(carrier: T, temperature: T) -> Result<T> {
    if !(carrier > T::zero()) {
        return Err(invalid("carrier", "must be positive"));
    }
    if !(temperature > T::zero()) {
        return Err(invalid("temperature", "must be positive"));
    }
    let x = T::of(HBAR) * carrier / (T::of(BOLTZMANN) * temperature);
    Ok(T::one() / x.exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseNoiseKind {
    /// θ_n uniform on [−δ, δ].
    HardBound,
    /// θ_n uniform with standard deviation δ (half-width √3·δ).
    StdDev,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseNoiseSpec<T> {
    pub bound: T,
    pub kind: PhaseNoiseKind,
}

/// Largest δ the small-mismatch formulas are trusted for.
pub const PHASE_NOISE_WARN: f64 = 0.3;

impl<T: Real> PhaseNoiseSpec<T> {
    pub fn new(bound: T, kind: PhaseNoiseKind) -> Result<Self> {
        if !(bound >= T::zero()) || !bound.is_finite() {
            return Err(invalid("phase noise bound", "must be finite and >= 0"));
        }
        if bound > T::of(PHASE_NOISE_WARN) {
            log::warn!("phase noise bound {bound} exceeds {PHASE_NOISE_WARN} rad; small-δ formulas degrade");
        }
        Ok(Self { bound, kind })
    }

    pub fn half_width(&self) -> T {
        match self.kind {
            PhaseNoiseKind::HardBound => self.bound,
            PhaseNoiseKind::StdDev => self.bound * T::of(3.0).sqrt(),
        }
    }
}

/// Frozen i.i.d. uniform phases for lines −N..=N.
pub fn sample_phase_draw<T: Real>(spec: &PhaseNoiseSpec<T>, n_half: usize, seed: u64) -> Vec<T> {
    let m = 2 * n_half + 1;
    let w = spec.half_width().to_f64_lossy();
    if w == 0.0 {
        return vec![T::zero(); m];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m).map(|_| T::of(rng.random_range(-w..=w))).collect()
}

/// File form of [`SampleSpec`]: sparse per-line maps keyed by line index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleTable<T> {
    pub n_half: usize,
    #[serde(default)]
    pub default_thermal: T,
    #[serde(default)]
    pub kappa: BTreeMap<String, T>,
    #[serde(default)]
    pub theta: BTreeMap<String, T>,
    #[serde(default)]
    pub thermal: BTreeMap<String, T>,
}

impl<T: Real> From<SampleSpec<T>> for SampleTable<T> {
    fn from(s: SampleSpec<T>) -> Self {
        // Most common thermal value becomes the default.
        let default_thermal = s.thermal[s.n_half];
        let h = s.n_half as i64;
        let sparse = |v: &[T], dflt: T| -> BTreeMap<String, T> {
            v.iter()
                .enumerate()
                .filter(|(_, x)| **x != dflt)
                .map(|(i, x)| ((i as i64 - h).to_string(), *x))
                .collect()
        };
        Self {
            n_half: s.n_half,
            default_thermal,
            kappa: sparse(&s.kappa, T::one()),
            theta: sparse(&s.theta, T::zero()),
            thermal: sparse(&s.thermal, default_thermal),
        }
    }
}

impl<T: Real> TryFrom<SampleTable<T>> for SampleSpec<T> {
    type Error = Error;

    fn try_from(t: SampleTable<T>) -> Result<Self> {
        let m = 2 * t.n_half + 1;
        let mut kappa = vec![T::one(); m];
        let mut theta = vec![T::zero(); m];
        let mut thermal = vec![t.default_thermal; m];
        for (name, map, dst) in
            [("kappa", &t.kappa, &mut kappa), ("theta", &t.theta, &mut theta), ("thermal", &t.thermal, &mut thermal)]
        {
            for (k, v) in map {
                let n: i64 = k.trim().parse().map_err(|_| invalid(name, format!("key {k:?} is not a line index")))?;
                let i = line_slot(n, t.n_half).ok_or(Error::LineOutOfRange { line: n, n_half: t.n_half })?;
                dst[i] = *v;
            }
        }
        SampleSpec::new(kappa, theta, thermal)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::carrier_from_wavelength;

    #[test]
    fn thermal_examples() {
        let w = carrier_from_wavelength(1563e-9_f64);
        let e = thermal_occupation(w, 300.0).unwrap();
        assert!(e > 4.0e-14 && e < 5.5e-14, "{e}");
        assert_eq!(thermal_occupation(w, 1e-3).unwrap(), 0.0);
        let t = HBAR * w / (BOLTZMANN * std::f64::consts::LN_2);
        assert!((thermal_occupation(w, t).unwrap() - 1.0).abs() < 1e-12);
        assert!(thermal_occupation(w, 0.0).is_err());
        assert!(thermal_occupation(-w, 1.0).is_err());
    }

    #[test]
    fn single_line_construction() {
        let s = single_line_sample(500, 7, 0.5_f64, 0.0).unwrap();
        assert_eq!(s.kappas().iter().filter(|&&k| k != 1.0).count(), 1);
        assert_eq!(s.kappa(7), 0.5);
        assert!(single_line_sample(3, 4, 0.5_f64, 0.0).is_err());
        assert!(single_line_sample(3, 0, 1.5_f64, 0.0).is_err());
        assert_eq!(single_line_sample(3, 0, 1.0_f64, 0.0).unwrap(), SampleSpec::transparent(3));
    }

    #[test]
    fn phase_draws() {
        let zero = PhaseNoiseSpec::new(0.0_f64, PhaseNoiseKind::HardBound).unwrap();
        assert!(sample_phase_draw(&zero, 5, 1).iter().all(|&t| t == 0.0));
        let spec = PhaseNoiseSpec::new(0.1_f64, PhaseNoiseKind::HardBound).unwrap();
        let a = sample_phase_draw(&spec, 50_000, 9);
        assert_eq!(a, sample_phase_draw(&spec, 50_000, 9));
        assert!(a.iter().all(|t| t.abs() <= 0.1));
        let var = a.iter().map(|t| t * t).sum::<f64>() / a.len() as f64;
        assert!((var / (0.01 / 3.0) - 1.0).abs() < 0.05, "{var}");
        let sd = PhaseNoiseSpec::new(0.1_f64, PhaseNoiseKind::StdDev).unwrap();
        let b = sample_phase_draw(&sd, 50_000, 9);
        let var = b.iter().map(|t| t * t).sum::<f64>() / b.len() as f64;
        assert!((var / 0.01 - 1.0).abs() < 0.05, "{var}");
    }

    #[test]
    fn table_roundtrip() {
        let s = single_line_sample(3, -2, 0.3_f64, 0.1).unwrap().with_uniform_thermal(0.01).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        let back: SampleSpec<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"n_half":1,"kappa":{"5":0.5}}"#;
        assert!(serde_json::from_str::<SampleSpec<f64>>(bad).is_err());
    }
}
