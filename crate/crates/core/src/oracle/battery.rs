// SPDX-License-Identifier: Apache-2.0
//! Validation configurations: the built-in battery and random draws.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::comb::{CombGeometry, CombRole, CombSpec};
use crate::constants::db_to_linear;
use crate::error::{invalid, Result};
use crate::receivers::Experiment;
use crate::sample::SampleSpec;
use crate::squeezing::{SqueezingSpec, SqueezingStructure};

/// Largest N accepted by the oracle.
pub const ORACLE_MAX_N_HALF: usize = 12;

/// Combs, per-line gains and sample; squeezing structure is chosen per protocol.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationCase {
    pub name: String,
    #[serde(skip)]
    pub signal: CombSpec<f64>,
    #[serde(skip)]
    pub lo: CombSpec<f64>,
    pub gains_signal: Vec<f64>,
    pub gains_lo: Vec<f64>,
    #[serde(skip)]
    pub sample: SampleSpec<f64>,
    /// Beat indices to check.
    pub beats: Vec<i64>,
}

impl ValidationCase {
    pub fn n_half(&self) -> usize {
        self.signal.n_half()
    }

    pub fn check(&self) -> Result<()> {
        if self.n_half() > ORACLE_MAX_N_HALF {
            return Err(invalid("n_half", format!("N = {} exceeds the oracle limit {ORACLE_MAX_N_HALF}", self.n_half())));
        }
        Ok(())
    }

    pub fn symmetric_gains(&self) -> bool {
        [&self.gains_signal, &self.gains_lo].iter().all(|g| g.iter().eq(g.iter().rev()))
    }

    /// Experiment with both combs squeezed as `structure` (unit gains if classical).
    pub fn experiment(&self, structure: SqueezingStructure) -> Result<Experiment<f64>> {
        let sqz = |gains: &Vec<f64>| -> Result<SqueezingSpec<f64>> {
            match structure {
                SqueezingStructure::Classical => Ok(SqueezingSpec::classical(self.n_half())),
                s => SqueezingSpec::new(s, gains.clone()),
            }
        };
        Experiment::new(self.signal.clone(), self.lo.clone(), sqz(&self.gains_signal)?, sqz(&self.gains_lo)?, self.sample.clone())
    }
}

fn real_profile(n_half: usize, base: f64) -> Vec<Complex<f64>> {
    // Mild, deterministic envelope so line-dependent bookkeeping is exercised.
    (0..=2 * n_half)
        .map(|i| {
            let n = i as f64 - n_half as f64;
            Complex::new(base * (1.0 + 0.15 * (0.7 * n).cos()), 0.0)
        })
        .collect()
}

fn case(name: &str, n_half: usize, gain_db: f64, sample: SampleSpec<f64>) -> Result<ValidationCase> {
    let geometry = CombGeometry::for_lines(n_half, 1.2e15, 1.0)?;
    let g = db_to_linear(gain_db);
    let h = n_half as i64;
    Ok(ValidationCase {
        name: name.into(),
        signal: CombSpec::new(CombRole::Signal, geometry, real_profile(n_half, 200.0))?,
        lo: CombSpec::new(CombRole::LocalOscillator, geometry, real_profile(n_half, 300.0))?,
        gains_signal: vec![g; 2 * n_half + 1],
        gains_lo: vec![g; 2 * n_half + 1],
        sample,
        beats: vec![2.min(h), -(3.min(h)), h],
    })
}

/// Lossless, single-line κ ∈ {0, 0.3, 0.7}, asymmetric κ_n ≠ κ₋ₙ, thermal and
/// phase-mismatch configurations at 15 dB.
pub fn default_battery(n_half: usize) -> Result<Vec<ValidationCase>> {
    if !(2..=ORACLE_MAX_N_HALF).contains(&n_half) {
        return Err(invalid("n_half", format!("battery needs 2 <= N <= {ORACLE_MAX_N_HALF}, got {n_half}")));
    }
    let h = n_half as i64;
    let m = 2;
    let lossless = SampleSpec::transparent(n_half);
    let mut out = vec![case("lossless", n_half, 15.0, lossless.clone())?];
    for k in [0.0, 0.3, 0.7] {
        out.push(case(&format!("single_line_kappa_{k}"), n_half, 15.0, lossless.clone().with_line(m, k, 0.0)?)?);
    }
    let asym: Vec<f64> = (-h..=h).map(|n| 0.5 + 0.4 * (n as f64 / h as f64)).collect();
    out.push(case("asymmetric_kappa", n_half, 15.0, SampleSpec::new(asym, vec![0.0; 2 * n_half + 1], vec![0.0; 2 * n_half + 1])?)?);
    let thermal = lossless.clone().with_line(m, 0.4, 0.0)?.with_uniform_thermal(0.05)?;
    out.push(case("thermal", n_half, 15.0, thermal.with_line(-1, 0.6, 0.0)?)?);
    let phases: Vec<f64> = (-h..=h).map(|n| 0.25 * (1.3 * n as f64).sin()).collect();
    let k: Vec<f64> = (-h..=h).map(|n| 0.8 - 0.05 * n.abs() as f64).collect();
    out.push(case("phase_mismatch", n_half, 15.0, SampleSpec::new(k, phases, vec![0.0; 2 * n_half + 1])?)?);
    Ok(out)
}

/// Random configuration: G ∈ [1, 40] (symmetric in n), κ_n ∈ [0, 1],
/// θ_n ∈ [−0.3, 0.3], E_n ∈ [0, 0.1]. With `complex` the amplitudes get
/// random phases except on the carrier line.
pub fn random_case(seed: u64, n_half: usize, complex: bool) -> Result<ValidationCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = n_half as i64;
    let len = 2 * n_half + 1;
    let sym = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| -> Vec<f64> {
        let half: Vec<f64> = (0..=n_half).map(|_| rng.random_range(lo..=hi)).collect();
        (-h..=h).map(|n| half[n.unsigned_abs() as usize]).collect()
    };
    let gains_signal = sym(&mut rng, 1.0, 40.0);
    let gains_lo = sym(&mut rng, 1.0, 40.0);
    let draw = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| -> Vec<f64> { (0..len).map(|_| rng.random_range(lo..=hi)).collect() };
    let kappa = draw(&mut rng, 0.0, 1.0);
    let theta = draw(&mut rng, -0.3, 0.3);
    let thermal = draw(&mut rng, 0.0, 0.1);
    let amps = |rng: &mut ChaCha8Rng| -> Vec<Complex<f64>> {
        (-h..=h)
            .map(|n| {
                let mag = rng.random_range(50.0..=500.0);
                let phase = if complex && n != 0 { rng.random_range(-3.0..=3.0) } else { 0.0 };
                Complex::from_polar(mag, phase)
            })
            .collect()
    };
    let a = amps(&mut rng);
    let b = amps(&mut rng);
    let m = loop {
        let m = rng.random_range(-h..=h);
        if m != 0 {
            break m;
        }
    };
    let geometry = CombGeometry::for_lines(n_half, 1.2e15, 1.0)?;
    Ok(ValidationCase {
        name: format!("random_{seed}"),
        signal: CombSpec::new(CombRole::Signal, geometry, a)?,
        lo: CombSpec::new(CombRole::LocalOscillator, geometry, b)?,
        gains_signal,
        gains_lo,
        sample: SampleSpec::new(kappa, theta, thermal)?,
        beats: vec![m],
    })
}
