// SPDX-License-Identifier: Apache-2.0
//! Linearised noise operators ΔX = Σ α_j a_j + β_j a_j† over the lattice.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::comb::{build_mode_lattice, CombSpec, Field, ModeId, ModeLattice};
use crate::error::Result;
use crate::sample::SampleSpec;
use crate::scalar::Real;

use super::{check_beat, ratio_mean, ReceiverKind};

/// Coefficients of the noise operator at beat index m. Only touched modes are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseCoefficients<T> {
    pub m: i64,
    pub receiver: ReceiverKind,
    lattice: ModeLattice,
    terms: BTreeMap<usize, (Complex<T>, Complex<T>)>,
    /// Divides the operator variance to give the statistic variance.
    pub normalization: T,
}

impl<T: Real> NoiseCoefficients<T> {
    fn new(m: i64, receiver: ReceiverKind, lattice: ModeLattice, normalization: T) -> Self {
        Self { m, receiver, lattice, terms: BTreeMap::new(), normalization }
    }

    fn add(&mut self, field: Field, line: i64, detuning: i64, alpha: Complex<T>, beta: Complex<T>) {
        let idx = self.lattice.index(ModeId::new(field, line, detuning)).expect("touched mode inside lattice");
        let e = self.terms.entry(idx).or_insert((Complex::new(T::zero(), T::zero()), Complex::new(T::zero(), T::zero())));
        e.0 = e.0 + alpha;
        e.1 = e.1 + beta;
    }

    fn ann(&mut self, field: Field, line: i64, detuning: i64, c: Complex<T>) {
        self.add(field, line, detuning, c, Complex::new(T::zero(), T::zero()));
    }

    fn cre(&mut self, field: Field, line: i64, detuning: i64, c: Complex<T>) {
        self.add(field, line, detuning, Complex::new(T::zero(), T::zero()), c);
    }

    pub fn lattice(&self) -> &ModeLattice {
        &self.lattice
    }

    /// (mode index, α on a, β on a†) in index order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, Complex<T>, Complex<T>)> + '_ {
        self.terms.iter().map(|(&i, &(a, b))| (i, a, b))
    }

    /// (α, β) of a mode, zero when untouched.
    pub fn coefficient(&self, id: ModeId) -> (Complex<T>, Complex<T>) {
        let zero = Complex::new(T::zero(), T::zero());
        self.lattice.index(id).and_then(|i| self.terms.get(&i).copied()).unwrap_or((zero, zero))
    }

    pub fn touched_modes(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.keys().copied()
    }

    /// Quadrature weights of mode j: (c_x, c_y) = ((α+β)/2, i(α−β)/2), so ΔX = Σ c_x x + c_y y.
    pub fn quadrature_weights(&self, mode: usize) -> (Complex<T>, Complex<T>) {
        let zero = Complex::new(T::zero(), T::zero());
        let (a, b) = self.terms.get(&mode).copied().unwrap_or((zero, zero));
        let half = T::of(0.5);
        ((a + b) * half, Complex::new(T::zero(), half) * (a - b))
    }

    /// Dense quadrature vector of length 2·len.
    pub fn quadrature_vector(&self) -> Vec<Complex<T>> {
        let mut v = vec![Complex::new(T::zero(), T::zero()); 2 * self.lattice.len()];
        for &mode in self.terms.keys() {
            let (cx, cy) = self.quadrature_weights(mode);
            v[2 * mode] = cx;
            v[2 * mode + 1] = cy;
        }
        v
    }
}

/// Noise of ΔI_A + r_m ΔI_B (division, normalised by |D′|²/4) or Δd_m (heterodyne).
pub fn noise_coefficients<T: Real>(
    receiver: ReceiverKind,
    a: &CombSpec<T>,
    b: &CombSpec<T>,
    sample: &SampleSpec<T>,
    m: i64,
) -> Result<NoiseCoefficients<T>> {
    match receiver {
        ReceiverKind::DivisionReceiver => {
            let rm = ratio_mean(a, b, sample, m)?;
            noise_coefficients_with_ratio(a, b, sample, m, rm.ratio, rm.denominator.norm_sqr() / T::of(4.0))
        }
        ReceiverKind::HeterodyneSubtraction => heterodyne(a, b, sample, m, false),
    }
}

/// Division coefficients for an externally supplied ratio and normalisation.
pub fn noise_coefficients_with_ratio<T: Real>(
    a: &CombSpec<T>,
    b: &CombSpec<T>,
    sample: &SampleSpec<T>,
    m: i64,
    r: Complex<T>,
    normalization: T,
) -> Result<NoiseCoefficients<T>> {
    let n_half = a.n_half();
    check_beat(m, n_half)?;
    let half = T::of(0.5);
    let mut c = NoiseCoefficients::new(m, ReceiverKind::DivisionReceiver, build_mode_lattice(n_half), normalization);
    for n in a.line_indices() {
        let (an, bn) = (a.amplitude(n), b.amplitude(n));
        let k = sample.kappa(n);
        let p = (r + k) * half;
        let q = (-r + k) * half;
        // self-beating
        c.ann(Field::A, n, n + m, p * an.conj());
        c.cre(Field::A, n, n - m, p * an);
        c.ann(Field::B, n, m, p * bn.conj());
        c.cre(Field::B, n, -m, p * bn);
        // cross-beating
        c.ann(Field::B, n, n + m, q * an.conj());
        c.cre(Field::B, n, n - m, q * an);
        c.ann(Field::A, n, m, q * bn.conj());
        c.cre(Field::A, n, -m, q * bn);
        let e = (k * (T::one() - k) * half).sqrt();
        if e > T::zero() {
            let ph = Complex::from_polar(e, -sample.theta(n));
            c.ann(Field::Env, n, n + m, ph * an.conj());
            c.cre(Field::Env, n, n - m, ph.conj() * an);
            c.ann(Field::Env, n, m, ph * bn.conj());
            c.cre(Field::Env, n, -m, ph.conj() * bn);
        }
    }
    Ok(c)
}

/// Heterodyne coefficients with the LO treated as |B| → ∞: `lo` holds the
/// LO profile b_n and the operator is Δd_m/|B|.
pub fn noise_coefficients_strong_lo<T: Real>(
    a: &CombSpec<T>,
    lo_profile: &CombSpec<T>,
    sample: &SampleSpec<T>,
    m: i64,
) -> Result<NoiseCoefficients<T>> {
    heterodyne(a, lo_profile, sample, m, true)
}

fn heterodyne<T: Real>(
    a: &CombSpec<T>,
    b: &CombSpec<T>,
    sample: &SampleSpec<T>,
    m: i64,
    strong_lo: bool,
) -> Result<NoiseCoefficients<T>> {
    let n_half = a.n_half();
    check_beat(m, n_half)?;
    let mut c = NoiseCoefficients::new(m, ReceiverKind::HeterodyneSubtraction, build_mode_lattice(n_half), T::one());
    for n in a.line_indices() {
        let (an, bn) = (a.amplitude(n), b.amplitude(n));
        let (k, th) = (sample.kappa(n), sample.theta(n));
        let t = Complex::from_polar(k.sqrt(), th);
        if !strong_lo {
            c.ann(Field::B, n, n + m, t.conj() * an.conj());
            c.cre(Field::B, n, n - m, t * an);
        }
        c.ann(Field::A, n, m, t * bn.conj());
        c.cre(Field::A, n, -m, t.conj() * bn);
        let l = (T::one() - k).sqrt();
        if l > T::zero() {
            c.ann(Field::Env, n, m, bn.conj() * l);
            c.cre(Field::Env, n, -m, bn * l);
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comb::{CombGeometry, CombRole};

    fn combs(n: usize) -> (CombSpec<f64>, CombSpec<f64>) {
        let g = CombGeometry::for_lines(n, 1.2e15, 1.0).unwrap();
        let amp = |s: f64| (0..2 * n + 1).map(|i| Complex::new(s + i as f64, 0.5 * i as f64)).collect();
        (
            CombSpec::new(CombRole::Signal, g, amp(1.0)).unwrap(),
            CombSpec::new(CombRole::LocalOscillator, g, amp(2.0)).unwrap(),
        )
    }

    #[test]
    fn heterodyne_lossless_classical() {
        let (a, b) = combs(2);
        let c = noise_coefficients(ReceiverKind::HeterodyneSubtraction, &a, &b, &SampleSpec::transparent(2), 1).unwrap();
        for n in -2..=2 {
            assert_eq!(c.coefficient(ModeId::new(Field::A, n, 1)).0, b.amplitude(n).conj());
            assert_eq!(c.coefficient(ModeId::new(Field::B, n, n + 1)).0, a.amplitude(n).conj());
        }
        assert!(c.touched_modes().all(|i| c.lattice().mode(i).field != Field::Env));
    }

    #[test]
    fn division_uniform_kappa_cancels_cross_beats() {
        let (a, b) = combs(2);
        let s = SampleSpec::new(vec![0.6; 5], vec![0.0; 5], vec![0.0; 5]).unwrap();
        let c = noise_coefficients(ReceiverKind::DivisionReceiver, &a, &b, &s, 1).unwrap();
        // cross-beat positions that coincide with no self-beat term
        for n in [-2_i64, -1, 1] {
            let (al, be) = c.coefficient(ModeId::new(Field::B, n, n + 1));
            if n + 1 != 1 && n + 1 != -1 {
                assert!(al.norm() < 1e-12 && be.norm() < 1e-12, "n={n}");
            }
        }
        let t = noise_coefficients(ReceiverKind::DivisionReceiver, &a, &b, &SampleSpec::transparent(2), 1).unwrap();
        assert!(t.touched_modes().all(|i| t.lattice().mode(i).field != Field::Env));
    }

    #[test]
    fn quadrature_weights_of_creation() {
        let (a, b) = combs(1);
        let c = noise_coefficients(ReceiverKind::HeterodyneSubtraction, &a, &b, &SampleSpec::transparent(1), 1).unwrap();
        let idx = c.lattice().index(ModeId::new(Field::A, 0, -1)).unwrap();
        let (cx, cy) = c.quadrature_weights(idx);
        let beta = b.amplitude(0);
        assert!((cx - beta * 0.5).norm() < 1e-15);
        assert!((cy - Complex::new(0.0, -0.5) * beta).norm() < 1e-15);
    }
}
