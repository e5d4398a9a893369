// SPDX-License-Identifier: Apache-2.0
//! Closed-form variances of the four analysed protocols.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::squeezing::{amplified, pair_variance, rotated_pair_variance, SqueezingStructure};

use super::{check_beat, ratio_mean, Experiment, Protocol, ReceiverKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormVariant {
    /// Division carrier line n = 0 summed coherently (exact linearised variance).
    CarrierCoherent,
    /// Self- and cross-beat noise of the carrier line treated as independent.
    AsPrinted,
}

/// Statistic variance var(r̂_m) or var(d̂_m), carrier-coherent form.
pub fn variance_closed_form<T: Real>(protocol: Protocol, exp: &Experiment<T>, m: i64) -> Result<T> {
    let (num, norm) = numerator_and_norm(protocol, exp, m, FormVariant::CarrierCoherent, false)?;
    Ok(num / norm)
}

/// Statistic variance with the division formulas taken verbatim.
pub fn variance_as_printed<T: Real>(protocol: Protocol, exp: &Experiment<T>, m: i64) -> Result<T> {
    let (num, norm) = numerator_and_norm(protocol, exp, m, FormVariant::AsPrinted, false)?;
    Ok(num / norm)
}

/// Operator variance before division by the ratio normalisation.
pub fn numerator_closed_form<T: Real>(protocol: Protocol, exp: &Experiment<T>, m: i64, variant: FormVariant) -> Result<T> {
    numerator_and_norm(protocol, exp, m, variant, false).map(|(n, _)| n)
}

/// var(d̂_m)/|B|² in the strong-LO limit; `exp.lo` holds the LO profile b_n.
pub fn variance_strong_lo<T: Real>(protocol: Protocol, exp: &Experiment<T>, m: i64) -> Result<T> {
    numerator_and_norm(protocol, exp, m, FormVariant::CarrierCoherent, true).map(|(n, _)| n)
}

fn numerator_and_norm<T: Real>(
    protocol: Protocol,
    exp: &Experiment<T>,
    m: i64,
    variant: FormVariant,
    strong_lo: bool,
) -> Result<(T, T)> {
    protocol.check()?;
    check_beat(m, exp.n_half())?;
    exp.check_structure(protocol.structure)?;
    use SqueezingStructure::*;
    let cross = protocol.structure == CrossLineEntangled;
    match protocol.receiver {
        ReceiverKind::DivisionReceiver => {
            if strong_lo {
                return Err(Error::Unsupported("the strong-LO limit applies to heterodyne detection only".into()));
            }
            let rm = ratio_mean(&exp.signal, &exp.lo, &exp.sample, m)?;
            let norm = rm.denominator.norm_sqr() / T::of(4.0);
            if !cross {
                require_real(exp, "division with intra-line squeezing")?;
            }
            Ok((division(exp, rm.ratio, cross, variant), norm))
        }
        ReceiverKind::HeterodyneSubtraction => {
            let v = if cross {
                let (a0, b0) = (exp.signal.amplitude(0), exp.lo.amplitude(0));
                if a0.im != T::zero() || b0.im != T::zero() {
                    return Err(Error::NoClosedForm(
                        "heterodyne with cross-line entanglement needs real carrier amplitudes A_0, B_0".into(),
                    ));
                }
                heterodyne_cross(exp, strong_lo)
            } else {
                require_real(exp, "heterodyne with intra-line squeezing")?;
                heterodyne_intra(exp, strong_lo)
            };
            Ok((v, T::one()))
        }
    }
}

fn require_real<T: Real>(exp: &Experiment<T>, what: &str) -> Result<()> {
    if exp.signal.is_real() && exp.lo.is_real() {
        Ok(())
    } else {
        Err(Error::NoClosedForm(format!("{what} is only available for real comb amplitudes")))
    }
}

/// |(u+v)/2|²/G + |(u−v)/2|²G.
fn split_kernel<T: Real>(g: T, u: Complex<T>, v: Complex<T>) -> T {
    let h = T::of(0.5);
    ((u + v) * h).norm_sqr() / g + ((u - v) * h).norm_sqr() * g
}

fn division<T: Real>(exp: &Experiment<T>, r: Complex<T>, cross: bool, variant: FormVariant) -> T {
    let (a, b, s) = (&exp.signal, &exp.lo, &exp.sample);
    let quarter = T::of(0.25);
    let two = T::of(2.0);
    let mut total = T::zero();
    for n in a.line_indices() {
        let (an, bn) = (a.amplitude(n), b.amplitude(n));
        let (ga, gb) = (exp.sqz_signal.gain(n), exp.sqz_lo.gain(n));
        let k = s.kappa(n);
        let env = two * k * (T::one() - k) * (an.norm_sqr() + bn.norm_sqr()) * (T::one() + two * s.thermal(n));
        let p = r + k;
        let q = -r + k;
        let summand = if cross {
            let (am, bm) = (a.amplitude(-n), b.amplitude(-n));
            let km = s.kappa(-n);
            let (pm, qm) = (r + km, -r + km);
            split_kernel(ga, p * an.conj(), pm * am)
                + split_kernel(gb, p * bn.conj(), pm * bm)
                + split_kernel(gb, q * an.conj(), qm * am)
                + split_kernel(ga, q * bn.conj(), qm * bm)
                + env
        } else {
            p.norm_sqr() * (an.norm_sqr() / ga + bn.norm_sqr() / gb)
                + q.norm_sqr() * (an.norm_sqr() * amplified(gb) + bn.norm_sqr() * amplified(ga))
                + env
        };
        if n == 0 && variant == FormVariant::CarrierCoherent {
            total = total + carrier_coherent(exp, r);
        } else {
            total = total + quarter * summand;
        }
    }
    total
}

/// Exact n = 0 division term: A_0 and B_0 share one optical frequency, so the
/// self- and cross-beat noise act on the same mode pairs and environment modes.
fn carrier_coherent<T: Real>(exp: &Experiment<T>, r: Complex<T>) -> T {
    let (a0, b0) = (exp.signal.amplitude(0), exp.lo.amplitude(0));
    let k = exp.sample.kappa(0);
    let h = T::of(0.5);
    let p = (r + k) * h;
    let q = (-r + k) * h;
    let comb_a = pair_variance(exp.sqz_signal.gain(0), p * a0.conj() + q * b0.conj(), p * a0 + q * b0);
    let comb_b = pair_variance(exp.sqz_lo.gain(0), p * b0.conj() + q * a0.conj(), p * b0 + q * a0);
    let env = k * (T::one() - k) * h * (a0 + b0).norm_sqr() * (T::one() + T::of(2.0) * exp.sample.thermal(0));
    comb_a + comb_b + env
}

fn heterodyne_intra<T: Real>(exp: &Experiment<T>, strong_lo: bool) -> T {
    let (a, b, s) = (&exp.signal, &exp.lo, &exp.sample);
    let two = T::of(2.0);
    a.line_indices()
        .map(|n| {
            let (a2, b2) = (a.amplitude(n).norm_sqr(), b.amplitude(n).norm_sqr());
            let (k, th) = (s.kappa(n), s.theta(n));
            let lo_noise = if strong_lo { T::zero() } else { a2 * rotated_pair_variance(exp.sqz_lo.gain(n), th) };
            k * (lo_noise + b2 * rotated_pair_variance(exp.sqz_signal.gain(n), th))
                + (T::one() - k) * b2 * (T::one() + two * s.thermal(n))
        })
        .sum()
}

fn heterodyne_cross<T: Real>(exp: &Experiment<T>, strong_lo: bool) -> T {
    let (a, b, s) = (&exp.signal, &exp.lo, &exp.sample);
    let two = T::of(2.0);
    let half = T::of(0.5);
    let (k0, th0) = (s.kappa(0), s.theta(0));
    let mut total = k0 * b.amplitude(0).norm_sqr() * rotated_pair_variance(exp.sqz_signal.gain(0), th0);
    if !strong_lo {
        total = total + k0 * a.amplitude(0).norm_sqr() * rotated_pair_variance(exp.sqz_lo.gain(0), th0);
    }
    for n in a.line_indices() {
        total = total + (T::one() - s.kappa(n)) * b.amplitude(n).norm_sqr() * (T::one() + two * s.thermal(n));
    }
    for n in 1..=a.n_half() as i64 {
        let wp = Complex::from_polar(s.kappa(n).sqrt(), s.theta(n));
        let wm = Complex::from_polar(s.kappa(-n).sqrt(), s.theta(-n));
        if !strong_lo {
            let u = wp.conj() * a.amplitude(n).conj();
            let v = wm * a.amplitude(-n);
            let g = exp.sqz_lo.gain(n);
            total = total + half * ((u - v).norm_sqr() * g + (u + v).norm_sqr() / g);
        }
        let u = wp * b.amplitude(n).conj();
        let v = wm.conj() * b.amplitude(-n);
        let g = exp.sqz_signal.gain(n);
        total = total + half * ((u - v).norm_sqr() * g + (u + v).norm_sqr() / g);
    }
    total
}
