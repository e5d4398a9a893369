// SPDX-License-Identifier: Apache-2.0
use num_complex::Complex;
use serde::Serialize;

use crate::comb::CombSpec;
use crate::error::{Error, Result};
use crate::sample::SampleSpec;
use crate::scalar::Real;

use super::{check_beat, ReceiverKind};

fn check_dims<T: Real>(a: &CombSpec<T>, b: &CombSpec<T>, sample: &SampleSpec<T>) -> Result<()> {
    for got in [b.n_half(), sample.n_half()] {
        if got != a.n_half() {
            return Err(Error::DimensionMismatch { expected: a.n_half(), got });
        }
    }
    Ok(())
}

/// Mean spectra ⟨I_A(mΔω_r)⟩, ⟨I_B(mΔω_r)⟩ of the two detectors.
pub fn mean_spectrum<T: Real>(
    receiver: ReceiverKind,
    a: &CombSpec<T>,
    b: &CombSpec<T>,
    sample: &SampleSpec<T>,
    m: i64,
) -> Result<(Complex<T>, Complex<T>)> {
    check_dims(a, b, sample)?;
    check_beat(m, a.n_half())?;
    let half = T::of(0.5);
    let fwd = a.amplitude(m) * b.amplitude(m).conj();
    let bwd = a.amplitude(-m).conj() * b.amplitude(-m);
    Ok(match receiver {
        ReceiverKind::DivisionReceiver => {
            let ia = (fwd * sample.kappa(m) + bwd * sample.kappa(-m)) * half;
            (ia, -(fwd + bwd) * half)
        }
        ReceiverKind::HeterodyneSubtraction => {
            let ia = (fwd * Complex::from_polar(sample.kappa(m).sqrt(), sample.theta(m))
                + bwd * Complex::from_polar(sample.kappa(-m).sqrt(), -sample.theta(-m)))
                * half;
            (ia, -ia)
        }
    })
}

/// ⟨d_m⟩ = ⟨I_A⟩ − ⟨I_B⟩ of the heterodyne receiver.
pub fn differential_mean<T: Real>(a: &CombSpec<T>, b: &CombSpec<T>, sample: &SampleSpec<T>, m: i64) -> Result<Complex<T>> {
    let (ia, ib) = mean_spectrum(ReceiverKind::HeterodyneSubtraction, a, b, sample, m)?;
    Ok(ia - ib)
}

/// Model ratio r_m = c₊κ_m + c₋κ_{−m} of the division receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioMean<T> {
    pub ratio: Complex<T>,
    pub c_plus: Complex<T>,
    pub c_minus: Complex<T>,
    /// A_m B_m* + A_{−m}* B_{−m}.
    pub denominator: Complex<T>,
}

pub fn ratio_mean<T: Real>(a: &CombSpec<T>, b: &CombSpec<T>, sample: &SampleSpec<T>, m: i64) -> Result<RatioMean<T>> {
    check_dims(a, b, sample)?;
    check_beat(m, a.n_half())?;
    let fwd = a.amplitude(m) * b.amplitude(m).conj();
    let bwd = a.amplitude(-m).conj() * b.amplitude(-m);
    let denominator = fwd + bwd;
    if denominator.norm_sqr() == T::zero() {
        return Err(Error::RatioUndefined(m));
    }
    let c_plus = fwd / denominator;
    let c_minus = bwd / denominator;
    let ratio = c_plus * sample.kappa(m) + c_minus * sample.kappa(-m);
    Ok(RatioMean { ratio, c_plus, c_minus, denominator })
}
