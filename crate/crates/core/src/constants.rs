// SPDX-License-Identifier: Apache-2.0
//! SI constants (exact 2019 definitions) and unit helpers.

use crate::scalar::Real;

pub const PLANCK: f64 = 6.626_070_15e-34;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);

/// Angular carrier frequency 2πc/λ.
pub fn carrier_from_wavelength<T: Real>(wavelength: T) -> T {
    T::of(2.0) * T::PI() * T::of(SPEED_OF_LIGHT) / wavelength
}

/// Photon energy ħΩ in joules.
pub fn photon_energy<T: Real>(carrier: T) -> T {
    T::of(HBAR) * carrier
}

pub fn db_to_linear<T: Real>(db: T) -> T {
    T::of(10.0).powf(db / T::of(10.0))
}

pub fn linear_to_db<T: Real>(x: T) -> T {
    T::of(10.0) * x.log10()
}
