// SPDX-License-Identifier: Apache-2.0
//! Independent checks of the closed-form variances: the covariance quadratic
//! form over the full lattice, and Gaussian Monte Carlo.

mod battery;
mod montecarlo;

pub use battery::{default_battery, random_case, ValidationCase, ORACLE_MAX_N_HALF};
pub use montecarlo::{monte_carlo_statistics, McStats, MAX_JITTER, MC_SHARDS, MIN_SAMPLES};

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::receivers::{
    differential_mean, noise_coefficients, ratio_mean, variance_closed_form, Experiment, NoiseCoefficients, Protocol,
    ReceiverKind,
};
use crate::scalar::Real;
use crate::squeezing::{build_covariance, CovarianceModel, SqueezingStructure};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_SIGMA_LIMIT: f64 = 4.0;

/// Statistic variance cᵀΣc / normalization, summing the real and imaginary parts
/// of the complex coefficient vector. Only blocks touched by `coeffs` are visited.
pub fn variance_quadratic_form<T: Real>(coeffs: &NoiseCoefficients<T>, cov: &CovarianceModel<T>) -> Result<T> {
    if coeffs.lattice().len() != cov.lattice().len() {
        return Err(Error::DimensionMismatch { expected: cov.dimension(), got: 2 * coeffs.lattice().len() });
    }
    let mut blocks: Vec<usize> = coeffs.touched_modes().map(|m| cov.block_of(m).0).collect();
    blocks.sort_unstable();
    blocks.dedup();
    let mut total = T::zero();
    for bi in blocks {
        let block = &cov.blocks()[bi];
        let mut re = vec![T::zero(); block.dim()];
        let mut im = vec![T::zero(); block.dim()];
        for (slot, &mode) in block.modes.iter().enumerate() {
            let (cx, cy) = coeffs.quadrature_weights(mode);
            re[2 * slot] = cx.re;
            re[2 * slot + 1] = cy.re;
            im[2 * slot] = cx.im;
            im[2 * slot + 1] = cy.im;
        }
        total = total + block.form(&re) + block.form(&im);
    }
    Ok(total / coeffs.normalization)
}

/// Same quantity from a dense matrix over the dense coefficient vector.
pub fn variance_quadratic_form_dense<T: Real>(coeffs: &NoiseCoefficients<T>, dense: &[T]) -> Result<T> {
    let c = coeffs.quadrature_vector();
    let d = c.len();
    if dense.len() != d * d {
        return Err(Error::DimensionMismatch { expected: d * d, got: dense.len() });
    }
    let mut total = T::zero();
    for i in 0..d {
        for j in 0..d {
            let v = dense[i * d + j];
            if v != T::zero() {
                total = total + v * (c[i].re * c[j].re + c[i].im * c[j].im);
            }
        }
    }
    Ok(total / coeffs.normalization)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidateOptions {
    pub tolerance_rel: f64,
    pub sigma_limit: f64,
    /// Monte Carlo sample count; `None` skips the sampling path.
    pub mc_samples: Option<usize>,
    pub seed: u64,
    /// Feed the covariance of each squeezed protocol to the other structure's formula.
    pub negative_control: bool,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            tolerance_rel: DEFAULT_TOLERANCE,
            sigma_limit: DEFAULT_SIGMA_LIMIT,
            mc_samples: None,
            seed: 0,
            negative_control: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleEntry {
    pub case: String,
    pub protocol: String,
    pub m: i64,
    pub closed_form: Option<f64>,
    pub quadratic_form: f64,
    pub relative_deviation: Option<f64>,
    pub monte_carlo: Option<McStats>,
    /// |MC − quadratic form| in standard errors.
    pub mc_deviation_sigma: Option<f64>,
    pub pass: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub tolerance_rel: f64,
    pub sigma_limit: f64,
    pub mc_samples: Option<usize>,
    pub seed: u64,
    pub negative_control: bool,
    pub checks: usize,
    pub failures: usize,
    pub max_relative_deviation: f64,
    pub max_mc_deviation_sigma: Option<f64>,
    pub pass: bool,
    pub entries: Vec<OracleEntry>,
}

impl OracleReport {
    fn from_entries(opts: &ValidateOptions, entries: Vec<OracleEntry>) -> Self {
        let failures = entries.iter().filter(|e| !e.pass).count();
        let max_relative_deviation = entries.iter().filter_map(|e| e.relative_deviation).fold(0.0, f64::max);
        let max_mc_deviation_sigma = entries.iter().filter_map(|e| e.mc_deviation_sigma).reduce(f64::max);
        Self {
            tolerance_rel: opts.tolerance_rel,
            sigma_limit: opts.sigma_limit,
            mc_samples: opts.mc_samples,
            seed: opts.seed,
            negative_control: opts.negative_control,
            checks: entries.len(),
            failures,
            max_relative_deviation,
            max_mc_deviation_sigma,
            pass: failures == 0,
            entries,
        }
    }

    pub fn merge(reports: Vec<OracleReport>, opts: &ValidateOptions) -> Self {
        Self::from_entries(opts, reports.into_iter().flat_map(|r| r.entries).collect())
    }
}

/// Protocols checked per case: both classical receivers and the four squeezed ones.
pub fn validation_protocols() -> Vec<Protocol> {
    let mut v = vec![
        Protocol::classical(ReceiverKind::HeterodyneSubtraction),
        Protocol::classical(ReceiverKind::DivisionReceiver),
    ];
    v.extend(Protocol::quantum_four());
    v
}

fn swapped(structure: SqueezingStructure) -> SqueezingStructure {
    use SqueezingStructure::*;
    match structure {
        IntraSelfReferred | IntraCrossReferred => CrossLineEntangled,
        CrossLineEntangled => IntraSelfReferred,
        Classical => Classical,
    }
}

/// Closed-form, quadratic-form and (optionally) Monte Carlo variance of one protocol.
pub fn check_protocol(
    case: &ValidationCase,
    protocol: Protocol,
    m: i64,
    opts: &ValidateOptions,
) -> Result<OracleEntry> {
    let exp = case.experiment(protocol.structure)?;
    let coeffs = noise_coefficients(protocol.receiver, &exp.signal, &exp.lo, &exp.sample, m)?;
    let cov = build_covariance(coeffs.lattice(), &exp.sqz_signal, &exp.sqz_lo, &exp.sample)?;
    let qf = variance_quadratic_form(&coeffs, &cov)?;

    let mut note = None;
    let closed = if opts.negative_control && protocol.structure != SqueezingStructure::Classical {
        let wrong = Protocol { structure: swapped(protocol.structure), ..protocol };
        note = Some(format!("negative control: closed form of {}", wrong.label()));
        closed_form(wrong, &case.experiment(wrong.structure)?, m)?
    } else {
        closed_form(protocol, &exp, m)?
    };
    let closed = match closed {
        Ok(v) => Some(v),
        Err(msg) => {
            note = Some(msg);
            None
        }
    };
    let relative_deviation = closed.map(|c| relative(c, qf));
    let mut pass = relative_deviation.map_or(true, |d| d <= opts.tolerance_rel);

    let (monte_carlo, mc_deviation_sigma) = match opts.mc_samples {
        Some(k) => {
            let mean = statistic_mean(protocol.receiver, &exp, m)?;
            let mc = monte_carlo_statistics(&coeffs, &cov, mean, k, opts.seed)?;
            let sigma = if mc.std_error > 0.0 {
                (mc.variance - qf).abs() / mc.std_error
            } else if mc.variance == qf {
                0.0
            } else {
                f64::INFINITY
            };
            pass &= sigma <= opts.sigma_limit;
            (Some(mc), Some(sigma))
        }
        None => (None, None),
    };
    Ok(OracleEntry {
        case: case.name.clone(),
        protocol: protocol.label(),
        m,
        closed_form: closed,
        quadratic_form: qf,
        relative_deviation,
        monte_carlo,
        mc_deviation_sigma,
        pass,
        note,
    })
}

/// Outer error: broken configuration. Inner error: the formula does not apply.
fn closed_form(protocol: Protocol, exp: &Experiment<f64>, m: i64) -> Result<std::result::Result<f64, String>> {
    match variance_closed_form(protocol, exp, m) {
        Ok(v) => Ok(Ok(v)),
        Err(e @ (Error::NoClosedForm(_) | Error::Unsupported(_))) => Ok(Err(format!("no closed form: {e}"))),
        Err(e) => Err(e),
    }
}

fn statistic_mean(receiver: ReceiverKind, exp: &Experiment<f64>, m: i64) -> Result<Complex<f64>> {
    match receiver {
        ReceiverKind::DivisionReceiver => Ok(ratio_mean(&exp.signal, &exp.lo, &exp.sample, m)?.ratio),
        ReceiverKind::HeterodyneSubtraction => differential_mean(&exp.signal, &exp.lo, &exp.sample, m),
    }
}

fn relative(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Runs every applicable protocol at every beat index of the case.
pub fn cross_validate(case: &ValidationCase, opts: &ValidateOptions) -> Result<OracleReport> {
    case.check()?;
    let mut entries = Vec::new();
    for protocol in validation_protocols() {
        if protocol.structure == SqueezingStructure::CrossLineEntangled && !case.symmetric_gains() {
            continue;
        }
        for &m in &case.beats {
            entries.push(check_protocol(case, protocol, m, opts)?);
        }
    }
    Ok(OracleReport::from_entries(opts, entries))
}

/// `cross_validate` over several cases, in order.
pub fn validate_cases(cases: &[ValidationCase], opts: &ValidateOptions) -> Result<OracleReport> {
    let reports = cases.iter().map(|c| cross_validate(c, opts)).collect::<Result<Vec<_>>>()?;
    Ok(OracleReport::merge(reports, opts))
}
