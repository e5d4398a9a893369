// SPDX-License-Identifier: Apache-2.0
//! Gaussian sampling of the linearised noise operators.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::receivers::NoiseCoefficients;
use crate::squeezing::CovarianceModel;

/// Shard count is fixed so results do not depend on the thread pool size.
pub const MC_SHARDS: u64 = 16;
pub const MIN_SAMPLES: usize = 1_000;
/// Largest diagonal jitter tried when a block fails to factorise.
pub const MAX_JITTER: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McStats {
    pub samples: usize,
    pub seed: u64,
    pub mean: Complex<f64>,
    /// Unbiased (K − 1) estimate of ⟨|x − x̄|²⟩.
    pub variance: f64,
    /// Standard error of `variance`.
    pub std_error: f64,
}

struct Projection {
    dim: usize,
    w_re: Vec<f64>,
    w_im: Vec<f64>,
}

fn cholesky(block: &[f64], dim: usize) -> Result<DMatrix<f64>> {
    let m = DMatrix::from_row_slice(dim, dim, block);
    if let Some(c) = m.clone().cholesky() {
        return Ok(c.l());
    }
    let jittered = m + DMatrix::identity(dim, dim) * MAX_JITTER;
    jittered.cholesky().map(|c| c.l()).ok_or(Error::NotPositiveDefinite)
}

/// Per touched block: w = Lᵀ c so that cᵀq = w·ξ with q = Lξ.
fn projections(coeffs: &NoiseCoefficients<f64>, cov: &CovarianceModel<f64>) -> Result<Vec<Projection>> {
    let mut touched: Vec<usize> = coeffs.touched_modes().map(|m| cov.block_of(m).0).collect();
    touched.sort_unstable();
    touched.dedup();
    let scale = coeffs.normalization.sqrt().recip();
    touched
        .into_iter()
        .map(|bi| {
            let block = &cov.blocks()[bi];
            let dim = block.dim();
            let l = cholesky(&block.matrix, dim)?;
            let mut re = DVector::zeros(dim);
            let mut im = DVector::zeros(dim);
            for (slot, &mode) in block.modes.iter().enumerate() {
                let (cx, cy) = coeffs.quadrature_weights(mode);
                re[2 * slot] = cx.re * scale;
                re[2 * slot + 1] = cy.re * scale;
                im[2 * slot] = cx.im * scale;
                im[2 * slot + 1] = cy.im * scale;
            }
            let lt = l.transpose();
            Ok(Projection { dim, w_re: (&lt * re).as_slice().to_vec(), w_im: (&lt * im).as_slice().to_vec() })
        })
        .collect()
}

fn shard_sizes(samples: usize) -> Vec<usize> {
    let k = MC_SHARDS as usize;
    (0..k).map(|s| samples / k + usize::from(s < samples % k)).collect()
}

/// K draws of the statistic `mean + ΔX/√normalization`.
pub fn monte_carlo_statistics(
    coeffs: &NoiseCoefficients<f64>,
    cov: &CovarianceModel<f64>,
    mean: Complex<f64>,
    samples: usize,
    seed: u64,
) -> Result<McStats> {
    if samples < MIN_SAMPLES {
        return Err(invalid("mc_samples", format!("K = {samples} is below the minimum of {MIN_SAMPLES}")));
    }
    if coeffs.lattice().len() != cov.lattice().len() {
        return Err(Error::DimensionMismatch { expected: cov.dimension(), got: 2 * coeffs.lattice().len() });
    }
    let proj = projections(coeffs, cov)?;
    let sizes = shard_sizes(samples);
    let draws: Vec<Vec<Complex<f64>>> = sizes
        .par_iter()
        .enumerate()
        .map(|(shard, &n)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard as u64);
            let mut xi = Vec::new();
            (0..n)
                .map(|_| {
                    let mut x = mean;
                    for p in &proj {
                        xi.clear();
                        xi.extend((0..p.dim).map(|_| -> f64 { StandardNormal.sample(&mut rng) }));
                        let re: f64 = p.w_re.iter().zip(&xi).map(|(w, z)| w * z).sum();
                        let im: f64 = p.w_im.iter().zip(&xi).map(|(w, z)| w * z).sum();
                        x += Complex::new(re, im);
                    }
                    x
                })
                .collect()
        })
        .collect();
    Ok(summarize(draws.iter().flatten().copied(), samples, seed))
}

fn summarize(xs: impl Iterator<Item = Complex<f64>> + Clone, k: usize, seed: u64) -> McStats {
    let kf = k as f64;
    let mean = xs.clone().sum::<Complex<f64>>() / kf;
    let dev: Vec<f64> = xs.map(|x| (x - mean).norm_sqr()).collect();
    let variance = dev.iter().sum::<f64>() / (kf - 1.0);
    let mean_dev = dev.iter().sum::<f64>() / kf;
    let spread = dev.iter().map(|d| (d - mean_dev).powi(2)).sum::<f64>() / (kf - 1.0);
    McStats { samples: k, seed, mean, variance, std_error: (spread / kf).sqrt() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shards_cover_all_samples() {
        let s = shard_sizes(100_003);
        assert_eq!(s.len(), MC_SHARDS as usize);
        assert_eq!(s.iter().sum::<usize>(), 100_003);
    }

    #[test]
    fn summary_of_constant_is_exact() {
        let xs = vec![Complex::new(2.0, -1.0); 10];
        let s = summarize(xs.into_iter(), 10, 0);
        assert_eq!(s.mean, Complex::new(2.0, -1.0));
        assert_eq!(s.variance, 0.0);
        assert_eq!(s.std_error, 0.0);
    }

    #[test]
    fn jitter_rescues_semidefinite_only() {
        assert!(cholesky(&[1.0, 1.0, 1.0, 1.0], 2).is_ok());
        assert!(matches!(cholesky(&[1.0, 2.0, 2.0, 1.0], 2), Err(Error::NotPositiveDefinite)));
    }
}
