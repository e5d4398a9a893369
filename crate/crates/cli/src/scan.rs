// SPDX-License-Identifier: Apache-2.0
//! Grid evaluation and the CSV row layout.

use std::io::Write;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use qcomb_core::constants::linear_to_db;
use qcomb_core::snr::{evaluate_asymptotic, evaluate_constrained, Allocation, SnrReport};
use qcomb_core::Protocol;

use crate::config::{MethodName, Point, RunConfig};

/// One CSV row. Field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub protocol: String,
    pub method: &'static str,
    pub constraint: &'static str,
    pub objective: &'static str,
    pub allocation: &'static str,
    pub lines: usize,
    #[serde(rename = "power_W")]
    pub power_w: f64,
    pub duration_s: f64,
    pub wavelength_m: f64,
    #[serde(rename = "G_A_dB")]
    pub gain_signal_db: f64,
    #[serde(rename = "G_B_dB")]
    pub gain_lo_db: f64,
    pub line_m: i64,
    pub kappa: f64,
    pub theta_rad: f64,
    #[serde(rename = "thermal_E")]
    pub thermal: f64,
    pub split_f: f64,
    pub strong_lo: bool,
    #[serde(rename = "A2_photons")]
    pub a2: f64,
    #[serde(rename = "B2_photons")]
    pub b2: Option<f64>,
    pub local_snr2: f64,
    pub global_snr2: f64,
    #[serde(rename = "local_snr2_dB")]
    pub local_snr2_db: f64,
    #[serde(rename = "global_snr2_dB")]
    pub global_snr2_db: f64,
    pub classical_local_snr2: f64,
    pub classical_global_snr2: f64,
    pub best_classical: String,
    pub best_classical_local_snr2: f64,
    pub best_classical_global_snr2: f64,
    #[serde(rename = "advantage_dB")]
    pub advantage_db: f64,
    #[serde(rename = "advantage_best_dB")]
    pub advantage_best_db: f64,
    pub note: String,
}

fn allocation_label(a: &Allocation<f64>) -> &'static str {
    match a {
        Allocation::Symmetric => "symmetric",
        Allocation::Fixed(_) => "fixed",
        Allocation::Optimized => "optimized",
    }
}

pub fn evaluate(cfg: &RunConfig, protocol: Protocol, point: &Point, method: MethodName) -> Result<SnrReport<f64>> {
    let spec = cfg.run_spec(protocol, point)?;
    let report = match method {
        MethodName::Exact => evaluate_constrained(&spec),
        MethodName::Asymptotic => evaluate_asymptotic(&spec),
    };
    report.with_context(|| format!("{} at kappa = {}, M = {}", protocol.label(), point.kappa, point.lines))
}

impl ScanRow {
    pub fn new(cfg: &RunConfig, point: &Point, r: &SnrReport<f64>) -> Result<Self> {
        Ok(Self {
            protocol: r.protocol.label(),
            method: r.method.label(),
            constraint: point.constraint.label(),
            objective: r.objective.label(),
            allocation: allocation_label(&point.allocation),
            lines: r.lines,
            power_w: cfg.comb.power_w,
            duration_s: cfg.comb.duration_s,
            wavelength_m: cfg.comb.wavelength_m,
            gain_signal_db: linear_to_db(r.gain_signal),
            gain_lo_db: linear_to_db(r.gain_lo),
            line_m: r.line,
            kappa: r.kappa,
            theta_rad: cfg.sample.theta_rad,
            thermal: cfg.thermal()?,
            split_f: r.split,
            strong_lo: r.strong_lo,
            a2: r.a2,
            b2: r.b2,
            local_snr2: r.local_snr2,
            global_snr2: r.global_snr2,
            local_snr2_db: linear_to_db(r.local_snr2),
            global_snr2_db: linear_to_db(r.global_snr2),
            classical_local_snr2: r.classical.local_snr2,
            classical_global_snr2: r.classical.global_snr2,
            best_classical: r.best_classical.protocol.label(),
            best_classical_local_snr2: r.best_classical.local_snr2,
            best_classical_global_snr2: r.best_classical.global_snr2,
            advantage_db: r.advantage_db,
            advantage_best_db: r.advantage_best_db,
            note: r.notes.join("; "),
        })
    }
}

/// Evaluates the whole grid on `jobs` threads (0 = all cores); rows come back in grid order.
pub fn run_scan(cfg: &RunConfig, method: MethodName, jobs: usize) -> Result<Vec<ScanRow>> {
    let grid = cfg.grid()?;
    log::info!("scan: {} points, method {:?}", grid.len(), method);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    pool.install(|| {
        grid.par_iter()
            .map(|(protocol, point)| {
                let report = evaluate(cfg, *protocol, point, method)?;
                ScanRow::new(cfg, point, &report)
            })
            .collect()
    })
}

pub fn write_csv<W: Write>(rows: &[ScanRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
