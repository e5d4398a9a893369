// SPDX-License-Identifier: Apache-2.0
//! `qcomb`: SNR reports, parameter scans and oracle validation for squeezed dual-comb absorption spectroscopy.

mod config;
mod scan;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use qcomb_core::oracle::{default_battery, validate_cases, ValidateOptions};
use qcomb_core::snr::SnrReport;

use config::{MethodName, Preset, RunConfig};

#[derive(Parser)]
#[command(name = "qcomb", version, about = "Squeezed dual-comb absorption spectroscopy SNR model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML or JSON run configuration.
    #[arg(long, global = true, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Output file (default: output.path, else stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Built-in figure parameters: fig2 or fig3.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Use the large-M closed forms instead of the exact sums.
    #[arg(long, global = true)]
    asymptotic: bool,
    /// Monte-Carlo seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte-Carlo samples per check (enables the sampling path).
    #[arg(long = "mc-samples", global = true)]
    mc_samples: Option<usize>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Feed each closed form the wrong squeezing structure; validation must fail.
    #[arg(long = "negative-control", global = true)]
    negative_control: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every configured protocol at the base point.
    Snr,
    /// Evaluate the scan grid and write CSV.
    Scan,
    /// Cross-check closed forms against the covariance oracle.
    Validate,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => RunConfig::load(path)?,
            (None, Some(p)) => Preset::parse(p)?.config(),
            (None, None) => RunConfig::default(),
        };
        if self.asymptotic {
            cfg.output.method = MethodName::Asymptotic;
        }
        if let Some(s) = self.seed {
            cfg.oracle.seed = s;
        }
        if let Some(k) = self.mc_samples {
            cfg.oracle.mc_samples = Some(k);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn sink(&self, cfg: &RunConfig) -> Result<Box<dyn Write>> {
        Ok(match self.out.as_ref().or(cfg.output.path.as_ref()) {
            Some(path) => Box::new(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn sig6(x: f64) -> String {
    format!("{x:.5e}")
}

fn summary(r: &SnrReport<f64>) -> String {
    let mut s = format!(
        "{} ({}, {} constraint, {} objective) M={} m={} kappa={}\n  split f = {}{}\n",
        r.protocol.label(),
        r.method.label(),
        match r.constraint.kind {
            qcomb_core::comb::ConstraintKind::SamplePower => "sample",
            qcomb_core::comb::ConstraintKind::DetectorPower => "detector",
        },
        r.objective.label(),
        r.lines,
        r.line,
        r.kappa,
        sig6(r.split),
        if r.strong_lo { " (strong LO)" } else { "" },
    );
    if let Some(m) = r.mean {
        s += &format!("  mean = {} {:+.5e}i\n", sig6(m.re), m.im);
    }
    if let Some(v) = r.variance {
        s += &format!("  variance = {}\n", sig6(v));
    }
    s += &format!(
        "  local SNR^2 = {}  global SNR^2 = {}\n  advantage = {} dB (same receiver), {} dB (best classical: {})\n",
        sig6(r.local_snr2),
        sig6(r.global_snr2),
        sig6(r.advantage_db),
        sig6(r.advantage_best_db),
        r.best_classical.protocol.label(),
    );
    for n in &r.notes {
        s += &format!("  note: {n}\n");
    }
    s
}

fn cmd_snr(common: &Common) -> Result<ExitCode> {
    let cfg = common.load()?;
    let point = cfg.base_point();
    let reports = cfg
        .protocols()?
        .into_iter()
        .map(|p| scan::evaluate(&cfg, p, &point, cfg.output.method))
        .collect::<Result<Vec<_>>>()?;
    for r in &reports {
        print!("{}", summary(r));
    }
    if let Some(path) = common.out.as_ref().or(cfg.output.path.as_ref()) {
        let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
        serde_json::to_writer_pretty(&mut w, &reports)?;
        writeln!(w)?;
        w.flush()?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_scan(common: &Common) -> Result<ExitCode> {
    let cfg = common.load()?;
    if cfg.scan.is_empty() {
        bail!("config section `scan` sets no axis; add e.g. `kappa_points = 101`");
    }
    let rows = scan::run_scan(&cfg, cfg.output.method, common.jobs)?;
    scan::write_csv(&rows, common.sink(&cfg)?)?;
    log::info!("scan: wrote {} rows", rows.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(common: &Common) -> Result<ExitCode> {
    let cfg = common.load()?;
    let opts = ValidateOptions {
        tolerance_rel: cfg.oracle.tolerance,
        sigma_limit: cfg.oracle.sigma_limit,
        mc_samples: cfg.oracle.mc_samples,
        seed: cfg.oracle.seed,
        negative_control: common.negative_control,
    };
    let cases = default_battery(cfg.oracle.n_half)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(common.jobs).build()?;
    let report = pool.install(|| validate_cases(&cases, &opts))?;
    let mut w = common.sink(&cfg)?;
    serde_json::to_writer_pretty(&mut w, &report)?;
    writeln!(w)?;
    w.flush()?;
    eprintln!(
        "validate: {} checks, {} failures, max relative deviation {:.3e}, max MC deviation {}: {}",
        report.checks,
        report.failures,
        report.max_relative_deviation,
        report.max_mc_deviation_sigma.map_or("n/a".to_string(), |s| format!("{s:.2} sigma")),
        if report.pass { "PASS" } else { "FAIL" },
    );
    Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Snr => cmd_snr(&cli.common),
        Command::Scan => cmd_scan(&cli.common),
        Command::Validate => cmd_validate(&cli.common),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
