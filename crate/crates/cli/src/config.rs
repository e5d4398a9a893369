// SPDX-License-Identifier: Apache-2.0
//! Run configuration: TOML (or JSON) with one flat section per concern.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use qcomb_core::comb::{ConstraintKind, PowerConstraint};
use qcomb_core::constants::{carrier_from_wavelength, db_to_linear};
use qcomb_core::oracle::ORACLE_MAX_N_HALF;
use qcomb_core::sample::thermal_occupation;
use qcomb_core::snr::{Allocation, Objective, RunSpec};
use qcomb_core::{Protocol, ReceiverKind, SqueezingStructure};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub protocol: ProtocolSection,
    pub comb: CombSection,
    pub squeezing: SqueezingSection,
    pub sample: SampleSection,
    pub constraint: ConstraintSection,
    pub scan: ScanSection,
    pub output: OutputSection,
    pub oracle: OracleSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolSection {
    /// "receiver+structure", e.g. "division+cross"; structure is intra, cross or classical.
    pub protocols: Vec<String>,
}

impl Default for ProtocolSection {
    fn default() -> Self {
        Self { protocols: ["heterodyne+intra", "heterodyne+cross", "division+intra", "division+cross"].map(String::from).to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CombSection {
    pub lines: usize,
    pub power_w: f64,
    pub duration_s: f64,
    pub wavelength_m: f64,
}

impl Default for CombSection {
    fn default() -> Self {
        Self { lines: 1001, power_w: 0.015, duration_s: 1.0, wavelength_m: 1563e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SqueezingSection {
    pub gain_signal_db: f64,
    pub gain_lo_db: f64,
}

impl Default for SqueezingSection {
    fn default() -> Self {
        Self { gain_signal_db: 15.0, gain_lo_db: 15.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleSection {
    /// Absorbing line m.
    pub line: i64,
    pub kappa: f64,
    pub theta_rad: f64,
    /// Environment occupation E on every line.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thermal: Option<f64>,
    /// Alternative to `thermal`: E from the carrier frequency at this temperature.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temperature_k: Option<f64>,
    /// Phase mismatch on every other line.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_rad: Option<f64>,
}

impl Default for SampleSection {
    fn default() -> Self {
        Self { line: 100, kappa: 1.0, theta_rad: 0.0, thermal: None, temperature_k: None, delta_rad: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintName {
    Sample,
    Detector,
}

impl ConstraintName {
    pub fn kind(self) -> ConstraintKind {
        match self {
            Self::Sample => ConstraintKind::SamplePower,
            Self::Detector => ConstraintKind::DetectorPower,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Sample => "sample",
            Self::Detector => "detector",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllocationName {
    Symmetric,
    Optimized,
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstraintSection {
    pub kind: ConstraintName,
    pub allocation: AllocationName,
    /// Fraction of the constrained power in comb A, for `allocation = "fixed"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<f64>,
    pub objective: Objective,
    /// Optimiser tolerance in the split.
    pub tolerance: f64,
}

impl Default for ConstraintSection {
    fn default() -> Self {
        Self {
            kind: ConstraintName::Sample,
            allocation: AllocationName::Symmetric,
            split: None,
            objective: Objective::Local,
            tolerance: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanSection {
    pub kappa: Vec<f64>,
    /// Uniform κ grid on [0, 1] with this many points; alternative to `kappa`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_points: Option<usize>,
    /// Applied to both combs.
    pub gain_db: Vec<f64>,
    pub lines: Vec<usize>,
    /// Fixed splits; each point uses `allocation = "fixed"`.
    pub split: Vec<f64>,
    pub constraint: Vec<ConstraintName>,
    pub objective: Vec<Objective>,
}

impl ScanSection {
    pub fn is_empty(&self) -> bool {
        self.kappa.is_empty()
            && self.kappa_points.is_none()
            && self.gain_db.is_empty()
            && self.lines.is_empty()
            && self.split.is_empty()
            && self.constraint.is_empty()
            && self.objective.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    #[default]
    Exact,
    Asymptotic,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub method: MethodName,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSection {
    pub n_half: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<usize>,
    pub seed: u64,
    pub tolerance: f64,
    pub sigma_limit: f64,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self { n_half: 6, mc_samples: None, seed: 0, tolerance: 1e-9, sigma_limit: 4.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig2,
    Fig3,
}

impl Preset {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(Self::Fig2),
            "fig3" => Ok(Self::Fig3),
            other => bail!("unknown preset `{other}` (expected fig2 or fig3)"),
        }
    }

    /// Caption parameters: M = 1001, P = 15 mW, λ = 1563 nm, T = 1 s, G = 15 dB.
    pub fn config(self) -> RunConfig {
        let mut c = RunConfig::default();
        c.scan.kappa_points = Some(101);
        match self {
            Self::Fig2 => {
                c.constraint.allocation = AllocationName::Symmetric;
            }
            Self::Fig3 => {
                c.protocol.protocols =
                    ["heterodyne+cross", "division+cross", "heterodyne+classical", "division+classical"].map(String::from).to_vec();
                c.constraint.allocation = AllocationName::Optimized;
                c.scan.constraint = vec![ConstraintName::Sample, ConstraintName::Detector];
                c.scan.objective = vec![Objective::Local, Objective::Global];
            }
        }
        c
    }
}

pub fn parse_protocol(name: &str) -> Result<Protocol> {
    let (r, s) = name.split_once('+').with_context(|| format!("protocol `{name}` must look like receiver+structure"))?;
    let receiver = match r {
        "heterodyne" => ReceiverKind::HeterodyneSubtraction,
        "division" => ReceiverKind::DivisionReceiver,
        other => bail!("protocol `{name}`: unknown receiver `{other}` (heterodyne, division)"),
    };
    let structure = match s {
        "intra" => SqueezingStructure::intra_for(receiver),
        "intra_self" => SqueezingStructure::IntraSelfReferred,
        "intra_cross" => SqueezingStructure::IntraCrossReferred,
        "cross" => SqueezingStructure::CrossLineEntangled,
        "classical" => SqueezingStructure::Classical,
        other => bail!("protocol `{name}`: unknown structure `{other}` (intra, cross, classical)"),
    };
    Protocol::new(receiver, structure).with_context(|| format!("protocol `{name}`"))
}

fn key_error(key: &str, msg: impl std::fmt::Display) -> anyhow::Error {
    anyhow::anyhow!("config key `{key}`: {msg}")
}

fn check(ok: bool, key: &str, msg: impl std::fmt::Display) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(key_error(key, msg))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let cfg = if json { Self::from_json(&text) } else { Self::from_toml(&text) }
            .with_context(|| format!("in {}", path.display()))?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| anyhow::anyhow!("{}", e.to_string().trim_end()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check(!self.protocol.protocols.is_empty(), "protocol.protocols", "select at least one protocol")?;
        for p in &self.protocol.protocols {
            parse_protocol(p).map_err(|e| key_error("protocol.protocols", format!("{e:#}")))?;
        }
        let c = &self.comb;
        check(c.lines >= 3 && c.lines % 2 == 1, "comb.lines", format!("M = {} must be odd and >= 3", c.lines))?;
        check(c.power_w > 0.0 && c.power_w.is_finite(), "comb.power_w", "must be positive")?;
        check(c.duration_s > 0.0 && c.duration_s.is_finite(), "comb.duration_s", "must be positive")?;
        check(c.wavelength_m > 0.0 && c.wavelength_m.is_finite(), "comb.wavelength_m", "must be positive")?;
        for (key, g) in [("squeezing.gain_signal_db", self.squeezing.gain_signal_db), ("squeezing.gain_lo_db", self.squeezing.gain_lo_db)] {
            check(g >= 0.0 && g.is_finite(), key, format!("{g} dB is below 0 dB (G < 1)"))?;
        }
        let s = &self.sample;
        check(s.line != 0, "sample.line", "m = 0 is the DC beat")?;
        for m in self.lines_axis() {
            check(s.line.unsigned_abs() as usize <= m / 2, "sample.line", format!("|m| = {} exceeds N = {}", s.line.abs(), m / 2))?;
        }
        check((0.0..=1.0).contains(&s.kappa), "sample.kappa", format!("{} outside [0, 1]", s.kappa))?;
        check(s.theta_rad.is_finite(), "sample.theta_rad", "must be finite")?;
        check(!(s.thermal.is_some() && s.temperature_k.is_some()), "sample.thermal", "give either thermal or temperature_k, not both")?;
        if let Some(e) = s.thermal {
            check(e >= 0.0 && e.is_finite(), "sample.thermal", "must be >= 0")?;
        }
        if let Some(t) = s.temperature_k {
            check(t >= 0.0 && t.is_finite(), "sample.temperature_k", "must be >= 0")?;
        }
        if let Some(d) = s.delta_rad {
            check(d.is_finite(), "sample.delta_rad", "must be finite")?;
        }
        let k = &self.constraint;
        match (k.allocation, k.split) {
            (AllocationName::Fixed, None) => return Err(key_error("constraint.split", "required when allocation = \"fixed\"")),
            (AllocationName::Fixed, Some(f)) => check((0.0..=1.0).contains(&f), "constraint.split", format!("{f} outside [0, 1]"))?,
            (_, Some(_)) => return Err(key_error("constraint.split", "only used with allocation = \"fixed\"")),
            _ => {}
        }
        check(k.tolerance > 0.0 && k.tolerance < 0.1, "constraint.tolerance", "must lie in (0, 0.1)")?;
        let sc = &self.scan;
        check(sc.kappa.iter().all(|x| (0.0..=1.0).contains(x)), "scan.kappa", "values must lie in [0, 1]")?;
        check(!(sc.kappa_points.is_some() && !sc.kappa.is_empty()), "scan.kappa_points", "give either kappa or kappa_points")?;
        if let Some(n) = sc.kappa_points {
            check(n >= 2, "scan.kappa_points", "needs at least 2 points")?;
        }
        check(sc.gain_db.iter().all(|g| *g >= 0.0 && g.is_finite()), "scan.gain_db", "values must be >= 0 dB")?;
        check(sc.lines.iter().all(|m| *m >= 3 && m % 2 == 1), "scan.lines", "values must be odd and >= 3")?;
        check(sc.split.iter().all(|f| (0.0..=1.0).contains(f)), "scan.split", "values must lie in [0, 1]")?;
        let o = &self.oracle;
        check((2..=ORACLE_MAX_N_HALF).contains(&o.n_half), "oracle.n_half", format!("must lie in [2, {ORACLE_MAX_N_HALF}]"))?;
        if let Some(k) = o.mc_samples {
            check(k >= 1000, "oracle.mc_samples", "K must be >= 1000")?;
        }
        check(o.tolerance > 0.0, "oracle.tolerance", "must be positive")?;
        check(o.sigma_limit > 0.0, "oracle.sigma_limit", "must be positive")?;
        Ok(())
    }

    pub fn protocols(&self) -> Result<Vec<Protocol>> {
        self.protocol.protocols.iter().map(|p| parse_protocol(p)).collect()
    }

    pub fn carrier(&self) -> f64 {
        carrier_from_wavelength(self.comb.wavelength_m)
    }

    pub fn thermal(&self) -> Result<f64> {
        match (self.sample.thermal, self.sample.temperature_k) {
            (Some(e), _) => Ok(e),
            (None, Some(t)) => thermal_occupation(self.carrier(), t).map_err(|e| key_error("sample.temperature_k", e)),
            (None, None) => Ok(0.0),
        }
    }

    pub fn kappa_axis(&self) -> Vec<f64> {
        match self.scan.kappa_points {
            Some(n) => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
            None if self.scan.kappa.is_empty() => vec![self.sample.kappa],
            None => self.scan.kappa.clone(),
        }
    }

    pub fn gain_axis(&self) -> Vec<(f64, f64)> {
        if self.scan.gain_db.is_empty() {
            vec![(self.squeezing.gain_signal_db, self.squeezing.gain_lo_db)]
        } else {
            self.scan.gain_db.iter().map(|&g| (g, g)).collect()
        }
    }

    pub fn lines_axis(&self) -> Vec<usize> {
        if self.scan.lines.is_empty() {
            vec![self.comb.lines]
        } else {
            self.scan.lines.clone()
        }
    }

    pub fn allocation_axis(&self) -> Vec<Allocation<f64>> {
        if !self.scan.split.is_empty() {
            return self.scan.split.iter().map(|&f| Allocation::Fixed(f)).collect();
        }
        vec![match self.constraint.allocation {
            AllocationName::Symmetric => Allocation::Symmetric,
            AllocationName::Optimized => Allocation::Optimized,
            AllocationName::Fixed => Allocation::Fixed(self.constraint.split.unwrap_or(0.5)),
        }]
    }

    pub fn constraint_axis(&self) -> Vec<ConstraintName> {
        if self.scan.constraint.is_empty() {
            vec![self.constraint.kind]
        } else {
            self.scan.constraint.clone()
        }
    }

    pub fn objective_axis(&self) -> Vec<Objective> {
        if self.scan.objective.is_empty() {
            vec![self.constraint.objective]
        } else {
            self.scan.objective.clone()
        }
    }
}

/// One grid point before the protocol is attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub constraint: ConstraintName,
    pub objective: Objective,
    pub gains_db: (f64, f64),
    pub lines: usize,
    pub allocation: Allocation<f64>,
    pub kappa: f64,
}

impl RunConfig {
    /// Cartesian product in row order: protocol, constraint, objective, gain, M, split, κ (fastest).
    pub fn grid(&self) -> Result<Vec<(Protocol, Point)>> {
        let mut out = Vec::new();
        for p in self.protocols()? {
            for &constraint in &self.constraint_axis() {
                for &objective in &self.objective_axis() {
                    for &gains_db in &self.gain_axis() {
                        for &lines in &self.lines_axis() {
                            for &allocation in &self.allocation_axis() {
                                for &kappa in &self.kappa_axis() {
                                    out.push((p, Point { constraint, objective, gains_db, lines, allocation, kappa }));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// The single point described by the base sections.
    pub fn base_point(&self) -> Point {
        Point {
            constraint: self.constraint.kind,
            objective: self.constraint.objective,
            gains_db: (self.squeezing.gain_signal_db, self.squeezing.gain_lo_db),
            lines: self.comb.lines,
            allocation: self.allocation_axis()[0],
            kappa: self.sample.kappa,
        }
    }

    pub fn run_spec(&self, protocol: Protocol, p: &Point) -> Result<RunSpec<f64>> {
        Ok(RunSpec {
            protocol,
            constraint: PowerConstraint::new(p.constraint.kind(), self.comb.power_w)?,
            lines: p.lines,
            duration: self.comb.duration_s,
            carrier: self.carrier(),
            gain_signal: db_to_linear(p.gains_db.0),
            gain_lo: db_to_linear(p.gains_db.1),
            line: self.sample.line,
            kappa: p.kappa,
            theta: self.sample.theta_rad,
            thermal: self.thermal()?,
            delta: self.sample.delta_rad,
            allocation: p.allocation,
            objective: p.objective,
            tol: self.constraint.tolerance,
        })
    }
}
