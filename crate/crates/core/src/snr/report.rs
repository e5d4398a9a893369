// SPDX-License-Identifier: Apache-2.0
//! Constrained single-line runs and their reports.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::comb::{amplitude_from_constraint, AmplitudeBudget, BudgetForm, PowerConstraint};
use crate::constants::linear_to_db;
use crate::error::{invalid, Result};
use crate::receivers::{Protocol, ReceiverKind};
use crate::scalar::Real;
use crate::squeezing::SqueezingStructure;

use super::asymptotic::{asymptotic_snr, phase_noise_snr, ProtocolParams};
use super::optimize::{at_split, optimize_power_split, Objective};
use super::scenario::{LineScenario, LoPower};
use super::local_to_global;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Allocation<T> {
    /// |A|² = |B|² = PT/(MħΩ_c).
    Symmetric,
    /// Fixed fraction of the constrained power in comb A.
    Fixed(T),
    /// Split chosen by the optimiser for the run's objective.
    Optimized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Asymptotic,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Asymptotic => "asymptotic",
        }
    }
}

/// Everything needed to evaluate one protocol at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunSpec<T> {
    pub protocol: Protocol,
    pub constraint: PowerConstraint<T>,
    pub lines: usize,
    pub duration: T,
    pub carrier: T,
    pub gain_signal: T,
    pub gain_lo: T,
    pub line: i64,
    pub kappa: T,
    pub theta: T,
    pub thermal: T,
    /// Phase mismatch applied to every other line.
    pub delta: Option<T>,
    pub allocation: Allocation<T>,
    pub objective: Objective,
    /// Split tolerance of the optimiser.
    pub tol: T,
}

impl<T: Real> RunSpec<T> {
    fn validate(&self) -> Result<()> {
        self.protocol.check()?;
        if self.lines < 3 || self.lines % 2 == 0 {
            return Err(invalid("lines", format!("M = {} must be odd and >= 3", self.lines)));
        }
        if self.line == 0 || self.line.unsigned_abs() as usize > self.lines / 2 {
            return Err(invalid("line", format!("{} must be nonzero with |m| <= N", self.line)));
        }
        if !(self.gain_signal >= T::one() && self.gain_lo >= T::one()) {
            return Err(invalid("gain", "gains must be >= 1 (0 dB)"));
        }
        Ok(())
    }

    fn budget(&self, receiver: ReceiverKind) -> Result<AmplitudeBudget<T>> {
        amplitude_from_constraint(&self.constraint, receiver, self.lines, self.duration, self.carrier)
    }

    fn template(&self, protocol: Protocol) -> LineScenario<T> {
        let classical = protocol.structure == SqueezingStructure::Classical;
        LineScenario {
            protocol,
            n_half: self.lines / 2,
            line: self.line,
            kappa: self.kappa,
            theta: self.theta,
            background_theta: self.delta.unwrap_or_else(T::zero),
            thermal: self.thermal,
            gain_signal: if classical { T::one() } else { self.gain_signal },
            gain_lo: if classical { T::one() } else { self.gain_lo },
            a2: T::one(),
            lo: LoPower::Finite(T::one()),
        }
    }
}

/// SNR of a classical reference run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Baseline<T> {
    pub protocol: Protocol,
    pub split: T,
    pub strong_lo: bool,
    pub local_snr2: T,
    pub global_snr2: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnrReport<T> {
    pub protocol: Protocol,
    pub method: Method,
    pub constraint: PowerConstraint<T>,
    pub objective: Objective,
    pub lines: usize,
    pub line: i64,
    pub kappa: T,
    pub gain_signal: T,
    pub gain_lo: T,
    /// Fraction of the constrained power in comb A.
    pub split: T,
    pub strong_lo: bool,
    pub a2: T,
    pub b2: Option<T>,
    pub mean: Option<Complex<T>>,
    pub variance: Option<T>,
    pub local_snr2: T,
    pub global_snr2: T,
    pub classical: Baseline<T>,
    pub best_classical: Baseline<T>,
    /// Against the same receiver without squeezing.
    pub advantage_db: T,
    /// Against the best classical receiver under the same constraint.
    pub advantage_best_db: T,
    pub trace: Vec<(T, T)>,
    pub notes: Vec<String>,
}

struct Point<T> {
    scenario: LineScenario<T>,
    split: T,
    trace: Vec<(T, T)>,
}

fn allocate<T: Real>(spec: &RunSpec<T>, template: &LineScenario<T>, allocation: Allocation<T>) -> Result<Point<T>> {
    let budget = spec.budget(template.protocol.receiver)?;
    Ok(match allocation {
        Allocation::Symmetric => {
            let split = if budget.form == BudgetForm::SignalOnly { T::one() } else { T::of(0.5) };
            Point { scenario: template.with_powers(budget.per_line, LoPower::Finite(budget.per_line)), split, trace: vec![] }
        }
        Allocation::Fixed(f) => Point { scenario: at_split(template, &budget, f)?, split: f, trace: vec![] },
        Allocation::Optimized => {
            let (search, scenario) = optimize_power_split(template, &budget, spec.objective, spec.tol)?;
            Point { scenario, split: search.fraction, trace: search.trace }
        }
    })
}

fn objective_snr<T: Real>(local: T, global: T, objective: Objective) -> T {
    match objective {
        Objective::Local => local,
        Objective::Global => global,
    }
}

fn db_ratio<T: Real>(num: T, den: T) -> T {
    linear_to_db(num / den)
}

/// Exact evaluation through the full closed forms.
pub fn evaluate_constrained<T: Real>(spec: &RunSpec<T>) -> Result<SnrReport<T>> {
    spec.validate()?;
    let mut notes = Vec::new();
    let quantum = allocate(spec, &spec.template(spec.protocol), spec.allocation)?;
    let stats = quantum.scenario.stats()?;
    let local = quantum.scenario.local_snr2()?;
    let global = quantum.scenario.global_snr2()?;

    let classical_proto = Protocol::classical(spec.protocol.receiver);
    let classical = allocate(spec, &spec.template(classical_proto), spec.allocation)?;
    let c_local = classical.scenario.local_snr2()?;
    let c_global = classical.scenario.global_snr2()?;

    let q_obj = objective_snr(local, global, spec.objective);
    let c_obj = objective_snr(c_local, c_global, spec.objective);
    let advantage_db = if q_obj > T::zero() && c_obj > T::zero() {
        db_ratio(q_obj, c_obj)
    } else {
        db_ratio(quantum.scenario.local_score()?, classical.scenario.local_score()?)
    };
    if spec.protocol.receiver == ReceiverKind::DivisionReceiver && spec.kappa == T::zero() {
        notes.push(
            "division local SNR² vanishes at κ_m = 0 because the ratio mean carries κ, not √κ; \
             same-receiver advantage taken from the κ → 0⁺ limit"
                .into(),
        );
    }
    if spec.objective == Objective::Global && spec.kappa == T::one() {
        notes.push("global SNR² is zero at κ = 1 by definition; split and advantage use local SNR²".into());
    }

    let mut best: Option<Baseline<T>> = None;
    for receiver in [ReceiverKind::HeterodyneSubtraction, ReceiverKind::DivisionReceiver] {
        let p = allocate(spec, &spec.template(Protocol::classical(receiver)), Allocation::Optimized)?;
        let b = Baseline {
            protocol: Protocol::classical(receiver),
            split: p.split,
            strong_lo: p.scenario.lo == LoPower::StrongLimit,
            local_snr2: p.scenario.local_snr2()?,
            global_snr2: p.scenario.global_snr2()?,
        };
        let key = |b: &Baseline<T>| objective_snr(b.local_snr2, b.global_snr2, spec.objective);
        let key_local = |b: &Baseline<T>| b.local_snr2;
        best = Some(match best {
            None => b,
            Some(prev) => {
                let better = if key(&b) == key(&prev) { key_local(&b) > key_local(&prev) } else { key(&b) > key(&prev) };
                if better { b } else { prev }
            }
        });
    }
    let best = best.expect("two receivers evaluated");
    let best_obj = objective_snr(best.local_snr2, best.global_snr2, spec.objective);
    let advantage_best_db = if best_obj > T::zero() {
        db_ratio(q_obj, best_obj)
    } else {
        db_ratio(local, best.local_snr2)
    };

    let b2 = match quantum.scenario.lo {
        LoPower::Finite(b2) => Some(b2),
        LoPower::StrongLimit => None,
    };
    Ok(SnrReport {
        protocol: spec.protocol,
        method: Method::Exact,
        constraint: spec.constraint,
        objective: spec.objective,
        lines: spec.lines,
        line: spec.line,
        kappa: spec.kappa,
        gain_signal: quantum.scenario.gain_signal,
        gain_lo: quantum.scenario.gain_lo,
        split: quantum.split,
        strong_lo: b2.is_none(),
        a2: quantum.scenario.a2,
        b2,
        mean: Some(stats.mean),
        variance: Some(stats.variance),
        local_snr2: local,
        global_snr2: global,
        classical: Baseline {
            protocol: classical_proto,
            split: classical.split,
            strong_lo: classical.scenario.lo == LoPower::StrongLimit,
            local_snr2: c_local,
            global_snr2: c_global,
        },
        best_classical: best,
        advantage_db,
        advantage_best_db,
        trace: quantum.trace,
        notes,
    })
}

/// Leading-order evaluation; optimised splits take the known optima
/// (strong LO for heterodyne under a sample constraint, symmetric otherwise).
pub fn evaluate_asymptotic<T: Real>(spec: &RunSpec<T>) -> Result<SnrReport<T>> {
    spec.validate()?;
    let point = |protocol: Protocol| -> Result<(T, T, Option<T>, T)> {
        let budget = spec.budget(protocol.receiver)?;
        let signal_only = budget.form == BudgetForm::SignalOnly;
        let (split, a2, b2) = match spec.allocation {
            Allocation::Symmetric => (if signal_only { T::one() } else { T::of(0.5) }, budget.per_line, Some(budget.per_line)),
            Allocation::Fixed(f) => {
                let (a2, b2) = budget.split(f)?;
                (f, a2, b2)
            }
            Allocation::Optimized if signal_only => (T::one(), budget.per_line, None),
            Allocation::Optimized => (T::of(0.5), budget.per_line, Some(budget.per_line)),
        };
        let classical = protocol.structure == SqueezingStructure::Classical;
        let params = ProtocolParams {
            lines: spec.lines,
            a2,
            b2: b2.unwrap_or_else(T::infinity),
            gain_a: if classical { T::one() } else { spec.gain_signal },
            gain_b: if classical { T::one() } else { spec.gain_lo },
            kappa: spec.kappa,
            theta: spec.theta,
            delta: spec.delta,
        };
        let local = match spec.delta {
            Some(_) if protocol == Protocol::intra(ReceiverKind::HeterodyneSubtraction) && b2.is_some() => {
                phase_noise_snr(&params)?
            }
            _ => asymptotic_snr(protocol, &params)?,
        };
        Ok((local, split, b2, a2))
    };
    let (local, split, b2, a2) = point(spec.protocol)?;
    let global = local_to_global(spec.protocol.receiver, spec.kappa) * local;
    let cp = Protocol::classical(spec.protocol.receiver);
    let (c_local, c_split, c_b2, _) = point(cp)?;
    let c_global = local_to_global(cp.receiver, spec.kappa) * c_local;
    let ratio_db = |q: T, c: T| if q > T::zero() || c > T::zero() { db_ratio(q, c) } else { T::nan() };

    let mut best: Option<Baseline<T>> = None;
    for receiver in [ReceiverKind::HeterodyneSubtraction, ReceiverKind::DivisionReceiver] {
        let p = Protocol::classical(receiver);
        let opt = RunSpec { allocation: Allocation::Optimized, ..*spec };
        let budget = opt.budget(receiver)?;
        let signal_only = budget.form == BudgetForm::SignalOnly;
        let params = ProtocolParams {
            lines: spec.lines,
            a2: budget.per_line,
            b2: if signal_only { T::infinity() } else { budget.per_line },
            gain_a: T::one(),
            gain_b: T::one(),
            kappa: spec.kappa,
            theta: spec.theta,
            delta: None,
        };
        let l = asymptotic_snr(p, &params)?;
        let b = Baseline {
            protocol: p,
            split: if signal_only { T::one() } else { T::of(0.5) },
            strong_lo: signal_only,
            local_snr2: l,
            global_snr2: local_to_global(receiver, spec.kappa) * l,
        };
        let key = |b: &Baseline<T>| objective_snr(b.local_snr2, b.global_snr2, spec.objective);
        best = Some(match best {
            Some(prev) if key(&prev) >= key(&b) => prev,
            _ => b,
        });
    }
    let best = best.expect("two receivers evaluated");
    let q_obj = objective_snr(local, global, spec.objective);
    let best_obj = objective_snr(best.local_snr2, best.global_snr2, spec.objective);
    let c_obj = objective_snr(c_local, c_global, spec.objective);
    let advantage_db = if q_obj > T::zero() && c_obj > T::zero() {
        db_ratio(q_obj, c_obj)
    } else {
        if local > T::zero() && c_local > T::zero() {
            db_ratio(local, c_local)
        } else {
            // Division at κ = 0: both SNR² are linear in κ, compare the brackets.
        let bracket = |g_a: T, g_b: T, intra: bool| -> T {
            let k = spec.kappa;
            let (aa, bb) = (a2, b2.unwrap_or(a2));
            let mismatch = if intra {
                aa * crate::squeezing::amplified(g_b) + bb * crate::squeezing::amplified(g_a)
            } else {
                aa / g_b + bb / g_a
            };
            (T::of(3.0) + k).powi(2) * (aa / g_a + bb / g_b) + (T::one() - k).powi(2) * mismatch
        };
        let intra = spec.protocol.structure.is_intra();
        let g = |x: T| if spec.protocol.structure == SqueezingStructure::Classical { T::one() } else { x };
        db_ratio(bracket(T::one(), T::one(), false), bracket(g(spec.gain_signal), g(spec.gain_lo), intra))
        }
    };
    let advantage_best_db = if best_obj > T::zero() { ratio_db(q_obj, best_obj) } else { ratio_db(local, best.local_snr2) };

    Ok(SnrReport {
        protocol: spec.protocol,
        method: Method::Asymptotic,
        constraint: spec.constraint,
        objective: spec.objective,
        lines: spec.lines,
        line: spec.line,
        kappa: spec.kappa,
        gain_signal: spec.gain_signal,
        gain_lo: spec.gain_lo,
        split,
        strong_lo: b2.is_none(),
        a2,
        b2,
        mean: None,
        variance: None,
        local_snr2: local,
        global_snr2: global,
        classical: Baseline { protocol: cp, split: c_split, strong_lo: c_b2.is_none(), local_snr2: c_local, global_snr2: c_global },
        best_classical: best,
        advantage_db,
        advantage_best_db,
        trace: vec![],
        notes: vec![],
    })
}
