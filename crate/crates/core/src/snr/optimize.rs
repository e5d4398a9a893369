// SPDX-License-Identifier: Apache-2.0
//! Power-split search: coarse pre-grid, then golden-section refinement.

use serde::{Deserialize, Serialize};

use crate::comb::AmplitudeBudget;
use crate::error::{Error, Result};
use crate::scalar::Real;

use super::scenario::{LineScenario, LoPower};

pub const PRE_GRID: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Local,
    Global,
}

impl Objective {
    pub fn label(self) -> &'static str {
        match self {
            Self::Local => "local",
            Self::Global => "global",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitSearch<T> {
    pub fraction: T,
    pub value: T,
    /// Every (f, objective) evaluated, in order.
    pub trace: Vec<(T, T)>,
}

/// Maximises `f` on [lo, hi]. Failed evaluations count as −∞.
pub fn golden_section_max<T: Real, F: FnMut(T) -> Result<T>>(mut f: F, lo: T, hi: T, tol: T) -> Result<SplitSearch<T>> {
    if !(hi > lo) {
        return Err(Error::EmptyFeasibleSet(format!("interval [{lo}, {hi}]")));
    }
    let mut trace = Vec::new();
    let mut eval = |x: T, trace: &mut Vec<(T, T)>| -> T {
        let v = f(x).unwrap_or_else(|_| T::neg_infinity());
        let v = if v.is_nan() { T::neg_infinity() } else { v };
        trace.push((x, v));
        v
    };
    let h = (hi - lo) / T::of(PRE_GRID as f64);
    let mut best = (lo, T::neg_infinity());
    for i in 0..PRE_GRID {
        let x = lo + h * T::of(i as f64 + 0.5);
        let v = eval(x, &mut trace);
        if v > best.1 {
            best = (x, v);
        }
    }
    if best.1 == T::neg_infinity() {
        return Err(Error::EmptyFeasibleSet("objective undefined on every grid point".into()));
    }
    let (mut a, mut b) = ((best.0 - h).max(lo), (best.0 + h).min(hi));
    let phi = T::of(0.5 * (5f64.sqrt() - 1.0));
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = eval(c, &mut trace);
    let mut fd = eval(d, &mut trace);
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = eval(c, &mut trace);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = eval(d, &mut trace);
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v > best.1 {
            best = (x, v);
        }
    }
    // Optimum pinned to an end of the interval.
    for edge in [lo, hi] {
        if (best.0 - edge).abs() <= tol * T::of(2.0) {
            let v = eval(edge, &mut trace);
            if v >= best.1 {
                best = (edge, v);
            }
        }
    }
    Ok(SplitSearch { fraction: best.0, value: best.1, trace })
}

/// Scenario at fraction `f` of the constrained power in comb A.
pub(crate) fn at_split<T: Real>(template: &LineScenario<T>, budget: &AmplitudeBudget<T>, f: T) -> Result<LineScenario<T>> {
    let (a2, b2) = budget.split(f)?;
    Ok(template.with_powers(a2, b2.map_or(LoPower::StrongLimit, LoPower::Finite)))
}

/// Global SNR² vanishes identically at κ = 1, so the split is chosen on the local score there.
pub(crate) fn objective_value<T: Real>(s: &LineScenario<T>, objective: Objective) -> Result<T> {
    match objective {
        Objective::Global if s.kappa < T::one() => s.global_snr2(),
        _ => s.local_score(),
    }
}

/// Best split f = (power in A)/(constrained power) for the template's protocol.
pub fn optimize_power_split<T: Real>(
    template: &LineScenario<T>,
    budget: &AmplitudeBudget<T>,
    objective: Objective,
    tol: T,
) -> Result<(SplitSearch<T>, LineScenario<T>)> {
    let search = golden_section_max(
        |f| objective_value(&at_split(template, budget, f)?, objective),
        T::zero(),
        T::one(),
        tol,
    )?;
    let best = at_split(template, budget, search.fraction)?;
    Ok((search, best))
}
