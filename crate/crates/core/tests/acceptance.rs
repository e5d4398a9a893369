// SPDX-License-Identifier: Apache-2.0
//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::f64::consts::FRAC_PI_2;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qcomb_core::comb::{ConstraintKind, PowerConstraint};
use qcomb_core::constants::{carrier_from_wavelength, db_to_linear};
use qcomb_core::oracle::{check_protocol, random_case, ValidateOptions, ValidationCase};
use qcomb_core::snr::{
    asymptotic_snr, evaluate_constrained, local_to_global, phase_noise_snr, snr_c_star2, Allocation, LineScenario,
    LoPower, Objective, ProtocolParams, RunSpec,
};
use qcomb_core::{Protocol, ReceiverKind};

const M: usize = 1001;
const POWER: f64 = 0.015;
const WAVELENGTH: f64 = 1563e-9;
const G15: f64 = 15.0;
const RANDOM_CONFIGS: u64 = 200;
const MC_CONFIGS: u64 = 20;
const MC_SAMPLES: usize = 100_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn spec(protocol: Protocol, kind: ConstraintKind, kappa: f64, gain_db: f64) -> RunSpec<f64> {
    let g = db_to_linear(gain_db);
    RunSpec {
        protocol,
        constraint: PowerConstraint::new(kind, POWER).unwrap(),
        lines: M,
        duration: 1.0,
        carrier: carrier_from_wavelength(WAVELENGTH),
        gain_signal: g,
        gain_lo: g,
        line: 137,
        kappa,
        theta: 0.0,
        thermal: 0.0,
        delta: None,
        allocation: Allocation::Symmetric,
        objective: Objective::Local,
        tol: 1e-7,
    }
}

/// Case for a protocol: intra formulas need real amplitudes.
fn config_for(seed: u64, protocol: Protocol) -> ValidationCase {
    let n_half = 2 + (seed % 7) as usize;
    random_case(seed, n_half, !protocol.structure.is_intra()).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let opts = ValidateOptions::default();
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    let mut missing = 0;
    for seed in 0..RANDOM_CONFIGS {
        for p in Protocol::quantum_four() {
            let case = config_for(seed, p);
            let e = check_protocol(&case, p, case.beats[0], &opts).unwrap();
            match e.relative_deviation {
                Some(d) => worst = worst.max(d),
                None => missing += 1,
            }
            checks += 1;
        }
    }
    outcome(
        worst <= 1e-9 && missing == 0,
        format!("{RANDOM_CONFIGS} configs x 4 protocols = {checks} checks, max relative deviation {worst:.2e}, {missing} without closed form"),
    )
}

fn monte_carlo_agreement() -> Outcome {
    let opts = ValidateOptions { mc_samples: Some(MC_SAMPLES), seed: 2024, ..Default::default() };
    let mut worst: f64 = 0.0;
    let mut fails = 0;
    for seed in 0..MC_CONFIGS {
        for p in Protocol::quantum_four() {
            let case = config_for(seed, p);
            let e = check_protocol(&case, p, case.beats[0], &opts).unwrap();
            let s = e.mc_deviation_sigma.unwrap();
            worst = worst.max(s);
            fails += usize::from(s > opts.sigma_limit);
        }
    }
    let p = Protocol::cross(ReceiverKind::DivisionReceiver);
    let case = config_for(3, p);
    let a = check_protocol(&case, p, case.beats[0], &opts).unwrap().monte_carlo.unwrap();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = single.install(|| check_protocol(&case, p, case.beats[0], &opts).unwrap().monte_carlo.unwrap());
    let exact = a.variance.to_bits() == b.variance.to_bits() && a.mean == b.mean && a.std_error.to_bits() == b.std_error.to_bits();
    outcome(
        fails == 0 && exact,
        format!(
            "{} runs at K = {MC_SAMPLES}, max deviation {worst:.2} sigma, {fails} beyond 4 sigma, reproducible across thread counts: {exact}",
            MC_CONFIGS * 4
        ),
    )
}

fn fifteen_db_at_unity() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for p in Protocol::quantum_four() {
        let r = evaluate_constrained(&spec(p, ConstraintKind::SamplePower, 1.0, G15)).unwrap();
        pass &= (r.advantage_db - 15.0).abs() <= 0.05;
        parts.push(format!("{} {:.4} dB", p.label(), r.advantage_db));
    }
    outcome(pass, parts.join(", "))
}

fn classical_factor_two() -> Outcome {
    let run = |receiver| {
        let mut s = spec(Protocol::classical(receiver), ConstraintKind::SamplePower, 1.0, 0.0);
        s.allocation = Allocation::Optimized;
        evaluate_constrained(&s).unwrap().local_snr2
    };
    let ratio = run(ReceiverKind::DivisionReceiver) / run(ReceiverKind::HeterodyneSubtraction);
    outcome((ratio - 0.5).abs() <= 1e-3, format!("SNR2_div / SNR2_het = {ratio:.6}"))
}

fn global_gaps() -> Outcome {
    let gap = |kind| {
        let run = |receiver| {
            let mut s = spec(Protocol::classical(receiver), kind, 0.0, 0.0);
            s.allocation = Allocation::Optimized;
            s.objective = Objective::Global;
            evaluate_constrained(&s).unwrap().global_snr2
        };
        10.0 * (run(ReceiverKind::HeterodyneSubtraction) / run(ReceiverKind::DivisionReceiver)).log10()
    };
    let sample = gap(ConstraintKind::SamplePower);
    let detector = gap(ConstraintKind::DetectorPower);
    let pass = (sample - 10.0 * 5f64.log10()).abs() <= 0.1 && (detector - 10.0 * 2.5f64.log10()).abs() <= 0.1;
    outcome(pass, format!("sample {sample:.3} dB, detector {detector:.3} dB"))
}

fn loss_robustness() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for p in Protocol::quantum_four() {
        let adv = |k| evaluate_constrained(&spec(p, ConstraintKind::SamplePower, k, G15)).unwrap().advantage_db;
        let drop = adv(1.0) - adv(0.0);
        let fragile = p == Protocol::intra(ReceiverKind::DivisionReceiver);
        pass &= if fragile { drop > 10.0 } else { drop.abs() <= 1.5 };
        parts.push(format!("{} drop {drop:.3} dB", p.label()));
    }
    outcome(pass, parts.join(", "))
}

fn snr_star_magnitude() -> Outcome {
    let s = snr_c_star2(POWER, 1.0, M, carrier_from_wavelength(WAVELENGTH));
    outcome((s / 1.18e11 - 1.0).abs() <= 0.01, format!("SNR_C*^2 = {s:.4e}"))
}

fn phase_noise_limits() -> Outcome {
    let mut worst: f64 = 0.0;
    for (a2, b2, ga, gb) in [(1e8_f64, 3e8, 31.62, 31.62), (2e9, 5e8, 4.0, 17.0), (1.0, 1.0, 1.0, 40.0)] {
        let base = ProtocolParams { lines: M, a2, b2, gain_a: ga, gain_b: gb, kappa: 1.0, theta: 0.0, delta: Some(0.0) };
        let eq1 = asymptotic_snr(Protocol::intra(ReceiverKind::HeterodyneSubtraction), &base).unwrap();
        worst = worst.max((phase_noise_snr(&base).unwrap() / eq1 - 1.0).abs());
        let flipped = phase_noise_snr(&ProtocolParams { delta: Some(FRAC_PI_2), ..base }).unwrap();
        let expect = a2 * b2 / (M as f64 * (a2 * gb + b2 * ga));
        worst = worst.max((flipped / expect - 1.0).abs());
    }
    outcome(worst <= 1e-12, format!("max relative error {worst:.2e}"))
}

fn local_global_bridge() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in Protocol::quantum_four().into_iter().chain([
        Protocol::classical(ReceiverKind::HeterodyneSubtraction),
        Protocol::classical(ReceiverKind::DivisionReceiver),
    ]) {
        for i in 1..=9 {
            let k = i as f64 / 10.0;
            let s = LineScenario {
                protocol: p,
                n_half: 60,
                line: 11,
                kappa: k,
                theta: 0.0,
                background_theta: 0.0,
                thermal: 0.0,
                gain_signal: 20.0,
                gain_lo: 20.0,
                a2: 1e9,
                lo: LoPower::Finite(2e9),
            };
            let bridged = local_to_global(p.receiver, k) * s.local_snr2().unwrap();
            worst = worst.max((s.global_snr2().unwrap() / bridged - 1.0).abs());
        }
    }
    outcome(worst <= 1e-10, format!("max relative error {worst:.2e} over 6 protocols x 9 kappa"))
}

fn optimizer_sanity() -> Outcome {
    let mut pass = true;
    let mut off = Vec::new();
    let mut worst: f64 = 0.0;
    let cases = [
        (ReceiverKind::DivisionReceiver, ConstraintKind::SamplePower),
        (ReceiverKind::DivisionReceiver, ConstraintKind::DetectorPower),
        (ReceiverKind::HeterodyneSubtraction, ConstraintKind::DetectorPower),
    ];
    for gain_db in [G15, 0.0] {
        for (receiver, kind) in cases {
            let protocols = if gain_db == 0.0 {
                vec![Protocol::classical(receiver)]
            } else {
                vec![Protocol::intra(receiver), Protocol::cross(receiver)]
            };
            for (p, k) in protocols.into_iter().flat_map(|p| [0.1, 0.5, 1.0].map(|k| (p, k))) {
                let mut s = spec(p, kind, k, gain_db);
                s.allocation = Allocation::Optimized;
                s.tol = 1e-6;
                let f = evaluate_constrained(&s).unwrap().split;
                let d = (f - 0.5).abs();
                worst = worst.max(d);
                if d > 1e-3 {
                    pass = false;
                    off.push(format!("{} {kind:?} G={gain_db} dB kappa={k}: f*={f:.5}", p.label()));
                }
            }
        }
    }
    let detail = if off.is_empty() {
        format!("max |f* - 0.5| = {worst:.2e} at G = 15 dB and 0 dB")
    } else {
        format!("max |f* - 0.5| = {worst:.2e}; outside 1e-3: {}", off.join("; "))
    };
    outcome(pass, detail)
}

type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 oracle equivalence", oracle_equivalence, Some(Duration::from_secs(60))),
        ("2 Monte Carlo agreement", monte_carlo_agreement, Some(Duration::from_secs(120))),
        ("3 15 dB advantage at kappa = 1", fifteen_db_at_unity, None),
        ("4 classical division/heterodyne factor two", classical_factor_two, None),
        ("5 classical global-SNR gaps at kappa = 0", global_gaps, None),
        ("6 loss robustness contrast", loss_robustness, Some(Duration::from_secs(5))),
        ("7 SNR_C*^2 magnitude", snr_star_magnitude, None),
        ("8 phase-noise limits", phase_noise_limits, None),
        ("9 local/global bridge", local_global_bridge, None),
        ("10 optimizer symmetric split", optimizer_sanity, None),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run, limit) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let t = Instant::now();
        let mut o = run();
        let elapsed = t.elapsed();
        if let Some(limit) = limit {
            if elapsed > limit {
                o.pass = false;
                o.detail.push_str(&format!("; runtime {elapsed:.1?} exceeds {limit:?}"));
            }
        }
        failed += usize::from(!o.pass);
        println!("{} criterion {name}: {} ({elapsed:.2?})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
