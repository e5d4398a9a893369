// SPDX-License-Identifier: Apache-2.0
use num_complex::Complex;

use qcomb_core::comb::{build_mode_lattice, CombGeometry, CombRole, CombSpec};
use qcomb_core::constants::db_to_linear;
use qcomb_core::oracle::{
    check_protocol, default_battery, monte_carlo_statistics, validate_cases, variance_quadratic_form, ValidateOptions,
    ValidationCase,
};
use qcomb_core::receivers::{
    noise_coefficients, ratio_mean, variance_as_printed, variance_closed_form, Experiment, NoiseCoefficients,
};
use qcomb_core::sample::{single_line_sample, SampleSpec};
use qcomb_core::squeezing::{build_covariance, CovarianceModel, SqueezingSpec};
use qcomb_core::{Protocol, ReceiverKind, SqueezingStructure};

fn uniform_experiment(n_half: usize, a: f64, b: f64, structure: SqueezingStructure, g: f64, sample: SampleSpec<f64>) -> Experiment<f64> {
    let geo = CombGeometry::for_lines(n_half, 1.2e15, 1.0).unwrap();
    let sqz = match structure {
        SqueezingStructure::Classical => SqueezingSpec::classical(n_half),
        s => SqueezingSpec::uniform(s, n_half, g).unwrap(),
    };
    Experiment::new(
        CombSpec::uniform(CombRole::Signal, geo, n_half, Complex::new(a, 0.0)).unwrap(),
        CombSpec::uniform(CombRole::LocalOscillator, geo, n_half, Complex::new(b, 0.0)).unwrap(),
        sqz.clone(),
        sqz,
        sample,
    )
    .unwrap()
}

fn paths(p: Protocol, exp: &Experiment<f64>, m: i64) -> (NoiseCoefficients<f64>, CovarianceModel<f64>) {
    let c = noise_coefficients(p.receiver, &exp.signal, &exp.lo, &exp.sample, m).unwrap();
    let cov = build_covariance(c.lattice(), &exp.sqz_signal, &exp.sqz_lo, &exp.sample).unwrap();
    (c, cov)
}

#[test]
fn printed_division_forms_miss_only_the_carrier_coherence() {
    // At G = 1 with uniform real combs A = B = a, the carrier summand printed as
    // independent terms exceeds the coherent one by a²(r² − 1)·(1/a⁴).
    let a = 7.0;
    for kappa in [0.0, 0.4, 1.0] {
        let sample = single_line_sample(5, 2, kappa, 0.0).unwrap();
        let p = Protocol::classical(ReceiverKind::DivisionReceiver);
        let exp = uniform_experiment(5, a, a, SqueezingStructure::Classical, 1.0, sample);
        let (c, cov) = paths(p, &exp, 2);
        let oracle = variance_quadratic_form(&c, &cov).unwrap();
        let r = ratio_mean(&exp.signal, &exp.lo, &exp.sample, 2).unwrap().ratio.re;
        let printed = variance_as_printed(p, &exp, 2).unwrap();
        let predicted = (r * r - 1.0) / (a * a);
        assert!((printed - oracle - predicted).abs() < 1e-13, "κ={kappa}: {printed} {oracle} {predicted}");
    }
    // The same carrier term appears for both squeezed division structures at G = 1.
    for st in [SqueezingStructure::IntraSelfReferred, SqueezingStructure::CrossLineEntangled] {
        let exp = uniform_experiment(5, a, a, st, 1.0, single_line_sample(5, 2, 0.4, 0.0).unwrap());
        let p = Protocol::new(ReceiverKind::DivisionReceiver, st).unwrap();
        let r: f64 = 0.7;
        let gap = variance_as_printed(p, &exp, 2).unwrap() - variance_closed_form(p, &exp, 2).unwrap();
        assert!((gap - (r * r - 1.0) / (a * a)).abs() < 1e-13);
    }
    // Heterodyne forms are exact as printed.
    let exp = uniform_experiment(5, a, 2.0 * a, SqueezingStructure::CrossLineEntangled, 9.0, single_line_sample(5, 2, 0.4, 0.1).unwrap());
    let p = Protocol::cross(ReceiverKind::HeterodyneSubtraction);
    assert_eq!(variance_as_printed(p, &exp, 2).unwrap(), variance_closed_form(p, &exp, 2).unwrap());
}

#[test]
fn division_variance_is_linear_in_thermal_occupation() {
    let n_half = 4;
    let h = n_half as i64;
    let kappa: Vec<f64> = (-h..=h).map(|n| if n == 0 { 1.0 } else { 0.2 + 0.07 * (n + h) as f64 }).collect();
    let thermal: Vec<f64> = (-h..=h).map(|n| 0.01 * (n + h) as f64).collect();
    let cold = SampleSpec::new(kappa.clone(), vec![0.0; 9], vec![0.0; 9]).unwrap();
    let warm = cold.clone().with_thermal(thermal.clone()).unwrap();
    for st in [SqueezingStructure::IntraSelfReferred, SqueezingStructure::CrossLineEntangled] {
        let p = Protocol::new(ReceiverKind::DivisionReceiver, st).unwrap();
        let geo = CombGeometry::for_lines(n_half, 1.2e15, 1.0).unwrap();
        let amps = |s: f64| (-h..=h).map(|n| Complex::new(s + n as f64, 0.0)).collect::<Vec<_>>();
        let a = CombSpec::new(CombRole::Signal, geo, amps(20.0)).unwrap();
        let b = CombSpec::new(CombRole::LocalOscillator, geo, amps(30.0)).unwrap();
        let sqz = SqueezingSpec::uniform(st, n_half, 12.0).unwrap();
        let var = |s: &SampleSpec<f64>| {
            let exp = Experiment::new(a.clone(), b.clone(), sqz.clone(), sqz.clone(), s.clone()).unwrap();
            let (c, cov) = paths(p, &exp, 3);
            (variance_quadratic_form(&c, &cov).unwrap(), ratio_mean(&a, &b, s, 3).unwrap().denominator.norm_sqr())
        };
        let (v0, d2) = var(&cold);
        let (v1, _) = var(&warm);
        let expected: f64 = (-h..=h)
            .map(|n| {
                let i = (n + h) as usize;
                let k = kappa[i];
                2.0 * k * (1.0 - k) * (a.amplitude(n).norm_sqr() + b.amplitude(n).norm_sqr()) * 2.0 * thermal[i]
            })
            .sum();
        assert!(((v1 - v0) * d2 / expected - 1.0).abs() < 1e-12, "{}", st.label());
    }
}

#[test]
fn quadratic_form_examples() {
    let exp = uniform_experiment(8, 3.0, 4.0, SqueezingStructure::Classical, 1.0, SampleSpec::transparent(8));
    let (c, cov) = paths(Protocol::classical(ReceiverKind::HeterodyneSubtraction), &exp, 1);
    assert!((variance_quadratic_form(&c, &cov).unwrap() / (17.0 * 25.0) - 1.0).abs() < 1e-14);
    let zero = uniform_experiment(2, 0.0, 0.0, SqueezingStructure::Classical, 1.0, SampleSpec::transparent(2));
    let (c, cov) = paths(Protocol::classical(ReceiverKind::HeterodyneSubtraction), &zero, 1);
    assert_eq!(variance_quadratic_form(&c, &cov).unwrap(), 0.0);
}

#[test]
fn unit_gain_structures_share_identity_covariance() {
    let lattice = build_mode_lattice(3);
    let sample = SampleSpec::transparent(3);
    let reference = build_covariance(&lattice, &SqueezingSpec::classical(3), &SqueezingSpec::classical(3), &sample).unwrap().to_dense();
    for st in [SqueezingStructure::IntraSelfReferred, SqueezingStructure::IntraCrossReferred, SqueezingStructure::CrossLineEntangled] {
        let s = SqueezingSpec::uniform(st, 3, 1.0).unwrap();
        assert_eq!(build_covariance(&lattice, &s, &s, &sample).unwrap().to_dense(), reference);
    }
}

#[test]
fn monte_carlo_classical_heterodyne() {
    let exp = uniform_experiment(8, 3.0, 4.0, SqueezingStructure::Classical, 1.0, SampleSpec::transparent(8));
    let (c, cov) = paths(Protocol::classical(ReceiverKind::HeterodyneSubtraction), &exp, 1);
    let mc = monte_carlo_statistics(&c, &cov, Complex::new(0.0, 0.0), 100_000, 5).unwrap();
    assert!((mc.variance - 17.0 * 25.0).abs() < 3.0 * mc.std_error, "{mc:?}");
    assert!(monte_carlo_statistics(&c, &cov, Complex::new(0.0, 0.0), 999, 5).is_err());
}

#[test]
fn monte_carlo_error_shrinks_as_inverse_root_k() {
    let g = db_to_linear(15.0);
    let exp = uniform_experiment(6, 20.0, 30.0, SqueezingStructure::CrossLineEntangled, g, single_line_sample(6, 2, 0.3, 0.1).unwrap());
    let (c, cov) = paths(Protocol::cross(ReceiverKind::HeterodyneSubtraction), &exp, 2);
    let qf = variance_quadratic_form(&c, &cov).unwrap();
    let runs: Vec<_> = [1_000, 10_000, 100_000]
        .iter()
        .map(|&k| monte_carlo_statistics(&c, &cov, Complex::new(0.0, 0.0), k, 11).unwrap())
        .collect();
    for w in runs.windows(2) {
        let ratio = w[0].std_error / w[1].std_error;
        assert!((ratio / 10f64.sqrt() - 1.0).abs() < 0.25, "{ratio}");
    }
    for r in &runs {
        assert!((r.variance - qf).abs() < 4.0 * r.std_error);
    }
}

#[test]
fn battery_with_monte_carlo() {
    let cases: Vec<ValidationCase> = default_battery(4).unwrap();
    let opts = ValidateOptions { mc_samples: Some(10_000), seed: 3, ..Default::default() };
    let report = validate_cases(&cases, &opts).unwrap();
    assert!(report.pass, "{report:#?}");
    assert!(report.max_relative_deviation <= 1e-9);
    assert!(report.max_mc_deviation_sigma.unwrap() <= 4.0);
    let json = serde_json::to_string(&report).unwrap();
    assert!(json.starts_with("{\"tolerance_rel\":"));
}

#[test]
fn negative_control_reports_failure() {
    let case = default_battery(4).unwrap().remove(1);
    let opts = ValidateOptions { negative_control: true, ..Default::default() };
    let e = check_protocol(&case, Protocol::intra(ReceiverKind::DivisionReceiver), 2, &opts).unwrap();
    assert!(!e.pass);
    assert!(e.relative_deviation.unwrap() > 0.0);
    assert!(e.note.unwrap().contains("negative control"));
}
