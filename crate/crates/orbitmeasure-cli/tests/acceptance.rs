//! Acceptance gate: each test exercises one release criterion at its
//! stated tolerance and prints a single pass/fail line (visible with
//! `cargo test -- --nocapture`).

use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use orbitmeasure::ensemble::{
    check_conditions, gauge_invariance_check, jacobian_factor, joint_density, orbit_chart_pullback,
    EnsembleSpec,
};
use orbitmeasure::instances::{build_instance, InstanceParams};
use orbitmeasure::tol::Tolerances;
use orbitmeasure::validation::{
    integration_check, ks_compare, ks_compare_with_density, sample, DensitySource,
};

fn tol() -> Tolerances {
    Tolerances::default()
}

fn build(key: &str, params: InstanceParams) -> EnsembleSpec {
    build_instance(key, &params, &tol()).unwrap()
}

fn report(name: &str, pass: bool, detail: &str) {
    println!("{name}: {}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name} failed: {detail}");
}

#[test]
fn criterion_1_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(1001);
    let mut configs: Vec<(&str, InstanceParams, bool)> = Vec::new();
    for n in 2..=5 {
        configs.push(("gaussian-beta1", InstanceParams::n(n), true));
        configs.push(("gaussian-beta2", InstanceParams::n(n), true));
    }
    for n in 2..=4 {
        configs.push(("algebra-u", InstanceParams::n(n), true));
        configs.push(("unitary-group", InstanceParams::n(n), true));
    }
    configs.push(("su2-group", InstanceParams::default(), false));

    let mut failures = Vec::new();
    for (key, params, expect_unit) in configs {
        let spec = build(key, params);
        let mut ratios = Vec::with_capacity(50);
        for _ in 0..50 {
            let t = spec.sample_t(&mut rng);
            let eval = joint_density(&spec, &t, &tol()).unwrap();
            let reference = spec.oracle_at(&t).unwrap();
            ratios.push(eval.density / reference);
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let var =
            ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (ratios.len() - 1) as f64;
        let cv = var.sqrt() / mean.abs();
        if cv >= 1e-6 {
            failures.push(format!("{}: cv {cv:.3e}", spec.name()));
        }
        if expect_unit && (mean - 1.0).abs() >= 1e-6 {
            failures.push(format!("{}: constant {mean}", spec.name()));
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(30) {
        failures.push(format!("runtime {elapsed:?} >= 30s"));
    }
    report(
        "criterion 1 (master-formula oracle equivalence)",
        failures.is_empty(),
        &failures.join("; "),
    );
}

#[test]
fn criterion_2_beta_scaling() {
    let mut rng = ChaCha12Rng::seed_from_u64(1002);
    let mut failures = Vec::new();
    for (key, beta) in [
        ("gaussian-beta1", 1.0),
        ("gaussian-beta2", 2.0),
        ("gaussian-beta4", 4.0),
    ] {
        let spec = build(key, InstanceParams::n(3));
        let exponent = beta * 3.0; // beta * n(n-1)/2 at n = 3
        for _ in 0..20 {
            let t = spec.sample_t(&mut rng);
            let c: f64 = 0.3 + 2.2 * rng.gen::<f64>();
            let j = jacobian_factor(&spec, &t, &tol()).unwrap();
            let dilated: Vec<f64> = t.iter().map(|v| c * v).collect();
            let jc = jacobian_factor(&spec, &dilated, &tol()).unwrap();
            let expected = c.powf(exponent) * j;
            let rel = (jc - expected).abs() / expected.abs().max(1e-300);
            if rel >= 1e-8 {
                failures.push(format!("{key} at c={c}: rel {rel:.3e}"));
            }
        }
    }
    report(
        "criterion 2 (beta-scaling law)",
        failures.is_empty(),
        &failures.join("; "),
    );
}

#[test]
fn criterion_3_two_route_consistency() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(1003);
    let mut failures = Vec::new();
    for n in [2usize, 3] {
        let spec = build("gaussian-beta2", InstanceParams::n(n));
        for _ in 0..50 {
            let t = spec.sample_t(&mut rng);
            let j = jacobian_factor(&spec, &t, &tol()).unwrap();
            let pb = orbit_chart_pullback(&spec, &t, &tol()).unwrap();
            let rel = (pb - j).abs() / j.abs().max(1e-300);
            if rel >= 1e-5 {
                failures.push(format!("n={n} at {t:?}: rel {rel:.3e}"));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(60) {
        failures.push(format!("runtime {elapsed:?} >= 60s"));
    }
    report(
        "criterion 3 (two-route consistency)",
        failures.is_empty(),
        &failures.join("; "),
    );
}

#[test]
fn criterion_4_gauge_invariance() {
    let mut rng = ChaCha12Rng::seed_from_u64(1004);
    let mut failures = Vec::new();
    for key in ["gaussian-beta2", "unitary-group"] {
        let spec = build(key, InstanceParams::n(2));
        for _ in 0..20 {
            let t = spec.sample_t(&mut rng);
            let g = spec.random_group_element(&mut rng, 0.5).unwrap();
            let residual = gauge_invariance_check(&spec, &g, &t, &tol()).unwrap();
            if residual >= 1e-5 {
                failures.push(format!("{key} at {t:?}: residual {residual:.3e}"));
            }
        }
    }
    report(
        "criterion 4 (gauge invariance)",
        failures.is_empty(),
        &failures.join("; "),
    );
}

#[test]
fn criterion_5_condition_suite() {
    let mut rng = ChaCha12Rng::seed_from_u64(1005);
    let registry: Vec<(&str, InstanceParams)> = vec![
        ("gaussian-beta1", InstanceParams::n(2)),
        ("gaussian-beta1", InstanceParams::n(3)),
        ("gaussian-beta2", InstanceParams::n(2)),
        ("gaussian-beta2", InstanceParams::n(3)),
        ("gaussian-beta4", InstanceParams::n(2)),
        ("gaussian-beta4", InstanceParams::n(3)),
        ("spd-wishart", InstanceParams::nm(2, 3)),
        ("spd-wishart", InstanceParams::nm(3, 4)),
        ("unitary-group", InstanceParams::n(2)),
        ("unitary-group", InstanceParams::n(3)),
        ("su2-group", InstanceParams::default()),
        ("algebra-u", InstanceParams::n(2)),
        ("algebra-u", InstanceParams::n(3)),
        ("chiral-beta2", InstanceParams::nm(2, 1)),
        ("chiral-beta2", InstanceParams::nm(2, 2)),
        ("chiral-beta2", InstanceParams::nm(3, 2)),
    ];
    let mut failures = Vec::new();
    for (key, params) in registry {
        let spec = build(key, params);
        let mut bad = 0usize;
        for _ in 0..100 {
            let t = spec.sample_t(&mut rng);
            let rep = check_conditions(&spec, &t, &tol()).unwrap();
            if !(rep.pass && rep.regular && !rep.in_singular_set) {
                bad += 1;
            }
        }
        if bad > 0 {
            failures.push(format!("{}: {bad}/100 points failed", spec.name()));
        }
    }
    report(
        "criterion 5 (condition suite)",
        failures.is_empty(),
        &failures.join("; "),
    );
}

#[test]
fn criterion_6_monte_carlo_law() {
    let n_samples = 100_000;
    let mut failures = Vec::new();

    let cases: Vec<(&str, InstanceParams, Vec<&str>)> = vec![
        (
            "gaussian-beta1",
            InstanceParams::n(2),
            vec!["max-eigenvalue", "spacing"],
        ),
        (
            "gaussian-beta2",
            InstanceParams::n(2),
            vec!["max-eigenvalue", "spacing"],
        ),
        (
            "spd-wishart",
            InstanceParams::nm(2, 3),
            vec!["max-eigenvalue"],
        ),
        (
            "su2-group",
            InstanceParams::default(),
            vec!["max-eigenvalue"],
        ),
        (
            "unitary-group",
            InstanceParams::n(2),
            vec!["max-eigenvalue"],
        ),
    ];
    for (key, params, statistics) in cases {
        let start = Instant::now();
        let spec = build(key, params);
        let batch = sample(&spec, n_samples, 2024).unwrap();
        for statistic in statistics {
            let rep = ks_compare(&spec, &batch, statistic, &tol()).unwrap();
            if rep.ks_distance.is_nan() || rep.ks_distance >= 0.01 {
                failures.push(format!(
                    "{} {statistic}: ks {:.4}",
                    spec.name(),
                    rep.ks_distance
                ));
            }
        }
        let elapsed = start.elapsed();
        if elapsed >= Duration::from_secs(180) {
            failures.push(format!("{}: runtime {elapsed:?} >= 3min", spec.name()));
        }
    }

    // Negative control: the wrong Vandermonde exponent must be detected.
    for (key, wrong_power) in [("gaussian-beta1", 2), ("gaussian-beta2", 3)] {
        let spec = build(key, InstanceParams::n(2));
        let batch = sample(&spec, n_samples, 2024).unwrap();
        let perturbed = move |t: &[f64]| -> orbitmeasure::Result<f64> {
            let gap = (t[1] - t[0]).abs();
            Ok(gap.powi(wrong_power) * (-(t[0] * t[0] + t[1] * t[1]) / 2.0).exp())
        };
        let rep = ks_compare_with_density(
            &spec,
            &batch,
            "max-eigenvalue",
            &DensitySource::Custom(&perturbed),
            &tol(),
        )
        .unwrap();
        if rep.ks_distance.is_nan() || rep.ks_distance <= 0.05 {
            failures.push(format!(
                "control {key}: ks {:.4} not > 0.05",
                rep.ks_distance
            ));
        }
    }
    report(
        "criterion 6 (Monte-Carlo eigenvalue law)",
        failures.is_empty(),
        &failures.join("; "),
    );
}

#[test]
fn criterion_7_integration_identity() {
    let start = Instant::now();
    let mut failures = Vec::new();

    let spec = build("gaussian-beta2", InstanceParams::n(2));
    let rep = integration_check(&spec, "tr-x2", 200_000, 77, &tol()).unwrap();
    // The quadrature side must reproduce the exact second moment.
    if (rep.rhs - 4.0).abs() >= 0.02 {
        failures.push(format!("hermitian rhs {} != 4", rep.rhs));
    }
    if rep.rel_error.is_nan() || rep.rel_error >= 0.01 {
        failures.push(format!("hermitian rel error {}", rep.rel_error));
    }

    let spec = build("su2-group", InstanceParams::default());
    let rep = integration_check(&spec, "tr-x2", 200_000, 78, &tol()).unwrap();
    if (rep.rhs - 1.0).abs() >= 0.005 {
        failures.push(format!("su2 rhs {} != 1", rep.rhs));
    }
    if rep.rel_error.is_nan() || rep.rel_error >= 0.01 {
        failures.push(format!("su2 rel error {}", rep.rel_error));
    }

    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(120) {
        failures.push(format!("runtime {elapsed:?} >= 2min"));
    }
    report(
        "criterion 7 (radial integration identity)",
        failures.is_empty(),
        &failures.join("; "),
    );
}

#[test]
fn criterion_8_degenerate_parameters() {
    let mut failures = Vec::new();
    let cases: Vec<(&str, InstanceParams, Vec<f64>)> = vec![
        ("gaussian-beta1", InstanceParams::n(2), vec![0.7, 0.7]),
        (
            "gaussian-beta2",
            InstanceParams::n(3),
            vec![-0.3, -0.3, 1.1],
        ),
        ("gaussian-beta4", InstanceParams::n(2), vec![0.4, 0.4]),
        ("spd-wishart", InstanceParams::nm(2, 3), vec![2.0, 2.0]),
        ("unitary-group", InstanceParams::n(2), vec![1.2, 1.2]),
        ("su2-group", InstanceParams::default(), vec![0.0]),
        ("algebra-u", InstanceParams::n(2), vec![-0.5, -0.5]),
        ("chiral-beta2", InstanceParams::nm(2, 2), vec![0.9, 0.9]),
    ];
    for (key, params, t) in cases {
        let spec = build(key, params);
        let j = jacobian_factor(&spec, &t, &tol()).unwrap();
        if j.abs() >= 1e-10 {
            failures.push(format!("{} J({t:?}) = {j}", spec.name()));
        }
        let rep = check_conditions(&spec, &t, &tol()).unwrap();
        if !rep.in_singular_set {
            failures.push(format!("{} did not flag {t:?}", spec.name()));
        }
        if !rep.pass {
            failures.push(format!("{} suite failed at {t:?}", spec.name()));
        }
    }
    report(
        "criterion 8 (degenerate parameters)",
        failures.is_empty(),
        &failures.join("; "),
    );
}

#[test]
fn criterion_9_deterministic_outputs() {
    let bin = env!("CARGO_BIN_EXE_orbitmeasure");
    let dir = std::env::temp_dir();
    let tag = std::process::id();
    let mut failures = Vec::new();

    let runs: Vec<(&str, Vec<String>)> = vec![
        (
            "verify",
            vec![
                "verify".into(),
                "su2-group".into(),
                "--seed".into(),
                "7".into(),
                "--points".into(),
                "10".into(),
            ],
        ),
        (
            "sample",
            vec![
                "sample".into(),
                "gaussian-beta2".into(),
                "--n".into(),
                "2".into(),
                "--N".into(),
                "2000".into(),
                "--seed".into(),
                "11".into(),
            ],
        ),
        (
            "integrate",
            vec![
                "integrate".into(),
                "su2-group".into(),
                "--N".into(),
                "20000".into(),
                "--seed".into(),
                "5".into(),
                "--function".into(),
                "tr-x2".into(),
            ],
        ),
    ];
    for (name, args) in runs {
        let mut outputs = Vec::new();
        for run_index in 0..2 {
            let path = dir.join(format!("orbitmeasure-acceptance-{tag}-{name}-{run_index}"));
            let status = Command::new(bin)
                .args(&args)
                .arg("--out")
                .arg(&path)
                .status()
                .unwrap();
            if !status.success() {
                failures.push(format!("{name} run {run_index} exited {status}"));
            }
            outputs.push(std::fs::read(&path).unwrap_or_default());
            let _ = std::fs::remove_file(&path);
        }
        if outputs[0].is_empty() || outputs[0] != outputs[1] {
            failures.push(format!("{name} outputs differ between runs"));
        }
    }
    report(
        "criterion 9 (deterministic outputs)",
        failures.is_empty(),
        &failures.join("; "),
    );
}
