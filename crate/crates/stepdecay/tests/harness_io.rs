//! Harness-level behavior: determinism of emitted files, schedule echo,
//! config loading, sample accounting, and schedule rejection reporting.

use stepdecay::harness::{
    equal_modulo_wall_ms, parse_csv, run_convergence, run_identification,
    run_stepsize_sensitivity, AlgorithmTag, ExperimentConfig, HarnessError, OutputFormat,
    SamplingMode, ScheduleOverride,
};
use stepdecay::problems::{ModelTag, ProblemTag};

fn quick_config(dir: &std::path::Path, name: &str) -> ExperimentConfig {
    ExperimentConfig {
        dim: 5,
        trials: 2,
        seed: 42,
        mode: SamplingMode::Finite,
        schedule_override: Some(ScheduleOverride {
            inner_iters: Some(200),
            stages: Some(3),
            ensemble_size: Some(2),
        }),
        out: dir.join(name),
        ..ExperimentConfig::default()
    }
}

#[test]
fn convergence_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = quick_config(dir.path(), "a.csv");
    let a = run_convergence(&config).unwrap();
    std::thread::sleep(std::time::Duration::from_millis(5));
    config.out = dir.path().join("b.csv");
    let b = run_convergence(&config).unwrap();
    assert_eq!(a.aggregate.final_dist, b.aggregate.final_dist);
    let ta = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    let tb = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert!(equal_modulo_wall_ms(&ta, &tb));
}

#[test]
fn convergence_csv_embeds_schedule_echo_and_reference_rows() {
    let dir = tempfile::tempdir().unwrap();
    let config = quick_config(dir.path(), "echo.csv");
    run_convergence(&config).unwrap();
    let text = std::fs::read_to_string(&config.out).unwrap();
    for key in [
        "# schedule.stages",
        "# schedule.inner_iters",
        "# schedule.initial_step",
        "# profile.mu",
    ] {
        assert!(text.contains(key), "missing {key}");
    }
    let (header, rows) = parse_csv(&text).unwrap();
    assert_eq!(
        header,
        vec!["trial", "stage", "inner_iter", "samples", "dist", "loss", "wall_ms"]
    );
    // Reference rows carry trial = -1 and the halving values.
    let reference: Vec<_> = rows.iter().filter(|r| r[0] == "-1").collect();
    assert_eq!(reference.len(), 4); // T = 3 stages → t = 0..=3
    let d0: f64 = reference[0][4].parse().unwrap();
    let d1: f64 = reference[1][4].parse().unwrap();
    assert_eq!(d0, 0.25);
    assert_eq!(d1, 0.125);
}

#[test]
fn sample_accounting_is_exact_in_finite_mode() {
    let dir = tempfile::tempdir().unwrap();
    let config = quick_config(dir.path(), "acct.csv");
    run_convergence(&config).unwrap();
    let text = std::fs::read_to_string(&config.out).unwrap();
    let (_, rows) = parse_csv(&text).unwrap();
    // Stage rows sit at exact multiples of (K+1) index draws.
    for row in rows.iter().filter(|r| r[2] == "-1" && r[0] != "-1") {
        let stage: u64 = row[1].parse().unwrap();
        let samples: u64 = row[3].parse().unwrap();
        assert_eq!(samples, (stage + 1) * 201);
    }
}

#[test]
fn schedule_rejection_reports_violated_bound() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig {
        dim: 5,
        p_fail: 0.45, // tube shrinks with 1 − 2p_fail; R₀ = 0.25 falls outside
        out: dir.path().join("never.csv"),
        ..ExperimentConfig::default()
    };
    match run_convergence(&config) {
        Err(HarnessError::Schedule(e)) => {
            let msg = e.to_string();
            assert!(msg.contains("0.25"), "message should carry the radius: {msg}");
        }
        other => panic!("expected schedule rejection, got {:?}", other.is_ok()),
    }
    assert!(!config.out.exists());
}

#[test]
fn rpmba_runs_and_traces_stage_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = quick_config(dir.path(), "rpmba.csv");
    config.algorithm = AlgorithmTag::Rpmba;
    config.r0 = 0.1; // high-probability precondition R₀ ≤ γμ/(4η)
    let outcome = run_convergence(&config).unwrap();
    assert_eq!(outcome.traces.len(), 2);
    for trace in &outcome.traces {
        assert_eq!(trace.stages.len(), 3);
        for (t, s) in trace.stages.iter().enumerate() {
            let scale = 2f64.powi(t as i32);
            assert_eq!(s.rho, outcome.aggregate.schedule.initial_prox_weight * scale);
            assert_eq!(s.alpha, outcome.aggregate.schedule.initial_step / scale);
            assert_eq!(
                s.tolerance,
                outcome.aggregate.schedule.initial_tolerance / scale
            );
        }
    }
}

#[test]
fn sensitivity_p_zero_reproduces_convergence_statistics() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = quick_config(dir.path(), "sens.csv");
    config.sensitivity_p_min = -1;
    config.sensitivity_p_max = 1;
    config.model = ModelTag::Subgradient;
    let outcome = run_stepsize_sensitivity(&config).unwrap();
    assert_eq!(outcome.rows.len(), 3);
    for row in &outcome.rows {
        assert!(row.mean_iters <= outcome.cap as f64);
        assert_eq!(row.model, "subgradient");
    }

    // The p = 0 row must match a direct convergence run at the same seed.
    let mut direct = config.clone();
    direct.step_scale_exponent = 0;
    direct.max_total_samples = Some(outcome.cap);
    direct.stop_dist = None;
    direct.out = dir.path().join("direct.csv");
    let conv = run_convergence(&direct).unwrap();
    let iters: Vec<f64> = conv
        .aggregate
        .samples_to_target
        .iter()
        .map(|h| h.unwrap_or(outcome.cap).min(outcome.cap) as f64)
        .collect();
    let mean = iters.iter().sum::<f64>() / iters.len() as f64;
    let p0 = outcome.rows.iter().find(|r| r.p == 0).unwrap();
    assert_eq!(p0.mean_iters, mean);
}

#[test]
fn identification_runs_all_methods_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig {
        problem: ProblemTag::Logistic,
        model: ModelTag::ProxGrad,
        dim: 10,
        n_samples: 200,
        sparsity: 2,
        tau: 0.05,
        eps: 1e-2,
        seed: 5,
        schedule_override: Some(ScheduleOverride {
            inner_iters: Some(500),
            stages: Some(4),
            ensemble_size: None,
        }),
        out: dir.path().join("ident_a.csv"),
        ..ExperimentConfig::default()
    };
    let a = run_identification(&config).unwrap();
    let methods: std::collections::BTreeSet<_> =
        a.rows.iter().map(|r| r.method.clone()).collect();
    assert_eq!(
        methods.into_iter().collect::<Vec<_>>(),
        vec!["proxgrad-poly", "rda", "rmba"]
    );
    let mut config_b = config.clone();
    config_b.out = dir.path().join("ident_b.csv");
    run_identification(&config_b).unwrap();
    let ta = std::fs::read_to_string(&config.out).unwrap();
    let tb = std::fs::read_to_string(&config_b.out).unwrap();
    // Identification rows carry no wall_ms column; files must be identical.
    assert_eq!(ta, tb);
}

#[test]
fn json_output_mirrors_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = quick_config(dir.path(), "out.json");
    config.format = OutputFormat::Json;
    run_convergence(&config).unwrap();
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&config.out).unwrap()).unwrap();
    let records = doc["records"].as_array().unwrap();
    assert!(!records.is_empty());
    for key in ["trial", "stage", "inner_iter", "samples", "dist", "loss", "wall_ms"] {
        assert!(records[0].get(key).is_some(), "missing {key}");
    }
    assert!(doc["meta"]["schedule.stages"].is_string());
}

#[test]
fn config_json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let config = quick_config(dir.path(), "c.csv");
    let path = dir.path().join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(&config).unwrap()).unwrap();
    let loaded = ExperimentConfig::from_json_file(&path).unwrap();
    assert_eq!(loaded.dim, config.dim);
    assert_eq!(loaded.seed, config.seed);
    assert_eq!(loaded.mode, config.mode);
}
