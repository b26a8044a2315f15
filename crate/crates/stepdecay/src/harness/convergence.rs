//! Multi-trial convergence experiments: seeded runs of the restarted
//! algorithms against the theorem schedules, with per-checkpoint traces and
//! aggregate statistics.

use std::time::Instant;

use ndarray::Array1;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{AlgorithmTag, ExperimentConfig, SamplingMode};
use super::emit::{emit, fmt_f64, Record};
use super::oracles::{BlindOracle, PhaseOracle};
use super::HarnessError;
use crate::problems::{
    dist_blind, dist_phase, estimate_constants, BlindInstance, InstanceRef, PhaseInstance,
    ProblemTag, SharpnessProfile, TildeConstants,
};
use crate::solvers::{
    rmba, rpmba, ConvergenceTrace, Monitor, ModelOracle, Schedule, StageParams, StageRecord,
    TraceRecord,
};
use crate::stream::{StreamFactory, INIT, KSTAR, LOSS_EVAL, SAMPLES, TRUTH};

/// Per-checkpoint statistics across trials (log10 distances, sample
/// standard deviation with the n−1 denominator).
#[derive(Debug, Clone, Serialize)]
pub struct CheckpointStat {
    pub samples: u64,
    pub trials: usize,
    pub mean_log10_dist: f64,
    pub std_log10_dist: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AggregateResult {
    pub schedule: Schedule,
    pub checkpoints: Vec<CheckpointStat>,
    /// First cumulative sample count at which each trial reached the target
    /// distance (`stop_dist` if set, otherwise `eps`), if it did.
    pub samples_to_target: Vec<Option<u64>>,
    pub final_dist: Vec<f64>,
    /// Stage-end distances per trial.
    pub stage_dists: Vec<Vec<f64>>,
    pub ensemble_failures: usize,
}

pub struct ConvergenceOutcome {
    pub aggregate: AggregateResult,
    pub traces: Vec<ConvergenceTrace>,
    pub profile: SharpnessProfile,
    pub tilde: TildeConstants,
}

/// Monitor that records distance/loss checkpoints at a fixed cadence plus
/// stage ends, tracks the first target hit, and enforces stop conditions.
pub(crate) struct TraceMonitor<'a> {
    pub trial: i64,
    pub cadence: usize,
    pub inner_iters: usize,
    pub target: f64,
    pub stop_dist: Option<f64>,
    pub max_samples: Option<u64>,
    pub dist: Box<dyn Fn(&Array1<f64>) -> f64 + 'a>,
    pub loss: Box<dyn Fn(&Array1<f64>) -> f64 + 'a>,
    pub start: Instant,
    pub trace: ConvergenceTrace,
    pub first_hit: Option<u64>,
    pub last_dist: f64,
}

impl<'a> TraceMonitor<'a> {
    pub fn new(
        trial: i64,
        cadence: usize,
        inner_iters: usize,
        target: f64,
        stop_dist: Option<f64>,
        max_samples: Option<u64>,
        dist: Box<dyn Fn(&Array1<f64>) -> f64 + 'a>,
        loss: Box<dyn Fn(&Array1<f64>) -> f64 + 'a>,
    ) -> Self {
        TraceMonitor {
            trial,
            cadence: cadence.max(1),
            inner_iters,
            target,
            stop_dist,
            max_samples,
            dist,
            loss,
            start: Instant::now(),
            trace: ConvergenceTrace::default(),
            first_hit: None,
            last_dist: f64::INFINITY,
        }
    }

    fn note_dist(&mut self, d: f64, samples: u64) {
        self.last_dist = d;
        if d <= self.target && self.first_hit.is_none() {
            self.first_hit = Some(samples);
        }
    }
}

impl Monitor for TraceMonitor<'_> {
    fn on_step(&mut self, stage: usize, inner: usize, samples: u64, point: &Array1<f64>) -> bool {
        // Checkpoints skip the final inner step: the stage-end record owns
        // that sample count, keeping the samples column strictly increasing.
        let due = (inner + 1) % self.cadence == 0 && inner + 1 <= self.inner_iters;
        let mut stop = false;
        if self.stop_dist.is_some() || due {
            let d = (self.dist)(point);
            self.note_dist(d, samples);
            if let Some(floor) = self.stop_dist {
                stop = d <= floor;
            }
            if due || stop {
                self.trace.push_record(TraceRecord {
                    trial: self.trial,
                    stage: stage as i64,
                    inner_iter: inner as i64,
                    samples,
                    dist: d,
                    loss: (self.loss)(point),
                    wall_ms: self.start.elapsed().as_secs_f64() * 1e3,
                });
            }
        }
        if let Some(cap) = self.max_samples {
            stop = stop || samples >= cap;
        }
        stop
    }

    fn on_stage_end(&mut self, params: &StageParams, samples: u64, point: &Array1<f64>) {
        let d = (self.dist)(point);
        self.note_dist(d, samples);
        let record = StageRecord {
            stage: params.stage,
            alpha: params.alpha,
            rho: params.rho,
            tolerance: params.tolerance,
            ensemble_failed: params.ensemble_failed,
            samples,
            dist: d,
            loss: (self.loss)(point),
            wall_ms: self.start.elapsed().as_secs_f64() * 1e3,
        };
        self.trace.stages.push(record);
    }
}

impl Record for TraceRecord {
    fn header() -> &'static str {
        "trial,stage,inner_iter,samples,dist,loss,wall_ms"
    }
    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.trial,
            self.stage,
            self.inner_iter,
            self.samples,
            fmt_f64(self.dist),
            fmt_f64(self.loss),
            fmt_f64(self.wall_ms)
        )
    }
}

/// Resolves the sharpness profile shared by all trials. Signals are
/// unit-normalized, so the profile depends only on `(d, p_fail, ν)`.
pub(crate) fn resolve_profile(
    config: &ExperimentConfig,
    factory: &StreamFactory,
) -> Result<(SharpnessProfile, TildeConstants), HarnessError> {
    match config.problem {
        ProblemTag::Phase => {
            let mut signal = Array1::zeros(config.dim);
            signal[0] = 1.0;
            let instance = PhaseInstance::new(signal, config.p_fail, config.noise_scale);
            let mut rng = factory.stream(&[crate::stream::CONSTANTS]);
            Ok(estimate_constants(
                InstanceRef::Phase(&instance),
                config.gamma,
                config.mc_samples,
                &mut rng,
            )?)
        }
        ProblemTag::Blind => {
            let mut left = Array1::zeros(config.dim);
            left[0] = 1.0;
            let mut right = Array1::zeros(config.dim);
            right[0] = 1.0;
            let instance =
                BlindInstance::new(left, right, config.p_fail, config.noise_scale, config.nu);
            let mut rng = factory.stream(&[crate::stream::CONSTANTS]);
            Ok(estimate_constants(
                InstanceRef::Blind(&instance),
                config.gamma,
                config.mc_samples,
                &mut rng,
            )?)
        }
        ProblemTag::Logistic => Err(HarnessError::Config(
            "convergence experiments cover the phase and blind families; use the identification runner for logistic".into(),
        )),
    }
}

/// Builds the schedule for the configured algorithm, applying any
/// desk-scale overrides (the initial step is recomputed when the inner
/// count changes).
pub(crate) fn resolve_schedule(
    config: &ExperimentConfig,
    profile: &SharpnessProfile,
) -> Result<Schedule, HarnessError> {
    let mut schedule = match config.algorithm {
        AlgorithmTag::Rmba => crate::solvers::schedule_nonconvex(
            config.r0,
            config.eps,
            config.delta2,
            config.gamma,
            profile,
        )?,
        AlgorithmTag::Rpmba => crate::solvers::schedule_highprob(
            config.r0,
            config.eps,
            config.delta_prime,
            config.gamma,
            profile,
        )?,
        _ => {
            return Err(HarnessError::Config(
                "convergence runs use the rmba or rpmba algorithms".into(),
            ))
        }
    };
    if let Some(over) = &config.schedule_override {
        if let Some(k) = over.inner_iters {
            schedule.inner_iters = k;
            schedule.initial_step = (schedule.initial_radius * schedule.initial_radius
                / (profile.l_bar * profile.l_bar * (k as f64 + 1.0)))
                .sqrt();
        }
        if let Some(t) = over.stages {
            schedule.stages = t;
        }
        if let Some(m) = over.ensemble_size {
            schedule.ensemble_size = m;
        }
    }
    schedule.initial_step *= 2f64.powi(config.step_scale_exponent);
    Ok(schedule)
}

struct TrialOutput {
    trace: ConvergenceTrace,
    first_hit: Option<u64>,
    final_dist: f64,
}

fn run_phase_trial(
    config: &ExperimentConfig,
    schedule: &Schedule,
    factory: &StreamFactory,
    trial: u64,
) -> TrialOutput {
    let mut truth_rng = factory.stream(&[trial, TRUTH]);
    let truth = crate::problems::unit_sphere(config.dim, &mut truth_rng);
    let instance = PhaseInstance::new(truth.clone(), config.p_fail, config.noise_scale);
    let oracle = match config.mode {
        SamplingMode::Streaming => PhaseOracle::streaming(instance.clone(), config.model),
        SamplingMode::Finite => PhaseOracle::finite(
            instance.clone(),
            config.model,
            config.pool_size(),
            factory,
            trial,
        ),
    };
    let eval_batch: Vec<_> = match &oracle.pool {
        Some(pool) => pool.clone(),
        None => {
            let mut rng = factory.stream(&[trial, LOSS_EVAL]);
            (0..config.eval_batch)
                .map(|_| crate::problems::sample_phase(&instance, &mut rng))
                .collect()
        }
    };
    let mut init_rng = factory.stream(&[trial, INIT]);
    let x0 = crate::problems::random_init(&truth, config.r0, &mut init_rng);

    let dist = {
        let instance = instance.clone();
        Box::new(move |x: &Array1<f64>| dist_phase(x, &instance))
    };
    let loss = Box::new(move |x: &Array1<f64>| PhaseOracle::mean_loss(x, &eval_batch));
    run_generic_trial(config, schedule, factory, trial, &oracle, x0, dist, loss)
}

fn run_blind_trial(
    config: &ExperimentConfig,
    schedule: &Schedule,
    factory: &StreamFactory,
    trial: u64,
) -> TrialOutput {
    let mut truth_rng = factory.stream(&[trial, TRUTH]);
    let left = crate::problems::unit_sphere(config.dim, &mut truth_rng);
    let right = crate::problems::unit_sphere(config.dim, &mut truth_rng);
    let instance = BlindInstance::new(left, right, config.p_fail, config.noise_scale, config.nu);
    let truth = instance.truth();
    let oracle = match config.mode {
        SamplingMode::Streaming => BlindOracle::streaming(instance.clone(), config.model),
        SamplingMode::Finite => BlindOracle::finite(
            instance.clone(),
            config.model,
            config.pool_size(),
            factory,
            trial,
        ),
    };
    let eval_batch: Vec<_> = match &oracle.pool {
        Some(pool) => pool.clone(),
        None => {
            let mut rng = factory.stream(&[trial, LOSS_EVAL]);
            (0..config.eval_batch)
                .map(|_| crate::problems::sample_blind(&instance, &mut rng))
                .collect()
        }
    };
    let mut init_rng = factory.stream(&[trial, INIT]);
    let x0 = crate::problems::random_init(&truth, config.r0, &mut init_rng);

    let d1 = config.dim;
    let dist = {
        let instance = instance.clone();
        Box::new(move |z: &Array1<f64>| dist_blind(z, &instance))
    };
    let loss = Box::new(move |z: &Array1<f64>| BlindOracle::mean_loss(z, d1, &eval_batch));
    run_generic_trial(config, schedule, factory, trial, &oracle, x0, dist, loss)
}

#[allow(clippy::too_many_arguments)]
fn run_generic_trial<'a, O: ModelOracle>(
    config: &ExperimentConfig,
    schedule: &Schedule,
    factory: &StreamFactory,
    trial: u64,
    oracle: &O,
    x0: Array1<f64>,
    dist: Box<dyn Fn(&Array1<f64>) -> f64 + 'a>,
    loss: Box<dyn Fn(&Array1<f64>) -> f64 + 'a>,
) -> TrialOutput {
    let cadence = config
        .cadence
        .unwrap_or_else(|| (schedule.inner_iters / 100).max(1));
    let target = config.stop_dist.unwrap_or(config.eps);
    let mut monitor = TraceMonitor::new(
        trial as i64,
        cadence,
        schedule.inner_iters,
        target,
        config.stop_dist,
        config.max_total_samples,
        dist,
        loss,
    );
    let out = match config.algorithm {
        AlgorithmTag::Rmba => {
            let mut sample_rng = factory.stream(&[trial, SAMPLES]);
            let mut kstar_rng = factory.stream(&[trial, KSTAR]);
            rmba(
                oracle,
                x0,
                schedule.initial_step,
                schedule.inner_iters,
                schedule.stages,
                config.is_conv,
                &mut sample_rng,
                &mut kstar_rng,
                &mut monitor,
            )
        }
        AlgorithmTag::Rpmba => rpmba(
            oracle,
            x0,
            schedule.initial_prox_weight,
            schedule.initial_step,
            schedule.inner_iters,
            schedule.initial_tolerance,
            schedule.ensemble_size,
            schedule.stages,
            factory,
            &[trial],
            &mut monitor,
        ),
        _ => unreachable!("validated in resolve_schedule"),
    };
    let final_dist = (monitor.dist)(&out);
    monitor.note_dist(final_dist, u64::MAX);
    TrialOutput {
        first_hit: monitor.first_hit,
        trace: monitor.trace,
        final_dist,
    }
}

fn aggregate(
    schedule: &Schedule,
    outputs: &[TrialOutput],
) -> AggregateResult {
    use std::collections::BTreeMap;
    let mut by_samples: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for out in outputs {
        for r in &out.trace.records {
            by_samples.entry(r.samples).or_default().push(r.dist);
        }
        for s in &out.trace.stages {
            by_samples.entry(s.samples).or_default().push(s.dist);
        }
    }
    let checkpoints = by_samples
        .into_iter()
        .map(|(samples, dists)| {
            let n = dists.len();
            let logs: Vec<f64> = dists
                .iter()
                .map(|d| d.max(f64::MIN_POSITIVE).log10())
                .collect();
            let mean = logs.iter().sum::<f64>() / n as f64;
            let std = if n > 1 {
                (logs.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / (n as f64 - 1.0))
                    .sqrt()
            } else {
                0.0
            };
            CheckpointStat {
                samples,
                trials: n,
                mean_log10_dist: mean,
                std_log10_dist: std,
            }
        })
        .collect();
    AggregateResult {
        schedule: schedule.clone(),
        checkpoints,
        samples_to_target: outputs.iter().map(|o| o.first_hit).collect(),
        final_dist: outputs.iter().map(|o| o.final_dist).collect(),
        stage_dists: outputs
            .iter()
            .map(|o| o.trace.stages.iter().map(|s| s.dist).collect())
            .collect(),
        ensemble_failures: outputs
            .iter()
            .flat_map(|o| o.trace.stages.iter())
            .filter(|s| s.ensemble_failed)
            .count(),
    }
}

pub(crate) fn schedule_meta(schedule: &Schedule, profile: &SharpnessProfile) -> Vec<(String, String)> {
    vec![
        ("schedule.stages".into(), schedule.stages.to_string()),
        (
            "schedule.inner_iters".into(),
            schedule.inner_iters.to_string(),
        ),
        (
            "schedule.initial_step".into(),
            fmt_f64(schedule.initial_step),
        ),
        (
            "schedule.initial_prox_weight".into(),
            fmt_f64(schedule.initial_prox_weight),
        ),
        (
            "schedule.initial_tolerance".into(),
            fmt_f64(schedule.initial_tolerance),
        ),
        (
            "schedule.ensemble_size".into(),
            schedule.ensemble_size.to_string(),
        ),
        (
            "schedule.sample_bound".into(),
            fmt_f64(schedule.sample_bound),
        ),
        (
            "schedule.success_bound".into(),
            fmt_f64(schedule.success_bound),
        ),
        ("profile.mu".into(), fmt_f64(profile.mu)),
        ("profile.eta".into(), fmt_f64(profile.eta)),
        ("profile.l_bar".into(), fmt_f64(profile.l_bar)),
        ("profile.tube_radius".into(), fmt_f64(profile.tube_radius())),
    ]
}

/// Runs the seeded trials without touching the filesystem.
pub(crate) fn run_convergence_core(
    config: &ExperimentConfig,
) -> Result<ConvergenceOutcome, HarnessError> {
    let factory = StreamFactory::new(config.seed);
    let (profile, tilde) = resolve_profile(config, &factory)?;
    let schedule = resolve_schedule(config, &profile)?;

    let outputs: Vec<TrialOutput> = (0..config.trials as u64)
        .into_par_iter()
        .map(|trial| match config.problem {
            ProblemTag::Phase => run_phase_trial(config, &schedule, &factory, trial),
            ProblemTag::Blind => run_blind_trial(config, &schedule, &factory, trial),
            ProblemTag::Logistic => unreachable!("rejected in resolve_profile"),
        })
        .collect();

    let aggregate = aggregate(&schedule, &outputs);
    Ok(ConvergenceOutcome {
        aggregate,
        traces: outputs.into_iter().map(|o| o.trace).collect(),
        profile,
        tilde,
    })
}

/// Runs `trials` seeded trials of the configured algorithm and writes the
/// trace file: one row per (trial, stage, checkpoint), stage-output rows
/// with `inner_iter = -1`, and the theoretical halving reference
/// `dist_t = 2^{−t}·R₀` as rows with `trial = -1`.
pub fn run_convergence(config: &ExperimentConfig) -> Result<ConvergenceOutcome, HarnessError> {
    let outcome = run_convergence_core(config)?;
    let schedule = &outcome.aggregate.schedule;

    let mut rows: Vec<TraceRecord> = Vec::new();
    for (trial, trace) in outcome.traces.iter().enumerate() {
        rows.extend(trace.records.iter().cloned());
        for s in &trace.stages {
            rows.push(TraceRecord {
                trial: trial as i64,
                stage: s.stage as i64,
                inner_iter: -1,
                samples: s.samples,
                dist: s.dist,
                loss: s.loss,
                wall_ms: s.wall_ms,
            });
        }
    }
    // Theoretical halving reference.
    for t in 0..=schedule.stages {
        rows.push(TraceRecord {
            trial: -1,
            stage: t as i64,
            inner_iter: 0,
            samples: t as u64 * (schedule.inner_iters as u64 + 1),
            dist: config.r0 * 2f64.powi(-(t as i32)),
            loss: f64::NAN,
            wall_ms: 0.0,
        });
    }

    let mut meta = config.meta();
    meta.extend(schedule_meta(schedule, &outcome.profile));
    emit(&rows, config.format, &config.out, &meta)?;
    Ok(outcome)
}

