//! Activity identification on sparse logistic regression: the restarted
//! proximal-gradient model against regularized dual averaging and
//! polynomially decaying proximal gradient, all fed the identical
//! sample-index stream.

use ndarray::Array1;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::emit::{emit, fmt_f64, Record};
use super::oracles::LogisticOracle;
use super::HarnessError;
use crate::baselines::{prox_grad_poly, rda_run};
use crate::problems::{synth_logistic, LogisticInstance, SharpnessProfile};
use crate::solvers::{rmba, Monitor, Schedule, StageParams};
use crate::stream::{StreamFactory, DATASET, KSTAR, SAMPLES};

/// Off-support norm below which an iterate counts as identified.
pub const SUPPORT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct IdentificationRow {
    pub method: String,
    pub iter: u64,
    pub fval_gap: f64,
    pub dist_support: f64,
    pub dist_to_reference: f64,
}

impl Record for IdentificationRow {
    fn header() -> &'static str {
        "method,iter,fval_gap,dist_support,dist_to_reference"
    }
    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.method,
            self.iter,
            fmt_f64(self.fval_gap),
            fmt_f64(self.dist_support),
            fmt_f64(self.dist_to_reference)
        )
    }
}

/// Identification statistics for one method, tracked on every iterate.
#[derive(Debug, Clone, Serialize)]
pub struct IdentificationStats {
    pub method: String,
    /// First iteration with `dist_support ≤ SUPPORT_TOL`.
    pub first_hit: Option<u64>,
    /// Objective gap at the first hit.
    pub gap_at_first_hit: Option<f64>,
    /// Iteration from which `dist_support` stayed below tolerance through
    /// the end of the run.
    pub sojourn_start: Option<u64>,
    pub final_dist_support: f64,
    pub total_iters: u64,
}

pub struct IdentificationOutcome {
    pub schedule: Schedule,
    pub rows: Vec<IdentificationRow>,
    pub stats: Vec<IdentificationStats>,
    pub support_size: usize,
    pub initial_gap: f64,
    pub r0: f64,
}

struct IdMonitor<'a> {
    method: &'static str,
    instance: &'a LogisticInstance,
    cadence: u64,
    rows: Vec<IdentificationRow>,
    first_hit: Option<u64>,
    gap_at_first_hit: Option<f64>,
    last_above: Option<u64>,
    last_dist_support: f64,
    last_iter: u64,
}

impl<'a> IdMonitor<'a> {
    fn new(method: &'static str, instance: &'a LogisticInstance, cadence: u64) -> Self {
        IdMonitor {
            method,
            instance,
            cadence: cadence.max(1),
            rows: Vec::new(),
            first_hit: None,
            gap_at_first_hit: None,
            last_above: None,
            last_dist_support: f64::INFINITY,
            last_iter: 0,
        }
    }

    fn observe(&mut self, iter: u64, point: &Array1<f64>, force_row: bool) {
        let ds = self.instance.dist_support(point);
        self.last_dist_support = ds;
        self.last_iter = iter;
        if ds <= SUPPORT_TOL {
            if self.first_hit.is_none() {
                self.first_hit = Some(iter);
                self.gap_at_first_hit =
                    Some(self.instance.objective(point) - self.instance.reference_objective);
            }
        } else {
            self.last_above = Some(iter);
        }
        if force_row || iter % self.cadence == 0 {
            self.rows.push(IdentificationRow {
                method: self.method.to_string(),
                iter,
                fval_gap: self.instance.objective(point) - self.instance.reference_objective,
                dist_support: ds,
                dist_to_reference: self.instance.dist_to_reference(point),
            });
        }
    }

    fn into_stats(self) -> (Vec<IdentificationRow>, IdentificationStats) {
        let sojourn_start = match self.last_above {
            None => Some(0),
            Some(i) if i < self.last_iter => Some(i + 1),
            Some(_) => None,
        };
        let stats = IdentificationStats {
            method: self.method.to_string(),
            first_hit: self.first_hit,
            gap_at_first_hit: self.gap_at_first_hit,
            sojourn_start,
            final_dist_support: self.last_dist_support,
            total_iters: self.last_iter,
        };
        (self.rows, stats)
    }
}

impl Monitor for IdMonitor<'_> {
    fn on_step(&mut self, _stage: usize, _inner: usize, samples: u64, point: &Array1<f64>) -> bool {
        self.observe(samples, point, false);
        false
    }

    fn on_stage_end(&mut self, _params: &StageParams, samples: u64, point: &Array1<f64>) {
        // The selected stage output becomes the next warm start; record it
        // without disturbing the iteration count (reuse the stage's final
        // sample index).
        let ds = self.instance.dist_support(point);
        self.last_dist_support = ds;
        if ds > SUPPORT_TOL {
            self.last_above = Some(samples);
        } else if self.first_hit.is_none() {
            self.first_hit = Some(samples);
            self.gap_at_first_hit =
                Some(self.instance.objective(point) - self.instance.reference_objective);
        }
    }
}

/// Builds the logistic instance from IDX files when configured, otherwise
/// synthesizes one (deterministically from the master seed).
pub fn build_logistic_instance(
    config: &ExperimentConfig,
    factory: &StreamFactory,
) -> Result<LogisticInstance, HarnessError> {
    match (&config.idx_images, &config.idx_labels) {
        (Some(images), Some(labels)) => {
            let samples = crate::problems::load_idx_pair(
                images,
                labels,
                config.idx_digits.0,
                config.idx_digits.1,
            )?;
            if samples.is_empty() {
                return Err(HarnessError::Config(
                    "IDX input contained no samples of the requested classes".into(),
                ));
            }
            Ok(LogisticInstance::from_samples(samples, config.tau))
        }
        (None, None) => {
            let mut rng = factory.stream(&[DATASET]);
            Ok(synth_logistic(
                config.dim,
                config.n_samples,
                config.sparsity,
                config.tau,
                &mut rng,
            ))
        }
        _ => Err(HarnessError::Config(
            "idx_images and idx_labels must be given together".into(),
        )),
    }
}

/// The sharpness surrogate of the identification experiments:
/// `μ = τ·√d·2^{−p}` (grid exponent `p` from the config), `η = 0` (the
/// composite objective is convex, so the tube is unconstrained), and
/// `𝖫 = √((1/N)Σ‖xᵢ‖²)`.
pub fn logistic_profile(config: &ExperimentConfig, instance: &LogisticInstance) -> SharpnessProfile {
    let mu = config.tau
        * (instance.dim() as f64).sqrt()
        * 2f64.powi(-config.mu_grid_exponent);
    SharpnessProfile {
        mu,
        eta: 0.0,
        l_bar: instance.lipschitz_estimate(),
        gamma: config.gamma,
    }
}

/// Runs all three methods on one instance with a shared index stream and
/// writes the per-iteration metrics.
pub fn run_identification(
    config: &ExperimentConfig,
) -> Result<IdentificationOutcome, HarnessError> {
    let factory = StreamFactory::new(config.seed);
    let instance = build_logistic_instance(config, &factory)?;
    let d = instance.dim();
    let zero = Array1::zeros(d + 1);
    let r0 = instance.dist_to_reference(&zero);
    if r0 <= config.eps {
        return Err(HarnessError::Config(
            "reference solution coincides with the zero initializer; nothing to identify".into(),
        ));
    }

    let profile = logistic_profile(config, &instance);
    let mut config_r0 = config.clone();
    config_r0.r0 = r0;
    let schedule = super::convergence::resolve_schedule(&config_r0, &profile)?;
    let budget = schedule.stages as u64 * (schedule.inner_iters as u64 + 1);
    let cadence = config
        .cadence
        .map(|c| c as u64)
        .unwrap_or_else(|| ((schedule.inner_iters / 100).max(1)) as u64);

    let mut rows = Vec::new();
    let mut stats = Vec::new();

    // Restarted stochastic proximal gradient (the model-based method).
    {
        let oracle = LogisticOracle {
            instance: &instance,
        };
        let mut monitor = IdMonitor::new("rmba", &instance, cadence);
        monitor.observe(0, &zero, true);
        let mut sample_rng = factory.stream(&[0, SAMPLES]);
        let mut kstar_rng = factory.stream(&[0, KSTAR]);
        rmba(
            &oracle,
            zero.clone(),
            schedule.initial_step,
            schedule.inner_iters,
            schedule.stages,
            config.is_conv,
            &mut sample_rng,
            &mut kstar_rng,
            &mut monitor,
        );
        let (r, s) = monitor.into_stats();
        rows.extend(r);
        stats.push(s);
    }

    // Regularized dual averaging on the identical index stream.
    {
        let mut monitor = IdMonitor::new("rda", &instance, cadence);
        monitor.observe(0, &zero, true);
        let mut sample_rng = factory.stream(&[0, SAMPLES]);
        rda_run(
            &instance,
            config.gamma_rda,
            budget,
            &mut sample_rng,
            &mut monitor,
        );
        let (r, s) = monitor.into_stats();
        rows.extend(r);
        stats.push(s);
    }

    // Polynomially decaying stochastic proximal gradient.
    {
        let mut monitor = IdMonitor::new("proxgrad-poly", &instance, cadence);
        monitor.observe(0, &zero, true);
        let mut sample_rng = factory.stream(&[0, SAMPLES]);
        prox_grad_poly(
            &instance,
            config.poly_c,
            config.poly_p,
            budget,
            &mut sample_rng,
            &mut monitor,
        );
        let (r, s) = monitor.into_stats();
        rows.extend(r);
        stats.push(s);
    }

    let initial_gap = instance.objective(&zero) - instance.reference_objective;
    let mut meta = config.meta();
    meta.extend(super::convergence::schedule_meta(&schedule, &profile));
    meta.push(("r0_resolved".into(), fmt_f64(r0)));
    meta.push(("support_size".into(), instance.support.len().to_string()));
    meta.push(("budget".into(), budget.to_string()));
    emit(&rows, config.format, &config.out, &meta)?;

    Ok(IdentificationOutcome {
        schedule,
        rows,
        stats,
        support_size: instance.support.len(),
        initial_gap,
        r0,
    })
}
