//! Stochastic model-based algorithms with geometric step decay restarts.
//!
//! The inner loop [`mba`] repeatedly samples a convex model of the loss and
//! minimizes it plus a quadratic anchor. [`rmba`] restarts it with halved
//! step sizes. [`pmba`] adds a proximal anchor at the stage center, and
//! [`rpmba`] wraps it in an ensemble ([`epmba`]) with doubling proximal
//! weights and halving tolerances, the high-probability variant.
//!
//! Randomness discipline: measurement draws and the uniform iterate
//! selection consume separated, labeled streams, so switching models never
//! perturbs the measurement sequence of a seeded run. Ensemble copies derive
//! private streams from `(trial labels, copy index)` and merge by index,
//! which keeps parallel runs bit-reproducible.

mod schedule;
mod trace;

pub use schedule::{
    schedule_convex, schedule_highprob, schedule_nonconvex, Schedule, ScheduleError,
};
pub use trace::{ConvergenceTrace, StageRecord, TraceRecord};

use ndarray::Array1;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::prox::{anchored_step, QuadraticAnchor, StepModel};
use crate::stream::{StreamFactory, COPY, KSTAR, SAMPLES};

/// The stochastic oracle the algorithms run against: samples a one-step
/// model at the current point and projects onto the feasible set.
pub trait ModelOracle: Sync {
    fn sample_model(&self, point: &Array1<f64>, rng: &mut ChaCha8Rng) -> StepModel;

    /// Projection onto the feasible set; identity by default.
    fn project(&self, _point: &mut Array1<f64>) {}
}

/// Resolved parameters of one outer stage.
#[derive(Debug, Clone, Copy)]
pub struct StageParams {
    pub stage: usize,
    pub alpha: f64,
    pub rho: f64,
    pub tolerance: f64,
    pub ensemble_failed: bool,
}

/// Observer hook for tracing and early stopping. Inner-step callbacks fire
/// on every iterate; implementations decide their own cadence.
pub trait Monitor {
    /// Returns `true` to request an early stop.
    fn on_step(
        &mut self,
        _stage: usize,
        _inner: usize,
        _samples: u64,
        _point: &Array1<f64>,
    ) -> bool {
        false
    }

    fn on_stage_end(&mut self, _params: &StageParams, _samples: u64, _point: &Array1<f64>) {}
}

/// Monitor that records nothing and never stops.
pub struct NoopMonitor;

impl Monitor for NoopMonitor {}

/// One stage of the model-based loop, shared by `mba` and `pmba`:
/// `K + 1` anchored steps from `y0` with step `alpha` and proximal weight
/// `rho` toward `y0` (zero for the plain loop).
fn model_based_stage<O: ModelOracle + ?Sized, M: Monitor + ?Sized>(
    oracle: &O,
    y0: Array1<f64>,
    alpha: f64,
    rho: f64,
    inner_iters: usize,
    is_conv: bool,
    stage: usize,
    base_samples: u64,
    sample_rng: &mut ChaCha8Rng,
    kstar_rng: &mut ChaCha8Rng,
    monitor: &mut M,
) -> (Array1<f64>, bool) {
    let k_iters = inner_iters;
    // The iterate selection draw happens up front so the measurement stream
    // is untouched by it.
    let kstar = if is_conv {
        0
    } else {
        kstar_rng.random_range(0..=k_iters)
    };
    let inv_alpha = 1.0 / alpha;
    let anchor_weight = inv_alpha + rho;

    let mut y = y0.clone();
    let mut selected = if !is_conv && kstar == 0 {
        Some(y.clone())
    } else {
        None
    };
    let mut average: Option<Array1<f64>> = if is_conv {
        Some(Array1::zeros(y.len()))
    } else {
        None
    };

    for k in 0..=k_iters {
        let model = oracle.sample_model(&y, sample_rng);
        let anchor = if rho == 0.0 {
            QuadraticAnchor {
                weight: inv_alpha,
                center: y.clone(),
            }
        } else {
            // Composed anchor: (1/α at y_k) + (ρ at y₀).
            let center = y
                .iter()
                .zip(y0.iter())
                .map(|(&yk, &y0i)| (inv_alpha * yk + rho * y0i) / anchor_weight)
                .collect();
            QuadraticAnchor {
                weight: anchor_weight,
                center,
            }
        };
        let mut next = anchored_step(&model, &y, &anchor);
        oracle.project(&mut next);
        y = next;

        if let Some(acc) = average.as_mut() {
            *acc += &y;
        }
        let samples = base_samples + k as u64 + 1;
        if monitor.on_step(stage, k, samples, &y) {
            return (y, true);
        }
        if !is_conv && k + 1 == kstar {
            selected = Some(y.clone());
        }
    }

    let out = if let Some(acc) = average {
        acc / (k_iters as f64 + 1.0)
    } else {
        selected.expect("kstar lies in 0..=K")
    };
    (out, false)
}

/// The generic stochastic model-based loop: `K + 1` anchored steps from
/// `y0`. Returns the running average of `y₁, …, y_{K+1}` when `is_conv` is
/// set, and `y_{K*}` with `K*` uniform on `{0, …, K}` otherwise.
pub fn mba<O: ModelOracle + ?Sized>(
    oracle: &O,
    y0: Array1<f64>,
    alpha: f64,
    inner_iters: usize,
    is_conv: bool,
    sample_rng: &mut ChaCha8Rng,
    kstar_rng: &mut ChaCha8Rng,
) -> Array1<f64> {
    model_based_stage(
        oracle,
        y0,
        alpha,
        0.0,
        inner_iters,
        is_conv,
        0,
        0,
        sample_rng,
        kstar_rng,
        &mut NoopMonitor,
    )
    .0
}

/// Restarted loop: `T` stages of [`mba`], warm-started, with `α_t = 2^{−t}α₀`.
#[allow(clippy::too_many_arguments)]
pub fn rmba<O: ModelOracle + ?Sized, M: Monitor + ?Sized>(
    oracle: &O,
    x0: Array1<f64>,
    alpha0: f64,
    inner_iters: usize,
    stages: usize,
    is_conv: bool,
    sample_rng: &mut ChaCha8Rng,
    kstar_rng: &mut ChaCha8Rng,
    monitor: &mut M,
) -> Array1<f64> {
    let mut x = x0;
    let mut samples = 0u64;
    for t in 0..stages {
        let alpha_t = alpha0 * 2f64.powi(-(t as i32));
        let (next, stopped) = model_based_stage(
            oracle,
            x,
            alpha_t,
            0.0,
            inner_iters,
            is_conv,
            t,
            samples,
            sample_rng,
            kstar_rng,
            monitor,
        );
        x = next;
        samples += inner_iters as u64 + 1;
        monitor.on_stage_end(
            &StageParams {
                stage: t,
                alpha: alpha_t,
                rho: 0.0,
                tolerance: 0.0,
                ensemble_failed: false,
            },
            samples,
            &x,
        );
        if stopped {
            break;
        }
    }
    x
}

/// Proximally anchored loop: `K + 1` steps minimizing
/// `f_{y_k}(y, z) + (1/2α)‖y − y_k‖² + (ρ/2)‖y − y₀‖²`, returning `y_{K*}`.
pub fn pmba<O: ModelOracle + ?Sized>(
    oracle: &O,
    y0: Array1<f64>,
    rho: f64,
    alpha: f64,
    inner_iters: usize,
    sample_rng: &mut ChaCha8Rng,
    kstar_rng: &mut ChaCha8Rng,
) -> Array1<f64> {
    model_based_stage(
        oracle,
        y0,
        alpha,
        rho,
        inner_iters,
        false,
        0,
        0,
        sample_rng,
        kstar_rng,
        &mut NoopMonitor,
    )
    .0
}

/// No candidate's closed `2ε`-ball captured a strict majority.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoMajority {
    /// Index with the largest neighbor count (first in scan order on ties).
    pub best_index: usize,
    pub best_count: usize,
}

/// Returns the first index (scan order) whose closed `2ε`-ball contains
/// strictly more than half of the points, counting itself.
pub fn ensemble_select(points: &[Array1<f64>], eps: f64) -> Result<usize, NoMajority> {
    assert!(!points.is_empty() && eps > 0.0);
    let m = points.len();
    let radius = 2.0 * eps;
    let mut best_index = 0;
    let mut best_count = 0;
    for (j, yj) in points.iter().enumerate() {
        let count = points
            .iter()
            .filter(|yi| {
                let delta = *yi - yj;
                delta.dot(&delta).sqrt() <= radius
            })
            .count();
        if 2 * count > m {
            return Ok(j);
        }
        if count > best_count {
            best_index = j;
            best_count = count;
        }
    }
    Err(NoMajority {
        best_index,
        best_count,
    })
}

/// Ensemble step: `m` independent [`pmba`] trials from `y0`, majority-ball
/// selection with tolerance `eps`. When no majority exists the point with
/// the maximal neighbor count is returned and the stage is flagged.
#[allow(clippy::too_many_arguments)]
pub fn epmba<O: ModelOracle + ?Sized>(
    oracle: &O,
    y0: &Array1<f64>,
    rho: f64,
    alpha: f64,
    inner_iters: usize,
    ensemble_size: usize,
    eps: f64,
    factory: &StreamFactory,
    labels: &[u64],
) -> (Array1<f64>, bool) {
    assert!(ensemble_size >= 1);
    let points: Vec<Array1<f64>> = (0..ensemble_size as u64)
        .into_par_iter()
        .map(|copy| {
            let mut sample_labels = labels.to_vec();
            sample_labels.extend([COPY, copy, SAMPLES]);
            let mut kstar_labels = labels.to_vec();
            kstar_labels.extend([COPY, copy, KSTAR]);
            let mut sample_rng = factory.stream(&sample_labels);
            let mut kstar_rng = factory.stream(&kstar_labels);
            pmba(
                oracle,
                y0.clone(),
                rho,
                alpha,
                inner_iters,
                &mut sample_rng,
                &mut kstar_rng,
            )
        })
        .collect();
    match ensemble_select(&points, eps) {
        Ok(index) => (points[index].clone(), false),
        Err(no_majority) => (points[no_majority.best_index].clone(), true),
    }
}

/// Restarted proximal ensemble: `T` stages of [`epmba`] with
/// `ρ_t = 2^t ρ₀`, `ε_t = 2^{−t} ε₀`, `α_t = 2^{−t} α₀`.
#[allow(clippy::too_many_arguments)]
pub fn rpmba<O: ModelOracle + ?Sized, M: Monitor + ?Sized>(
    oracle: &O,
    x0: Array1<f64>,
    rho0: f64,
    alpha0: f64,
    inner_iters: usize,
    eps0: f64,
    ensemble_size: usize,
    stages: usize,
    factory: &StreamFactory,
    labels: &[u64],
    monitor: &mut M,
) -> Array1<f64> {
    let mut x = x0;
    let mut samples = 0u64;
    for t in 0..stages {
        let rho_t = rho0 * 2f64.powi(t as i32);
        let eps_t = eps0 * 2f64.powi(-(t as i32));
        let alpha_t = alpha0 * 2f64.powi(-(t as i32));
        let mut stage_labels = labels.to_vec();
        stage_labels.push(t as u64);
        let (next, failed) = epmba(
            oracle,
            &x,
            rho_t,
            alpha_t,
            inner_iters,
            ensemble_size,
            eps_t,
            factory,
            &stage_labels,
        );
        x = next;
        samples += ensemble_size as u64 * (inner_iters as u64 + 1);
        monitor.on_stage_end(
            &StageParams {
                stage: t,
                alpha: alpha_t,
                rho: rho_t,
                tolerance: eps_t,
                ensemble_failed: failed,
            },
            samples,
            &x,
        );
    }
    x
}
