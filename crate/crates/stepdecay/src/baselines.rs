//! Comparison methods for the activity-identification experiments:
//! regularized dual averaging and stochastic proximal gradient with
//! polynomially decaying step sizes.

use ndarray::Array1;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::problems::LogisticInstance;
use crate::prox::{soft_threshold_prefix, StepModel};
use crate::solvers::Monitor;

/// Running state of regularized dual averaging over `(w, b) ∈ R^{d+1}`.
///
/// At step `t` the iterate minimizes
/// `⟨ḡ_t, (w, b)⟩ + τ‖w‖₁ + (γ/(2√t))‖(w, b)‖²`, where `ḡ_t` is the
/// arithmetic mean of the first `t` sampled gradients. The closed form is
/// `w = −(√t/γ)·S_τ(ḡ_w)`, `b = −(√t/γ)·ḡ_b`.
#[derive(Debug, Clone)]
pub struct RdaState {
    /// Running gradient mean over `(w, b)`.
    pub grad_avg: Array1<f64>,
    /// Step counter `t`.
    pub step: u64,
    /// The RDA quadratic weight (the method's tunable, distinct from the
    /// tube parameter).
    pub gamma_rda: f64,
    /// ℓ1 weight on the `w` block.
    pub tau: f64,
}

impl RdaState {
    pub fn new(dim: usize, gamma_rda: f64, tau: f64) -> Self {
        assert!(gamma_rda > 0.0 && tau > 0.0);
        RdaState {
            grad_avg: Array1::zeros(dim + 1),
            step: 0,
            gamma_rda,
            tau,
        }
    }

    /// The subproblem minimizer at the current state. Zero until the first
    /// gradient arrives.
    pub fn iterate(&self) -> Array1<f64> {
        let d = self.grad_avg.len() - 1;
        if self.step == 0 {
            return Array1::zeros(d + 1);
        }
        let scale = -(self.step as f64).sqrt() / self.gamma_rda;
        let mut out = self.grad_avg.clone();
        soft_threshold_prefix(&mut out, self.tau, d);
        out.mapv_inplace(|v| scale * v);
        // The intercept is not ℓ1-penalized.
        out[d] = scale * self.grad_avg[d];
        out
    }
}

/// Folds one sampled gradient into the running mean and returns the new
/// iterate.
pub fn rda_step(state: &mut RdaState, gradient: &Array1<f64>) -> Array1<f64> {
    state.step += 1;
    let t = state.step as f64;
    state
        .grad_avg
        .iter_mut()
        .zip(gradient.iter())
        .for_each(|(avg, &g)| *avg += (g - *avg) / t);
    state.iterate()
}

/// Full RDA run on a logistic instance, consuming one pool-index draw per
/// step (the same stream discipline as the model-based runs). Gradients are
/// evaluated at the current iterate; the method starts from `(w₀, b₀) = 0`.
pub fn rda_run<M: Monitor + ?Sized>(
    instance: &LogisticInstance,
    gamma_rda: f64,
    iterations: u64,
    rng: &mut ChaCha8Rng,
    monitor: &mut M,
) -> Array1<f64> {
    let mut state = RdaState::new(instance.dim(), gamma_rda, instance.tau);
    let mut point = Array1::zeros(instance.dim() + 1);
    for k in 1..=iterations {
        let index = rng.random_range(0..instance.num_samples());
        let StepModel::L1Linear { grad, .. } = instance.sample_model(index, &point) else {
            unreachable!("logistic models are L1Linear")
        };
        point = rda_step(&mut state, &grad);
        if monitor.on_step(0, (k - 1) as usize, k, &point) {
            break;
        }
    }
    point
}

/// Step size `λ_k = c·k^{−p}` of the polynomially decaying schedule.
pub fn poly_step_size(c: f64, p: f64, k: u64) -> f64 {
    c * (k as f64).powf(-p)
}

/// Stochastic proximal gradient with `λ_k = c·k^{−p}`:
/// `w_{k+1} = S_{λ_k τ}(w_k − λ_k g_w)`, `b_{k+1} = b_k − λ_k g_b`,
/// started from zero.
pub fn prox_grad_poly<M: Monitor + ?Sized>(
    instance: &LogisticInstance,
    c: f64,
    p: f64,
    iterations: u64,
    rng: &mut ChaCha8Rng,
    monitor: &mut M,
) -> Array1<f64> {
    let d = instance.dim();
    let mut point: Array1<f64> = Array1::zeros(d + 1);
    for k in 1..=iterations {
        let index = rng.random_range(0..instance.num_samples());
        let StepModel::L1Linear { grad, .. } = instance.sample_model(index, &point) else {
            unreachable!("logistic models are L1Linear")
        };
        let step = poly_step_size(c, p, k);
        point
            .iter_mut()
            .zip(grad.iter())
            .for_each(|(x, &g)| *x -= step * g);
        soft_threshold_prefix(&mut point, step * instance.tau, d);
        if monitor.on_step(0, (k - 1) as usize, k, &point) {
            break;
        }
    }
    point
}
