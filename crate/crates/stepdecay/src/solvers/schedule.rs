//! Parameter schedules for the restarted algorithms.
//!
//! Each constructor pins the exact arithmetic of its convergence theorem:
//! the outer count is always `T = ⌈log₂(R₀/ε)⌉`, the inner count scales as
//! `(𝖫/μ)²` with the theorem-specific prefactor, and step sizes/tolerances
//! halve per stage while proximal weights double.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::problems::SharpnessProfile;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Schedule {
    /// Outer restart count `T`.
    pub stages: usize,
    /// Inner iteration count `K` (each stage runs `K + 1` steps).
    pub inner_iters: usize,
    /// Initial step size `α₀`; stage `t` uses `2^{−t}·α₀`.
    pub initial_step: f64,
    /// Initial proximal weight `ρ₀`; stage `t` uses `2^t·ρ₀` (0 if unused).
    pub initial_prox_weight: f64,
    /// Initial ensemble tolerance `ε₀`; stage `t` uses `2^{−t}·ε₀` (0 if unused).
    pub initial_tolerance: f64,
    /// Ensemble trial count `M` (1 when no ensemble runs).
    pub ensemble_size: usize,
    /// Failure budget (`δ`, `δ₂`, or `δ′` depending on the schedule).
    pub failure_budget: f64,
    /// Tube parameter `γ`.
    pub gamma: f64,
    /// Initial distance estimate `R₀`.
    pub initial_radius: f64,
    /// Target accuracy `ε`.
    pub target_accuracy: f64,
    /// Recorded worst-case sample count for the whole run.
    pub sample_bound: f64,
    /// Recorded success-probability lower bound (may be vacuous).
    pub success_bound: f64,
}

impl Schedule {
    /// Step size at stage `t`.
    pub fn step_at(&self, stage: usize) -> f64 {
        self.initial_step * 2f64.powi(-(stage as i32))
    }

    /// Proximal weight at stage `t`.
    pub fn prox_weight_at(&self, stage: usize) -> f64 {
        self.initial_prox_weight * 2f64.powi(stage as i32)
    }

    /// Ensemble tolerance at stage `t`.
    pub fn tolerance_at(&self, stage: usize) -> f64 {
        self.initial_tolerance * 2f64.powi(-(stage as i32))
    }
}

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("target accuracy {eps} must be strictly below the initial radius {r0}")]
    TargetNotBelowRadius { r0: f64, eps: f64 },
    #[error("initial radius {r0} exceeds the tube bound {bound}")]
    OutsideTube { r0: f64, bound: f64 },
    #[error("gamma must lie in (0, 2), got {0}")]
    BadGamma(f64),
    #[error("failure budget must lie in (0, 1), got {0}")]
    BadDelta(f64),
    #[error("schedule arithmetic overflowed: inner count {0:e} is not representable")]
    InnerCountOverflow(f64),
}

fn outer_count(r0: f64, eps: f64) -> Result<(usize, f64), ScheduleError> {
    if !(eps > 0.0) || eps >= r0 {
        return Err(ScheduleError::TargetNotBelowRadius { r0, eps });
    }
    let raw = (r0 / eps).log2();
    Ok((raw.ceil() as usize, raw))
}

fn inner_count(k: f64) -> Result<usize, ScheduleError> {
    if !k.is_finite() || k >= 9e15 {
        return Err(ScheduleError::InnerCountOverflow(k));
    }
    Ok(k.floor() as usize)
}

/// Schedule for the convex setting: `K = ⌊8·T²·(𝖫/(δμ))²⌋` and
/// `α₀ = √(R₀²/(2𝖫²(K+1)))`, with the averaged inner loop.
pub fn schedule_convex(
    r0: f64,
    eps: f64,
    delta: f64,
    mu: f64,
    l_bar: f64,
) -> Result<Schedule, ScheduleError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(ScheduleError::BadDelta(delta));
    }
    let (stages, raw) = outer_count(r0, eps)?;
    let ratio = l_bar / (delta * mu);
    let inner = inner_count(8.0 * (stages * stages) as f64 * ratio * ratio)?;
    let initial_step = (r0 * r0 / (2.0 * l_bar * l_bar * (inner as f64 + 1.0))).sqrt();
    Ok(Schedule {
        stages,
        inner_iters: inner,
        initial_step,
        initial_prox_weight: 0.0,
        initial_tolerance: 0.0,
        ensemble_size: 1,
        failure_budget: delta,
        gamma: 0.0,
        initial_radius: r0,
        target_accuracy: eps,
        sample_bound: 8.0 * ratio * ratio * raw.powi(3).ceil(),
        success_bound: 1.0 - delta,
    })
}

/// Schedule for the sharp weakly convex setting:
/// `K = ⌊16/(2−γ)²·T²·(𝖫/(δ₂μ))²⌋` and `α₀ = √(R₀²/(𝖫²(K+1)))`, valid when
/// `R₀ ≤ γμ/η`. The recorded success bound is
/// `1 − (8/3)R₀²(η/(γμ))² − δ₂`, which may be vacuous at aggressive radii.
pub fn schedule_nonconvex(
    r0: f64,
    eps: f64,
    delta2: f64,
    gamma: f64,
    profile: &SharpnessProfile,
) -> Result<Schedule, ScheduleError> {
    if !(gamma > 0.0 && gamma < 2.0) {
        return Err(ScheduleError::BadGamma(gamma));
    }
    if !(delta2 > 0.0 && delta2 < 1.0) {
        return Err(ScheduleError::BadDelta(delta2));
    }
    let tube = if profile.eta == 0.0 {
        f64::INFINITY
    } else {
        gamma * profile.mu / profile.eta
    };
    if r0 > tube {
        return Err(ScheduleError::OutsideTube { r0, bound: tube });
    }
    let (stages, raw) = outer_count(r0, eps)?;
    let ratio = profile.l_bar / (delta2 * profile.mu);
    let prefactor = 16.0 / ((2.0 - gamma) * (2.0 - gamma));
    let inner = inner_count(prefactor * (stages * stages) as f64 * ratio * ratio)?;
    let initial_step =
        (r0 * r0 / (profile.l_bar * profile.l_bar * (inner as f64 + 1.0))).sqrt();
    let escape = if tube.is_finite() {
        (8.0 / 3.0) * (r0 * profile.eta / (gamma * profile.mu)).powi(2)
    } else {
        0.0
    };
    Ok(Schedule {
        stages,
        inner_iters: inner,
        initial_step,
        initial_prox_weight: 0.0,
        initial_tolerance: 0.0,
        ensemble_size: 1,
        failure_budget: delta2,
        gamma,
        initial_radius: r0,
        target_accuracy: eps,
        sample_bound: prefactor * ratio * ratio * raw.powi(3).ceil(),
        success_bound: 1.0 - escape - delta2,
    })
}

/// Schedule for the high-probability proximal-point scheme:
/// `ρ₀ = μ/(2R₀)`, `ε₀ = R₀/3`, `K = ⌊(864𝖫/μ)²⌋`, `M = ⌈48·ln(T/δ′)⌉`,
/// `α₀ = √(R₀²/(𝖫²(K+1)))`, valid when `R₀ ≤ γμ/(4η)`.
pub fn schedule_highprob(
    r0: f64,
    eps: f64,
    delta_prime: f64,
    gamma: f64,
    profile: &SharpnessProfile,
) -> Result<Schedule, ScheduleError> {
    if !(gamma > 0.0 && gamma < 2.0) {
        return Err(ScheduleError::BadGamma(gamma));
    }
    if !(delta_prime > 0.0 && delta_prime < 1.0) {
        return Err(ScheduleError::BadDelta(delta_prime));
    }
    let bound = if profile.eta == 0.0 {
        f64::INFINITY
    } else {
        gamma * profile.mu / (4.0 * profile.eta)
    };
    if r0 > bound {
        return Err(ScheduleError::OutsideTube { r0, bound });
    }
    let (stages, _) = outer_count(r0, eps)?;
    let ratio = 864.0 * profile.l_bar / profile.mu;
    let inner = inner_count(ratio * ratio)?;
    let ensemble = (48.0 * (stages as f64 / delta_prime).ln()).ceil().max(1.0) as usize;
    let initial_step =
        (r0 * r0 / (profile.l_bar * profile.l_bar * (inner as f64 + 1.0))).sqrt();
    Ok(Schedule {
        stages,
        inner_iters: inner,
        initial_step,
        initial_prox_weight: profile.mu / (2.0 * r0),
        initial_tolerance: r0 / 3.0,
        ensemble_size: ensemble,
        failure_budget: delta_prime,
        gamma,
        initial_radius: r0,
        target_accuracy: eps,
        sample_bound: (inner as f64) * (stages as f64) * (ensemble as f64),
        success_bound: 1.0 - delta_prime,
    })
}
