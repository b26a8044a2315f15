//! Sharpness and Lipschitz constants for the Gaussian measurement models.
//!
//! Phase retrieval uses the exact Gaussian moments: `μ̃ = 2/π` (the minimum
//! of `E|⟨a,v⟩⟨a,w⟩|` over unit pairs, attained at orthogonal pairs),
//! `η̃ = E⟨a,v⟩² = 1`, and `𝖫̃ = √(E[⟨a,v⟩²‖a‖²]) = √(d+2)`. Blind
//! deconvolution uses the analytic `μ̃ = 2/π` (rank-one extremal matrices)
//! and Monte Carlo estimates with standard errors for the remaining moments.

use ndarray::Array1;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{BlindInstance, PhaseInstance};

/// Minimum Monte Carlo sample count accepted by the estimators.
pub const MIN_MC_SAMPLES: usize = 10_000;

/// The constants `(μ, η, 𝖫)` plus the tube parameter `γ` that drive the
/// restart schedules. The tube is `{x : dist(x, S) ≤ γμ/η}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SharpnessProfile {
    /// Sharpness modulus `μ > 0`.
    pub mu: f64,
    /// One-sided accuracy modulus `η ≥ 0`; `0` encodes a convex family,
    /// for which the tube is the whole space.
    pub eta: f64,
    /// Second-moment bound `𝖫` on the model subgradients over the tube.
    pub l_bar: f64,
    /// Tube parameter `γ ∈ (0, 2)`.
    pub gamma: f64,
}

impl SharpnessProfile {
    /// Derived tube radius `γμ/η` (infinite for convex families).
    pub fn tube_radius(&self) -> f64 {
        if self.eta == 0.0 {
            f64::INFINITY
        } else {
            self.gamma * self.mu / self.eta
        }
    }
}

/// Raw measurement-law moments, before problem-level composition. Standard
/// errors are reported for Monte Carlo entries and zero for analytic ones.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TildeConstants {
    pub mu_tilde: f64,
    pub eta_tilde: f64,
    pub l_tilde: f64,
    pub mu_std_err: f64,
    pub eta_std_err: f64,
    pub l_std_err: f64,
}

#[derive(Debug, Error)]
pub enum ConstantsError {
    #[error("Monte Carlo estimation needs at least {MIN_MC_SAMPLES} samples, got {0}")]
    TooFewSamples(usize),
}

pub enum InstanceRef<'a> {
    Phase(&'a PhaseInstance),
    Blind(&'a BlindInstance),
}

/// Composes the measurement-law moments into the problem-level profile.
///
/// Phase retrieval: `μ = (1 − 2p_fail)·μ̃·‖x̄‖`, `η = 1` (the Gaussian
/// constant the step-decay experiments run with), and
/// `𝖫 = 2𝖫̃‖x̄‖(1 + (1 − 2p_fail)μ̃/η̃)`. Blind deconvolution:
/// `μ = μ̃(1 − 2p_fail)√D / (2√2(ν+1))`, `η = η̃`, `𝖫 = ν𝖫̃√D`.
pub fn estimate_constants(
    instance: InstanceRef<'_>,
    gamma: f64,
    mc_samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(SharpnessProfile, TildeConstants), ConstantsError> {
    assert!(gamma > 0.0 && gamma < 2.0, "gamma must lie in (0, 2)");
    match instance {
        InstanceRef::Phase(inst) => {
            let d = inst.dim() as f64;
            let tilde = TildeConstants {
                mu_tilde: 2.0 / std::f64::consts::PI,
                eta_tilde: 1.0,
                l_tilde: (d + 2.0).sqrt(),
                mu_std_err: 0.0,
                eta_std_err: 0.0,
                l_std_err: 0.0,
            };
            let norm = inst.signal_norm();
            let attenuation = 1.0 - 2.0 * inst.p_fail;
            let mu = attenuation * tilde.mu_tilde * norm;
            let eta = 1.0;
            let l_bar =
                2.0 * tilde.l_tilde * norm * (1.0 + attenuation * tilde.mu_tilde / tilde.eta_tilde);
            Ok((
                SharpnessProfile {
                    mu,
                    eta,
                    l_bar,
                    gamma,
                },
                tilde,
            ))
        }
        InstanceRef::Blind(inst) => {
            if mc_samples < MIN_MC_SAMPLES {
                return Err(ConstantsError::TooFewSamples(mc_samples));
            }
            let tilde = mc_blind_constants(inst.dims(), mc_samples, rng);
            let scale = inst.scale();
            let attenuation = 1.0 - 2.0 * inst.p_fail;
            let mu = tilde.mu_tilde * attenuation * scale.sqrt()
                / (2.0 * 2f64.sqrt() * (inst.nu + 1.0));
            let eta = tilde.eta_tilde;
            let l_bar = inst.nu * tilde.l_tilde * scale.sqrt();
            Ok((
                SharpnessProfile {
                    mu,
                    eta,
                    l_bar,
                    gamma,
                },
                tilde,
            ))
        }
    }
}

fn mean_and_std_err(samples: impl Iterator<Item = f64>, n: usize) -> (f64, f64) {
    let mut mean = 0.0;
    let mut m2 = 0.0;
    let mut count = 0.0;
    for x in samples {
        count += 1.0;
        let delta = x - mean;
        mean += delta / count;
        m2 += delta * (x - mean);
    }
    debug_assert_eq!(count as usize, n);
    let var = m2 / (count - 1.0);
    (mean, (var / count).sqrt())
}

/// Monte Carlo estimates of the phase-retrieval Gaussian moments at
/// dimension `d`: `E|⟨a,v⟩⟨a,w⟩|` over an orthonormal pair,
/// `E⟨a,v⟩²`, and `√(E[⟨a,v⟩²‖a‖²])`.
pub fn mc_phase_constants(d: usize, n: usize, rng: &mut ChaCha8Rng) -> TildeConstants {
    assert!(d >= 2 && n >= MIN_MC_SAMPLES);
    let mut mu_acc = Vec::with_capacity(n);
    let mut eta_acc = Vec::with_capacity(n);
    let mut l_acc = Vec::with_capacity(n);
    for _ in 0..n {
        let a: Array1<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let av = a[0];
        let aw = a[1];
        let nsq = a.dot(&a);
        mu_acc.push((av * aw).abs());
        eta_acc.push(av * av);
        l_acc.push(av * av * nsq);
    }
    let (mu, mu_se) = mean_and_std_err(mu_acc.into_iter(), n);
    let (eta, eta_se) = mean_and_std_err(eta_acc.into_iter(), n);
    let (l_sq, l_sq_se) = mean_and_std_err(l_acc.into_iter(), n);
    let l = l_sq.sqrt();
    TildeConstants {
        mu_tilde: mu,
        eta_tilde: eta,
        l_tilde: l,
        mu_std_err: mu_se,
        eta_std_err: eta_se,
        // First-order delta method for the square root.
        l_std_err: l_sq_se / (2.0 * l),
    }
}

/// Blind-deconvolution Gaussian moments. `μ̃ = 2/π` is analytic (the minimum
/// of `E|ℓᵀMr|` over unit-Frobenius rank ≤ 2 matrices sits at rank one,
/// where the expectation is `E|g|·E|h| = 2/π`). The maximum `η̃` (balanced
/// rank-two `M`) and the step second moment `𝖫̃` are estimated by Monte
/// Carlo.
fn mc_blind_constants((d1, d2): (usize, usize), n: usize, rng: &mut ChaCha8Rng) -> TildeConstants {
    let mut eta_acc = Vec::with_capacity(n);
    let mut l_acc = Vec::with_capacity(n);
    let half = 0.5f64.sqrt();
    for _ in 0..n {
        let l: Array1<f64> = (0..d1).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let r: Array1<f64> = (0..d2).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let balanced = if d1 >= 2 && d2 >= 2 {
            (l[0] * r[0] + l[1] * r[1]) * half
        } else {
            l[0] * r[0]
        };
        eta_acc.push(balanced.abs());
        let ln = l.dot(&l).sqrt();
        let rn = r.dot(&r).sqrt();
        let step = l[0].abs() * rn + r[0].abs() * ln;
        l_acc.push(step * step);
    }
    let (eta, eta_se) = mean_and_std_err(eta_acc.into_iter(), n);
    let (l_sq, l_sq_se) = mean_and_std_err(l_acc.into_iter(), n);
    let l = l_sq.sqrt();
    TildeConstants {
        mu_tilde: 2.0 / std::f64::consts::PI,
        eta_tilde: eta,
        l_tilde: l,
        mu_std_err: 0.0,
        eta_std_err: eta_se,
        l_std_err: l_sq_se / (2.0 * l),
    }
}
