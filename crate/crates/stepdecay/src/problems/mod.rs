//! Problem families: measurement sampling, model construction, solution-set
//! distances, and sharpness-constant estimation.

mod blind;
mod constants;
mod idx;
mod logistic;
mod phase;

pub use blind::{blind_loss, dist_blind, sample_blind, BlindInstance, BlindMeasurement};
pub use constants::{
    estimate_constants, mc_phase_constants, ConstantsError, InstanceRef, SharpnessProfile,
    TildeConstants,
};
pub use idx::{load_idx_images, load_idx_labels, load_idx_pair, IdxError};
pub use logistic::{gradient_second_moment, synth_logistic, LabeledSample, LogisticInstance};
pub use phase::{dist_phase, phase_loss, sample_phase, PhaseInstance, PhaseMeasurement};

pub(crate) use blind::build_blind_model;
pub(crate) use phase::build_phase_model;

use ndarray::Array1;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prox::StepModel;

/// Which stochastic model the inner loop builds at each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelTag {
    Subgradient,
    Clipped,
    ProxLinear,
    ProxPoint,
    /// Linearized smooth loss plus the ℓ1 term (sparse logistic regression).
    ProxGrad,
}

impl std::fmt::Display for ModelTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ModelTag::Subgradient => "subgradient",
            ModelTag::Clipped => "clipped",
            ModelTag::ProxLinear => "proxlinear",
            ModelTag::ProxPoint => "proxpoint",
            ModelTag::ProxGrad => "proxgrad",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemTag {
    Phase,
    Blind,
    Logistic,
}

impl std::fmt::Display for ProblemTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ProblemTag::Phase => "phase",
            ProblemTag::Blind => "blind",
            ProblemTag::Logistic => "logistic",
        };
        f.write_str(s)
    }
}

/// A single drawn measurement, across problem families.
#[derive(Debug, Clone)]
pub enum Measurement {
    Phase(PhaseMeasurement),
    Blind(BlindMeasurement),
    /// A labeled sample `(x, y)` for the logistic family.
    Logistic { x: Array1<f64>, label: f64 },
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model {model} is not defined for problem {problem}")]
    UnsupportedCombination { problem: ProblemTag, model: ModelTag },
}

/// Builds the one-step model of the sampled loss at `point`.
///
/// The affine models carry offsets relative to `point`; the anchored solve
/// rebases them at its own center.
pub fn build_model(
    model: ModelTag,
    point: &Array1<f64>,
    measurement: &Measurement,
    l1_weight: f64,
) -> Result<StepModel, ModelError> {
    match measurement {
        Measurement::Phase(m) => phase::build_phase_model(model, point, m).ok_or(
            ModelError::UnsupportedCombination {
                problem: ProblemTag::Phase,
                model,
            },
        ),
        Measurement::Blind(m) => blind::build_blind_model(model, point, m).ok_or(
            ModelError::UnsupportedCombination {
                problem: ProblemTag::Blind,
                model,
            },
        ),
        Measurement::Logistic { x, label } => {
            if model != ModelTag::ProxGrad {
                return Err(ModelError::UnsupportedCombination {
                    problem: ProblemTag::Logistic,
                    model,
                });
            }
            Ok(logistic::proxgrad_model(x.view(), *label, point, l1_weight))
        }
    }
}

pub(crate) fn sign0(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum()
    }
}

/// A uniformly random direction on the unit sphere.
pub fn unit_sphere(d: usize, rng: &mut ChaCha8Rng) -> Array1<f64> {
    loop {
        let v: Array1<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = v.dot(&v).sqrt();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Ground truth plus `r0` times a uniformly random unit direction. For blind
/// deconvolution the perturbation applies jointly to the concatenated pair,
/// so the distance to the solution set is at most `r0` by construction.
pub fn random_init(truth: &Array1<f64>, r0: f64, rng: &mut ChaCha8Rng) -> Array1<f64> {
    if r0 == 0.0 {
        return truth.clone();
    }
    let dir = unit_sphere(truth.len(), rng);
    truth + &(dir * r0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::StreamFactory;

    #[test]
    fn random_init_at_zero_radius_is_truth() {
        let f = StreamFactory::new(1);
        let truth = Array1::from(vec![1.0, -2.0, 0.5]);
        let x = random_init(&truth, 0.0, &mut f.stream(&[0]));
        assert_eq!(x, truth);
    }

    #[test]
    fn random_init_is_deterministic() {
        let f = StreamFactory::new(9);
        let truth = Array1::from(vec![1.0, 0.0, 0.0]);
        let a = random_init(&truth, 0.25, &mut f.stream(&[7]));
        let b = random_init(&truth, 0.25, &mut f.stream(&[7]));
        assert_eq!(a, b);
        let delta = &a - &truth;
        assert!((delta.dot(&delta).sqrt() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn build_model_rejects_unknown_combination() {
        let meas = Measurement::Logistic {
            x: Array1::zeros(3),
            label: 1.0,
        };
        let err = build_model(ModelTag::ProxPoint, &Array1::zeros(4), &meas, 0.1);
        assert!(err.is_err());
    }
}
