//! Robust phase retrieval: measurements `b = (aᵀx̄)² + u·ξ` with Gaussian
//! directions, Bernoulli corruption `u`, and folded-Gaussian gross noise `ξ`.

use ndarray::Array1;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{sign0, ModelTag};
use crate::prox::{AffineAbsModel, QuadraticAbsModel, StepModel};

#[derive(Debug, Clone)]
pub struct PhaseInstance {
    /// Ground-truth signal `x̄`.
    pub signal: Array1<f64>,
    /// Probability a measurement is corrupted; must be `< 1/2`.
    pub p_fail: f64,
    /// Noise scale `σ_ξ`: the corruption is `ξ = |g|`, `g ~ N(0, σ_ξ²)`.
    pub noise_scale: f64,
}

impl PhaseInstance {
    pub fn new(signal: Array1<f64>, p_fail: f64, noise_scale: f64) -> Self {
        assert!(
            (0.0..0.5).contains(&p_fail),
            "p_fail must lie in [0, 1/2), got {p_fail}"
        );
        let norm = signal.dot(&signal).sqrt();
        assert!(norm > 0.0, "ground truth must be nonzero");
        PhaseInstance {
            signal,
            p_fail,
            noise_scale,
        }
    }

    pub fn dim(&self) -> usize {
        self.signal.len()
    }

    pub fn signal_norm(&self) -> f64 {
        self.signal.dot(&self.signal).sqrt()
    }
}

/// One phase-retrieval measurement `(a, b)`.
#[derive(Debug, Clone)]
pub struct PhaseMeasurement {
    pub direction: Array1<f64>,
    pub value: f64,
}

/// Draws `a ~ N(0, I)`, `u ~ Bernoulli(p_fail)`, `ξ = |N(0, σ_ξ²)|`, and
/// returns `b = (aᵀx̄)² + u·ξ`.
pub fn sample_phase(instance: &PhaseInstance, rng: &mut ChaCha8Rng) -> PhaseMeasurement {
    let d = instance.dim();
    let direction: Array1<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let clean = {
        let ip = direction.dot(&instance.signal);
        ip * ip
    };
    let corrupted = instance.p_fail > 0.0 && rng.random::<f64>() < instance.p_fail;
    let value = if corrupted {
        let g: f64 = rng.sample::<f64, _>(StandardNormal);
        clean + (instance.noise_scale * g).abs()
    } else {
        clean
    };
    PhaseMeasurement { direction, value }
}

/// Distance to the solution set `{±x̄}`.
pub fn dist_phase(x: &Array1<f64>, instance: &PhaseInstance) -> f64 {
    let minus = x - &instance.signal;
    let plus = x + &instance.signal;
    minus.dot(&minus).sqrt().min(plus.dot(&plus).sqrt())
}

/// Per-sample loss `|(aᵀx)² − b|`.
pub fn phase_loss(x: &Array1<f64>, m: &PhaseMeasurement) -> f64 {
    let ip = m.direction.dot(x);
    (ip * ip - m.value).abs()
}

pub(crate) fn build_phase_model(
    tag: ModelTag,
    point: &Array1<f64>,
    m: &PhaseMeasurement,
) -> Option<StepModel> {
    let ip = m.direction.dot(point);
    let residual = ip * ip - m.value;
    let slope_scale = 2.0 * ip;
    // Prox-linear slope g = 2(aᵀx)a; subgradient G = sign(residual)·g with
    // sign(0) = 0, the minimal-norm selection.
    let model = match tag {
        ModelTag::ProxLinear => StepModel::AbsLinear(AffineAbsModel {
            offset: residual,
            slope: m.direction.mapv(|ai| slope_scale * ai),
        }),
        ModelTag::Subgradient => {
            let s = sign0(residual);
            StepModel::Linear(AffineAbsModel {
                offset: residual.abs(),
                slope: m.direction.mapv(|ai| s * (slope_scale * ai)),
            })
        }
        ModelTag::Clipped => {
            let s = sign0(residual);
            StepModel::ClippedLinear {
                model: AffineAbsModel {
                    offset: residual.abs(),
                    slope: m.direction.mapv(|ai| s * (slope_scale * ai)),
                },
                lower_bound: 0.0,
            }
        }
        ModelTag::ProxPoint => StepModel::AbsQuadratic(QuadraticAbsModel {
            direction: m.direction.clone(),
            target: m.value,
        }),
        ModelTag::ProxGrad => return None,
    };
    Some(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::StreamFactory;
    use ndarray::array;

    fn instance(d: usize, p_fail: f64) -> PhaseInstance {
        let mut signal = Array1::zeros(d);
        signal[0] = 1.0;
        PhaseInstance::new(signal, p_fail, 10.0)
    }

    #[test]
    fn clean_measurements_are_exact() {
        let inst = instance(4, 0.0);
        let mut rng = StreamFactory::new(3).stream(&[0]);
        for _ in 0..100 {
            let m = sample_phase(&inst, &mut rng);
            let ip = m.direction.dot(&inst.signal);
            assert_eq!(m.value, ip * ip);
        }
    }

    #[test]
    fn dist_phase_sign_ambiguity() {
        let inst = instance(3, 0.0);
        assert_eq!(dist_phase(&inst.signal, &inst), 0.0);
        assert_eq!(dist_phase(&inst.signal.mapv(|v| -v), &inst), 0.0);
        let zero = Array1::zeros(3);
        assert!((dist_phase(&zero, &inst) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn subgradient_vanishes_on_null_direction() {
        // aᵀx = 0 makes the factor 2(aᵀx) vanish.
        let m = PhaseMeasurement {
            direction: array![0.0, 1.0],
            value: 3.0,
        };
        let x = array![5.0, 0.0];
        let built = build_phase_model(ModelTag::Subgradient, &x, &m).unwrap();
        match built {
            StepModel::Linear(aff) => {
                assert!(aff.slope.iter().all(|&g| g == 0.0));
            }
            _ => panic!("wrong model kind"),
        }
    }

    #[test]
    fn all_models_interpolate_at_truth_on_clean_data() {
        let inst = instance(5, 0.0);
        let mut rng = StreamFactory::new(11).stream(&[0]);
        let m = sample_phase(&inst, &mut rng);
        for tag in [
            ModelTag::Subgradient,
            ModelTag::Clipped,
            ModelTag::ProxLinear,
            ModelTag::ProxPoint,
        ] {
            let model = build_phase_model(tag, &inst.signal, &m).unwrap();
            assert_eq!(model.value_at_basepoint(&inst.signal), 0.0, "{tag}");
        }
    }
}
