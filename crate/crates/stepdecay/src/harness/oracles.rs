//! [`ModelOracle`] implementations wiring the problem families to the
//! solvers, with streaming and finite-pool sampling modes.

use ndarray::Array1;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::problems::{
    build_blind_model, build_phase_model, sample_blind, sample_phase, BlindInstance,
    BlindMeasurement, LogisticInstance, ModelTag, PhaseInstance, PhaseMeasurement,
};
use crate::solvers::ModelOracle;
use crate::stream::{StreamFactory, POOL};

pub struct PhaseOracle {
    pub instance: PhaseInstance,
    pub model: ModelTag,
    /// Finite-sample pool; `None` streams fresh measurements.
    pub pool: Option<Vec<PhaseMeasurement>>,
}

impl PhaseOracle {
    pub fn streaming(instance: PhaseInstance, model: ModelTag) -> Self {
        PhaseOracle {
            instance,
            model,
            pool: None,
        }
    }

    pub fn finite(
        instance: PhaseInstance,
        model: ModelTag,
        pool_size: usize,
        factory: &StreamFactory,
        trial: u64,
    ) -> Self {
        let mut rng = factory.stream(&[trial, POOL]);
        let pool = (0..pool_size)
            .map(|_| sample_phase(&instance, &mut rng))
            .collect();
        PhaseOracle {
            instance,
            model,
            pool: Some(pool),
        }
    }

    /// Mean per-sample loss over a measurement set.
    pub fn mean_loss(point: &Array1<f64>, measurements: &[PhaseMeasurement]) -> f64 {
        let total: f64 = measurements
            .iter()
            .map(|m| crate::problems::phase_loss(point, m))
            .sum();
        total / measurements.len().max(1) as f64
    }
}

impl ModelOracle for PhaseOracle {
    fn sample_model(&self, point: &Array1<f64>, rng: &mut ChaCha8Rng) -> crate::prox::StepModel {
        match &self.pool {
            Some(pool) => {
                let index = rng.random_range(0..pool.len());
                build_phase_model(self.model, point, &pool[index])
                    .expect("phase supports all four models")
            }
            None => {
                let m = sample_phase(&self.instance, rng);
                build_phase_model(self.model, point, &m)
                    .expect("phase supports all four models")
            }
        }
    }
}

pub struct BlindOracle {
    pub instance: BlindInstance,
    pub model: ModelTag,
    pub pool: Option<Vec<BlindMeasurement>>,
}

impl BlindOracle {
    pub fn streaming(instance: BlindInstance, model: ModelTag) -> Self {
        BlindOracle {
            instance,
            model,
            pool: None,
        }
    }

    pub fn finite(
        instance: BlindInstance,
        model: ModelTag,
        pool_size: usize,
        factory: &StreamFactory,
        trial: u64,
    ) -> Self {
        let mut rng = factory.stream(&[trial, POOL]);
        let pool = (0..pool_size)
            .map(|_| sample_blind(&instance, &mut rng))
            .collect();
        BlindOracle {
            instance,
            model,
            pool: Some(pool),
        }
    }

    pub fn mean_loss(point: &Array1<f64>, d1: usize, measurements: &[BlindMeasurement]) -> f64 {
        let total: f64 = measurements
            .iter()
            .map(|m| crate::problems::blind_loss(point, d1, m))
            .sum();
        total / measurements.len().max(1) as f64
    }
}

impl ModelOracle for BlindOracle {
    fn sample_model(&self, point: &Array1<f64>, rng: &mut ChaCha8Rng) -> crate::prox::StepModel {
        match &self.pool {
            Some(pool) => {
                let index = rng.random_range(0..pool.len());
                build_blind_model(self.model, point, &pool[index])
                    .expect("blind supports all four models")
            }
            None => {
                let m = sample_blind(&self.instance, rng);
                build_blind_model(self.model, point, &m)
                    .expect("blind supports all four models")
            }
        }
    }

    fn project(&self, point: &mut Array1<f64>) {
        self.instance.project(point);
    }
}

/// Finite-sum oracle over a logistic instance; each draw is a pool index.
pub struct LogisticOracle<'a> {
    pub instance: &'a LogisticInstance,
}

impl ModelOracle for LogisticOracle<'_> {
    fn sample_model(&self, point: &Array1<f64>, rng: &mut ChaCha8Rng) -> crate::prox::StepModel {
        let index = rng.random_range(0..self.instance.num_samples());
        self.instance.sample_model(index, point)
    }
}
