//! Robust blind deconvolution: measurements `b = ⟨ℓ, x̄⟩⟨r, ȳ⟩ + u·ξ` with
//! Gaussian `ℓ, r`, Bernoulli corruption, and Gaussian gross noise.

use ndarray::{s, Array1};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{sign0, ModelTag};
use crate::poly::quartic_roots;
use crate::prox::{AffineAbsModel, BilinearAbsModel, StepModel};

#[derive(Debug, Clone)]
pub struct BlindInstance {
    /// Ground-truth pair `(x̄, ȳ)` with `‖x̄‖ = ‖ȳ‖`.
    pub signal_left: Array1<f64>,
    pub signal_right: Array1<f64>,
    pub p_fail: f64,
    /// Noise scale `σ_ξ`: the corruption is `ξ ~ N(0, σ_ξ²)` (signed).
    pub noise_scale: f64,
    /// Constraint radius multiplier `ν > 1`; the feasible set is
    /// `{(x, y) : ‖x‖ ≤ νD, ‖y‖ ≤ νD}` with `D = ‖x̄‖‖ȳ‖`.
    pub nu: f64,
}

impl BlindInstance {
    pub fn new(
        signal_left: Array1<f64>,
        signal_right: Array1<f64>,
        p_fail: f64,
        noise_scale: f64,
        nu: f64,
    ) -> Self {
        assert!(
            (0.0..0.5).contains(&p_fail),
            "p_fail must lie in [0, 1/2), got {p_fail}"
        );
        assert!(nu > 1.0, "nu must exceed 1, got {nu}");
        let nl = signal_left.dot(&signal_left).sqrt();
        let nr = signal_right.dot(&signal_right).sqrt();
        assert!(nl > 0.0 && nr > 0.0, "signals must be nonzero");
        assert!(
            (nl - nr).abs() <= 1e-9 * nl.max(nr),
            "signals must have equal norms ({nl} vs {nr})"
        );
        BlindInstance {
            signal_left,
            signal_right,
            p_fail,
            noise_scale,
            nu,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.signal_left.len(), self.signal_right.len())
    }

    /// Scale `D = ‖x̄‖·‖ȳ‖`.
    pub fn scale(&self) -> f64 {
        self.signal_left.dot(&self.signal_left).sqrt()
            * self.signal_right.dot(&self.signal_right).sqrt()
    }

    /// Feasible ball radius `νD` for each factor.
    pub fn feasible_radius(&self) -> f64 {
        self.nu * self.scale()
    }

    /// The concatenated ground truth `(x̄, ȳ)`.
    pub fn truth(&self) -> Array1<f64> {
        let (d1, d2) = self.dims();
        let mut z = Array1::zeros(d1 + d2);
        z.slice_mut(s![..d1]).assign(&self.signal_left);
        z.slice_mut(s![d1..]).assign(&self.signal_right);
        z
    }

    /// Projects the concatenated point onto the feasible set by independent
    /// ball projections of the two factors.
    pub fn project(&self, point: &mut Array1<f64>) {
        let (d1, _) = self.dims();
        let radius = self.feasible_radius();
        for range in [0..d1, d1..point.len()] {
            let mut block = point.slice_mut(s![range]);
            let norm = block.dot(&block).sqrt();
            if norm > radius {
                let scale = radius / norm;
                block.mapv_inplace(|v| v * scale);
            }
        }
    }
}

/// One blind-deconvolution measurement `(ℓ, r, b)`.
#[derive(Debug, Clone)]
pub struct BlindMeasurement {
    pub left: Array1<f64>,
    pub right: Array1<f64>,
    pub value: f64,
}

pub fn sample_blind(instance: &BlindInstance, rng: &mut ChaCha8Rng) -> BlindMeasurement {
    let (d1, d2) = instance.dims();
    let left: Array1<f64> = (0..d1).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let right: Array1<f64> = (0..d2).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let clean = left.dot(&instance.signal_left) * right.dot(&instance.signal_right);
    let corrupted = instance.p_fail > 0.0 && rng.random::<f64>() < instance.p_fail;
    let value = if corrupted {
        let g: f64 = rng.sample::<f64, _>(StandardNormal);
        clean + instance.noise_scale * g
    } else {
        clean
    };
    BlindMeasurement { left, right, value }
}

/// Per-sample loss `|⟨ℓ, x⟩⟨r, y⟩ − b|` on the concatenated point.
pub fn blind_loss(point: &Array1<f64>, d1: usize, m: &BlindMeasurement) -> f64 {
    let p: f64 = m.left.iter().zip(point.iter()).map(|(&l, &x)| l * x).sum();
    let q: f64 = m
        .right
        .iter()
        .zip(point.iter().skip(d1))
        .map(|(&r, &y)| r * y)
        .sum();
    (p * q - m.value).abs()
}

/// Distance to the solution set `{(αx̄, ȳ/α) : 1/ν ≤ |α| ≤ ν}`.
///
/// The squared distance `h(α) = ‖x − αx̄‖² + ‖y − ȳ/α‖²` is minimized over
/// each sign branch by solving the stationarity quartic
/// `α⁴‖x̄‖² − α³⟨x, x̄⟩ + α⟨y, ȳ⟩ − ‖ȳ‖² = 0` and checking the interval
/// endpoints.
pub fn dist_blind(point: &Array1<f64>, instance: &BlindInstance) -> f64 {
    let (d1, _) = instance.dims();
    let x = point.slice(s![..d1]);
    let y = point.slice(s![d1..]);
    let xx: f64 = x.dot(&x);
    let yy: f64 = y.dot(&y);
    let xbar_sq = instance.signal_left.dot(&instance.signal_left);
    let ybar_sq = instance.signal_right.dot(&instance.signal_right);
    let xxbar = x.dot(&instance.signal_left);
    let yybar = y.dot(&instance.signal_right);

    let h = |alpha: f64| {
        xx - 2.0 * alpha * xxbar + alpha * alpha * xbar_sq + yy - 2.0 * yybar / alpha
            + ybar_sq / (alpha * alpha)
    };

    let nu = instance.nu;
    let mut best = f64::INFINITY;
    let mut offer = |alpha: f64| {
        let v = h(alpha);
        if v < best {
            best = v;
        }
    };
    for endpoint in [1.0 / nu, nu, -nu, -1.0 / nu] {
        offer(endpoint);
    }
    for alpha in quartic_roots(xbar_sq, -xxbar, 0.0, yybar, -ybar_sq) {
        let a = alpha.abs();
        if alpha.is_finite() && a >= 1.0 / nu && a <= nu {
            offer(alpha);
        }
    }
    best.max(0.0).sqrt()
}

pub(crate) fn build_blind_model(
    tag: ModelTag,
    point: &Array1<f64>,
    m: &BlindMeasurement,
) -> Option<StepModel> {
    let d1 = m.left.len();
    let p: f64 = m.left.iter().zip(point.iter()).map(|(&l, &x)| l * x).sum();
    let q: f64 = m
        .right
        .iter()
        .zip(point.iter().skip(d1))
        .map(|(&r, &y)| r * y)
        .sum();
    let residual = p * q - m.value;
    let slope = || -> Array1<f64> {
        let mut g = Array1::zeros(point.len());
        for (gi, &li) in g.slice_mut(s![..d1]).iter_mut().zip(m.left.iter()) {
            *gi = q * li;
        }
        for (gi, &ri) in g.slice_mut(s![d1..]).iter_mut().zip(m.right.iter()) {
            *gi = p * ri;
        }
        g
    };
    let model = match tag {
        ModelTag::ProxLinear => StepModel::AbsLinear(AffineAbsModel {
            offset: residual,
            slope: slope(),
        }),
        ModelTag::Subgradient => {
            let s = sign0(residual);
            StepModel::Linear(AffineAbsModel {
                offset: residual.abs(),
                slope: slope().mapv(|g| s * g),
            })
        }
        ModelTag::Clipped => {
            let s = sign0(residual);
            StepModel::ClippedLinear {
                model: AffineAbsModel {
                    offset: residual.abs(),
                    slope: slope().mapv(|g| s * g),
                },
                lower_bound: 0.0,
            }
        }
        ModelTag::ProxPoint => StepModel::AbsBilinear(BilinearAbsModel {
            left: m.left.clone(),
            right: m.right.clone(),
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

    fn instance(d: usize, nu: f64) -> BlindInstance {
        let mut l = Array1::zeros(d);
        l[0] = 1.0;
        let mut r = Array1::zeros(d);
        r[1 % d] = 1.0;
        BlindInstance::new(l, r, 0.0, 10.0, nu)
    }

    #[test]
    fn clean_measurements_are_exact() {
        let inst = instance(3, 1.5);
        let mut rng = StreamFactory::new(5).stream(&[0]);
        for _ in 0..50 {
            let m = sample_blind(&inst, &mut rng);
            let c = m.left.dot(&inst.signal_left) * m.right.dot(&inst.signal_right);
            assert_eq!(m.value, c);
        }
    }

    #[test]
    fn dist_blind_on_solution_set() {
        let inst = instance(3, 2.5);
        assert!(dist_blind(&inst.truth(), &inst) < 1e-12);
        // (2x̄, ȳ/2) lies in the set when ν ≥ 2.
        let mut z = inst.truth();
        for i in 0..3 {
            z[i] *= 2.0;
        }
        for i in 3..6 {
            z[i] *= 0.5;
        }
        assert!(dist_blind(&z, &inst) < 1e-9, "{}", dist_blind(&z, &inst));
    }

    #[test]
    fn dist_blind_negative_alpha_branch() {
        let inst = instance(2, 1.5);
        let mut z = inst.truth();
        z.mapv_inplace(|v| -v);
        assert!(dist_blind(&z, &inst) < 1e-12);
    }

    #[test]
    fn projection_clamps_blocks_independently() {
        let inst = instance(2, 1.5);
        let mut z = Array1::from(vec![30.0, 0.0, 0.0, 0.1]);
        inst.project(&mut z);
        assert!((z[0] - 1.5).abs() < 1e-12);
        assert_eq!(z[3], 0.1);
    }
}
