//! Exact solvers for quadratically anchored model subproblems.
//!
//! Every algorithm step in this crate reduces to minimizing
//! `model(u) + (λ/2)·‖u − w‖²` for one of a small menu of convex (or
//! piecewise-smooth) models. The minimizers all have closed forms or reduce
//! to one-dimensional candidate enumeration, which keeps the inner loops
//! exact and cheap.
//!
//! Conventions: `sign(0) = 0` (the minimal-norm subdifferential selection),
//! degenerate models (zero slope/direction) return the anchor center, and
//! candidate ties are broken by least movement from the anchor center, then
//! by the nonnegative scalar.

use ndarray::Array1;

use crate::poly::quartic_roots;

/// An affine model `u ↦ c + ⟨g, u − y⟩` at a basepoint `y`, used both as-is
/// (subgradient steps) and inside an absolute value (prox-linear steps).
#[derive(Debug, Clone)]
pub struct AffineAbsModel {
    /// Model value at the basepoint.
    pub offset: f64,
    /// Model slope `g`.
    pub slope: Array1<f64>,
}

impl AffineAbsModel {
    /// Offset of the same model re-expressed at `center`:
    /// `c' = c + ⟨g, center − basepoint⟩`.
    pub fn rebased_offset(&self, basepoint: &Array1<f64>, center: &Array1<f64>) -> f64 {
        if std::ptr::eq(basepoint, center) {
            return self.offset;
        }
        let mut shift = 0.0;
        for ((&g, &w), &y) in self.slope.iter().zip(center).zip(basepoint) {
            shift += g * (w - y);
        }
        self.offset + shift
    }
}

/// The model `u ↦ |(aᵀu)² − b|`.
#[derive(Debug, Clone)]
pub struct QuadraticAbsModel {
    pub direction: Array1<f64>,
    pub target: f64,
}

/// The model `(x, y) ↦ |⟨ℓ, x⟩·⟨r, y⟩ − b|`.
#[derive(Debug, Clone)]
pub struct BilinearAbsModel {
    pub left: Array1<f64>,
    pub right: Array1<f64>,
    pub target: f64,
}

/// A quadratic anchor `(λ/2)·‖u − w‖²` with weight `λ > 0` and center `w`.
#[derive(Debug, Clone)]
pub struct QuadraticAnchor {
    pub weight: f64,
    pub center: Array1<f64>,
}

impl QuadraticAnchor {
    pub fn new(weight: f64, center: Array1<f64>) -> Self {
        debug_assert!(weight > 0.0);
        QuadraticAnchor { weight, center }
    }

    /// Composes two anchors into one: the sum of `(λ₁/2)‖u−w₁‖²` and
    /// `(λ₂/2)‖u−w₂‖²` equals `((λ₁+λ₂)/2)‖u−w‖²` plus a constant, with
    /// `w = (λ₁w₁ + λ₂w₂)/(λ₁+λ₂)`. This is how the inner step anchor `1/α`
    /// at `y_k` combines with the proximal anchor `ρ` at `y₀`.
    pub fn compose(&self, other: &QuadraticAnchor) -> QuadraticAnchor {
        let weight = self.weight + other.weight;
        let center = self
            .center
            .iter()
            .zip(other.center.iter())
            .map(|(&a, &b)| (self.weight * a + other.weight * b) / weight)
            .collect();
        QuadraticAnchor { weight, center }
    }
}

fn sign0(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum()
    }
}

fn norm_sq(v: &Array1<f64>) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Minimizer of `|c + ⟨g, u − w⟩| + (λ/2)‖u − w‖²`, where the model is
/// already rebased so that `model.offset` is its value at the anchor center.
///
/// The step moves against the slope by `min(1/λ, |c|/‖g‖²)`, the familiar
/// step-size-capped Polyak step.
pub fn affine_abs_prox(model: &AffineAbsModel, anchor: &QuadraticAnchor) -> Array1<f64> {
    abs_linear_step(model.offset, &model.slope, anchor)
}

pub(crate) fn abs_linear_step(
    c: f64,
    slope: &Array1<f64>,
    anchor: &QuadraticAnchor,
) -> Array1<f64> {
    let gsq = norm_sq(slope);
    if c == 0.0 || gsq == 0.0 {
        return anchor.center.clone();
    }
    let t = (1.0 / anchor.weight).min(c.abs() / gsq);
    let scale = sign0(c) * t;
    let mut u = anchor.center.clone();
    u.iter_mut()
        .zip(slope.iter())
        .for_each(|(ui, &gi)| *ui -= scale * gi);
    u
}

/// Minimizer of `max{c + ⟨g, u − w⟩, lower_bound} + (λ/2)‖u − w‖²`, with the
/// model rebased at the anchor center as in [`affine_abs_prox`].
///
/// Whenever the rebased offset sits above the clip level this coincides
/// exactly with [`affine_abs_prox`] at positive offset.
pub fn clipped_affine_abs_prox(
    model: &AffineAbsModel,
    lower_bound: f64,
    anchor: &QuadraticAnchor,
) -> Array1<f64> {
    clipped_linear_step(model.offset, lower_bound, &model.slope, anchor)
}

pub(crate) fn clipped_linear_step(
    offset: f64,
    lower_bound: f64,
    slope: &Array1<f64>,
    anchor: &QuadraticAnchor,
) -> Array1<f64> {
    let c = offset - lower_bound;
    if c <= 0.0 {
        return anchor.center.clone();
    }
    let gsq = norm_sq(slope);
    if gsq == 0.0 {
        return anchor.center.clone();
    }
    let t = (1.0 / anchor.weight).min(c / gsq);
    let mut u = anchor.center.clone();
    u.iter_mut()
        .zip(slope.iter())
        .for_each(|(ui, &gi)| *ui -= t * gi);
    u
}

/// Candidate bookkeeping for the scalar enumerations: least objective, then
/// least movement from the anchor center, then the nonnegative scalar.
struct Best {
    key: f64,
    obj: f64,
    movement: f64,
}

impl Best {
    fn new() -> Self {
        Best {
            key: f64::NAN,
            obj: f64::INFINITY,
            movement: f64::INFINITY,
        }
    }

    fn offer(&mut self, key: f64, obj: f64, movement: f64) {
        let better = obj < self.obj
            || (obj == self.obj && movement < self.movement)
            || (obj == self.obj && movement == self.movement && key >= 0.0 && self.key < 0.0);
        if better {
            self.key = key;
            self.obj = obj;
            self.movement = movement;
        }
    }
}

/// Global minimizer of `|(aᵀu)² − b| + (λ/2)‖u − w‖²`.
///
/// Reduces to the scalar `v = aᵀu`: for fixed `v` the optimal `u` is the
/// least-movement lift `w + ((v − v₀)/‖a‖²)a`, leaving the one-dimensional
/// objective `|v² − b| + (λ/(2‖a‖²))(v − v₀)²`. Its minimizer is among the
/// breakpoints `±√b` and the per-branch stationary points
/// `v₀/(1 ± 2‖a‖²/λ)`, each kept only when its sign pattern is consistent
/// and (for the minus branch) the denominator is positive.
pub fn quadratic_abs_prox(model: &QuadraticAbsModel, anchor: &QuadraticAnchor) -> Array1<f64> {
    let asq = norm_sq(&model.direction);
    if asq == 0.0 {
        return anchor.center.clone();
    }
    let beta = anchor.weight / asq;
    let v0: f64 = model.direction.dot(&anchor.center);
    let b = model.target;

    let obj = |v: f64| (v * v - b).abs() + 0.5 * beta * (v - v0) * (v - v0);
    let mut best = Best::new();
    let mut offer = |v: f64| best.offer(v, obj(v), (v - v0).abs());

    if b >= 0.0 {
        let s = b.sqrt();
        offer(s);
        offer(-s);
    }
    // Outside branch (v² ≥ b): stationary at v₀/(1 + 2/β), always defined.
    let vp = v0 / (1.0 + 2.0 / beta);
    if vp * vp >= b {
        offer(vp);
    }
    // Inside branch (v² ≤ b): needs β > 2 for the restricted quadratic to be
    // convex; otherwise its stationary point is a maximum.
    let dm = 1.0 - 2.0 / beta;
    if dm > 0.0 {
        let vm = v0 / dm;
        if vm * vm <= b {
            offer(vm);
        }
    }

    let v = best.key;
    let mut u = anchor.center.clone();
    let scale = (v - v0) / asq;
    u.iter_mut()
        .zip(model.direction.iter())
        .for_each(|(ui, &ai)| *ui += scale * ai);
    u
}

/// Result of [`bilinear_abs_prox`]. `scan_fallback` is set when the quartic
/// boundary solve found no usable root and a bracketed scan was used instead.
#[derive(Debug, Clone)]
pub struct BilinearProx {
    pub x: Array1<f64>,
    pub y: Array1<f64>,
    pub scan_fallback: bool,
}

/// Global minimizer of
/// `|⟨ℓ,x⟩⟨r,y⟩ − b| + (λₓ/2)‖x − wₓ‖² + (λᵧ/2)‖y − wᵧ‖²`.
///
/// Reduces to the scalars `p = ⟨ℓ,x⟩`, `q = ⟨r,y⟩` via rank-one lifts. The
/// minimizer of the reduced objective
/// `|pq − b| + (βₓ/2)(p−p₀)² + (βᵧ/2)(q−q₀)²` is either a stationary point
/// of one of the two smooth sign branches (a 2×2 linear system per sign) or
/// lies on the hyperbola `pq = b`, where stationarity gives a quartic in `p`.
pub fn bilinear_abs_prox(
    model: &BilinearAbsModel,
    anchor_x: &QuadraticAnchor,
    anchor_y: &QuadraticAnchor,
) -> BilinearProx {
    let lsq = norm_sq(&model.left);
    let rsq = norm_sq(&model.right);
    debug_assert!(lsq > 0.0 && rsq > 0.0);
    let bx = anchor_x.weight / lsq;
    let by = anchor_y.weight / rsq;
    let p0: f64 = model.left.dot(&anchor_x.center);
    let q0: f64 = model.right.dot(&anchor_y.center);
    let b = model.target;

    let obj = |p: f64, q: f64| {
        (p * q - b).abs() + 0.5 * bx * (p - p0) * (p - p0) + 0.5 * by * (q - q0) * (q - q0)
    };
    let movement =
        |p: f64, q: f64| (p - p0) * (p - p0) / lsq + (q - q0) * (q - q0) / rsq;

    struct Best2 {
        p: f64,
        q: f64,
        obj: f64,
        movement: f64,
        any: bool,
    }
    let mut best = Best2 {
        p: p0,
        q: q0,
        obj: f64::INFINITY,
        movement: f64::INFINITY,
        any: false,
    };
    let mut offer = |p: f64, q: f64| {
        let o = obj(p, q);
        let m = movement(p, q);
        let better = o < best.obj
            || (o == best.obj && m < best.movement)
            || (o == best.obj && m == best.movement && p >= 0.0 && best.p < 0.0);
        if better || !best.any {
            best = Best2 {
                p,
                q,
                obj: o,
                movement: m,
                any: true,
            };
        }
    };

    // Smooth branches: sign(pq − b) = s fixed.
    for s in [1.0f64, -1.0] {
        let det = bx * by - 1.0;
        if det.abs() > 1e-12 * (1.0 + bx * by) {
            let p = by * (bx * p0 - s * q0) / det;
            let q = bx * (by * q0 - s * p0) / det;
            if s * (p * q - b) >= 0.0 {
                offer(p, q);
            }
        }
    }

    // Boundary pq = b.
    let mut found_boundary = false;
    if b == 0.0 {
        offer(0.0, q0);
        offer(p0, 0.0);
        found_boundary = true;
    } else {
        for p in quartic_roots(bx, -bx * p0, 0.0, by * q0 * b, -by * b * b) {
            if p != 0.0 && p.is_finite() {
                offer(p, b / p);
                found_boundary = true;
            }
        }
    }

    // The quartic always has a real root when b ≠ 0 (its value at 0 is
    // −βᵧb² < 0), so this scan exists only as a safety net.
    let mut scan_fallback = false;
    if !found_boundary && b != 0.0 {
        scan_fallback = true;
        let span = 2.0 * (p0.abs() + q0.abs() + b.abs().sqrt() + 1.0);
        let bound_obj = |p: f64| {
            let q = b / p;
            0.5 * bx * (p - p0) * (p - p0) + 0.5 * by * (q - q0) * (q - q0)
        };
        for sign in [1.0f64, -1.0] {
            let (mut lo, mut hi) = (1e-9 * span, span);
            for _ in 0..3 {
                let n = 2000;
                let mut arg = lo;
                let mut val = f64::INFINITY;
                for i in 0..=n {
                    let p = sign * (lo + (hi - lo) * i as f64 / n as f64);
                    let o = bound_obj(p);
                    if o < val {
                        val = o;
                        arg = p.abs();
                    }
                }
                let step = (hi - lo) / n as f64;
                lo = (arg - step).max(1e-12);
                hi = arg + step;
                if hi - lo < 1e-10 {
                    break;
                }
            }
            offer(sign * 0.5 * (lo + hi), b / (sign * 0.5 * (lo + hi)));
        }
    }

    let mut x = anchor_x.center.clone();
    let sx = (best.p - p0) / lsq;
    x.iter_mut()
        .zip(model.left.iter())
        .for_each(|(xi, &li)| *xi += sx * li);
    let mut y = anchor_y.center.clone();
    let sy = (best.q - q0) / rsq;
    y.iter_mut()
        .zip(model.right.iter())
        .for_each(|(yi, &ri)| *yi += sy * ri);
    BilinearProx {
        x,
        y,
        scan_fallback,
    }
}

/// Coordinatewise shrinkage `sign(vᵢ)·max(|vᵢ| − θ, 0)`, the anchored
/// minimizer of `θ‖u‖₁ + (1/2)‖u − v‖²`.
pub fn soft_threshold(v: &Array1<f64>, theta: f64) -> Array1<f64> {
    debug_assert!(theta >= 0.0);
    v.mapv(|x| sign0(x) * (x.abs() - theta).max(0.0))
}

/// In-place variant of [`soft_threshold`] over a prefix of coordinates.
pub fn soft_threshold_prefix(v: &mut Array1<f64>, theta: f64, len: usize) {
    for x in v.iter_mut().take(len) {
        *x = sign0(*x) * (x.abs() - theta).max(0.0);
    }
}

/// A sampled one-step model, ready for an anchored solve.
///
/// The affine variants carry offsets relative to the basepoint at which they
/// were built; [`anchored_step`] rebases them at the anchor center.
#[derive(Debug, Clone)]
pub enum StepModel {
    /// Plain affine model (subgradient step): `c + ⟨g, u − base⟩`.
    Linear(AffineAbsModel),
    /// Prox-linear model: `|c + ⟨g, u − base⟩|`.
    AbsLinear(AffineAbsModel),
    /// Clipped affine model: `max{c + ⟨g, u − base⟩, lower_bound}`.
    ClippedLinear {
        model: AffineAbsModel,
        lower_bound: f64,
    },
    /// Proximal-point model for phase retrieval: `|(aᵀu)² − b|`.
    AbsQuadratic(QuadraticAbsModel),
    /// Proximal-point model for blind deconvolution, over the concatenated
    /// point `(x, y)` split at `left.len()`.
    AbsBilinear(BilinearAbsModel),
    /// Linearized smooth loss plus an ℓ1 term on the first `n_l1`
    /// coordinates: `c + ⟨g, u − base⟩ + l1·‖u[..n_l1]‖₁`.
    L1Linear {
        value: f64,
        grad: Array1<f64>,
        l1: f64,
        n_l1: usize,
    },
}

impl StepModel {
    /// Model value at its own basepoint (pre-anchor loss estimate).
    pub fn value_at_basepoint(&self, basepoint: &Array1<f64>) -> f64 {
        match self {
            StepModel::Linear(m) | StepModel::AbsLinear(m) => m.offset,
            StepModel::ClippedLinear { model, lower_bound } => model.offset.max(*lower_bound),
            StepModel::AbsQuadratic(m) => {
                let v: f64 = m.direction.dot(basepoint);
                (v * v - m.target).abs()
            }
            StepModel::AbsBilinear(m) => {
                let d1 = m.left.len();
                let p: f64 = m
                    .left
                    .iter()
                    .zip(basepoint.iter())
                    .map(|(&l, &x)| l * x)
                    .sum();
                let q: f64 = m
                    .right
                    .iter()
                    .zip(basepoint.iter().skip(d1))
                    .map(|(&r, &y)| r * y)
                    .sum();
                (p * q - m.target).abs()
            }
            StepModel::L1Linear { value, .. } => *value,
        }
    }
}

/// Solves `argmin_u model(u) + (λ/2)‖u − w‖²` for a model built at
/// `basepoint`, dispatching to the closed forms above. For the bilinear model
/// the joint anchor splits into independent per-block anchors with the same
/// weight.
pub fn anchored_step(
    model: &StepModel,
    basepoint: &Array1<f64>,
    anchor: &QuadraticAnchor,
) -> Array1<f64> {
    match model {
        StepModel::Linear(m) => {
            // Pure gradient step: the offset does not enter.
            let mut u = anchor.center.clone();
            u.iter_mut()
                .zip(m.slope.iter())
                .for_each(|(ui, &gi)| *ui -= gi / anchor.weight);
            u
        }
        StepModel::AbsLinear(m) => {
            let offset = m.rebased_offset(basepoint, &anchor.center);
            abs_linear_step(offset, &m.slope, anchor)
        }
        StepModel::ClippedLinear { model, lower_bound } => {
            let offset = model.rebased_offset(basepoint, &anchor.center);
            clipped_linear_step(offset, *lower_bound, &model.slope, anchor)
        }
        StepModel::AbsQuadratic(m) => quadratic_abs_prox(m, anchor),
        StepModel::AbsBilinear(m) => {
            let d1 = m.left.len();
            let ax = QuadraticAnchor {
                weight: anchor.weight,
                center: anchor.center.slice(ndarray::s![..d1]).to_owned(),
            };
            let ay = QuadraticAnchor {
                weight: anchor.weight,
                center: anchor.center.slice(ndarray::s![d1..]).to_owned(),
            };
            let sol = bilinear_abs_prox(m, &ax, &ay);
            let mut u = Array1::zeros(anchor.center.len());
            u.slice_mut(ndarray::s![..d1]).assign(&sol.x);
            u.slice_mut(ndarray::s![d1..]).assign(&sol.y);
            u
        }
        StepModel::L1Linear { grad, l1, n_l1, .. } => {
            let mut u = anchor.center.clone();
            u.iter_mut()
                .zip(grad.iter())
                .for_each(|(ui, &gi)| *ui -= gi / anchor.weight);
            soft_threshold_prefix(&mut u, l1 / anchor.weight, *n_l1);
            u
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn e1(d: usize) -> Array1<f64> {
        let mut v = Array1::zeros(d);
        v[0] = 1.0;
        v
    }

    #[test]
    fn affine_zero_offset_stays_at_center() {
        let m = AffineAbsModel {
            offset: 0.0,
            slope: array![3.0, -1.0],
        };
        let a = QuadraticAnchor::new(2.0, array![0.5, -0.5]);
        assert_eq!(affine_abs_prox(&m, &a), a.center);
    }

    #[test]
    fn affine_unit_cases() {
        // c=1, g=e1, λ=1, w=0 → u = -e1 (grid-verified optimum).
        let a = QuadraticAnchor::new(1.0, Array1::zeros(3));
        let m = AffineAbsModel {
            offset: 1.0,
            slope: e1(3),
        };
        assert_eq!(affine_abs_prox(&m, &a), -e1(3));
        // c=3: the 1/λ cap binds, same point.
        let m3 = AffineAbsModel {
            offset: 3.0,
            slope: e1(3),
        };
        assert_eq!(affine_abs_prox(&m3, &a), -e1(3));
    }

    #[test]
    fn clipped_below_bound_stays() {
        let a = QuadraticAnchor::new(1.0, array![1.0, 2.0]);
        let m = AffineAbsModel {
            offset: -1.0,
            slope: array![5.0, 5.0],
        };
        assert_eq!(clipped_affine_abs_prox(&m, 0.0, &a), a.center);
    }

    #[test]
    fn clipped_matches_abs_for_positive_offset() {
        let a = QuadraticAnchor::new(1.0, Array1::zeros(3));
        for &c in &[1.0, 3.0] {
            let m = AffineAbsModel {
                offset: c,
                slope: e1(3),
            };
            assert_eq!(
                clipped_affine_abs_prox(&m, 0.0, &a),
                affine_abs_prox(&m, &a)
            );
        }
    }

    #[test]
    fn quadratic_abs_zero_residual_stays() {
        // (a'w)^2 = b exactly.
        let m = QuadraticAbsModel {
            direction: array![1.0, 1.0],
            target: 4.0,
        };
        let a = QuadraticAnchor::new(3.0, array![1.0, 1.0]);
        let u = quadratic_abs_prox(&m, &a);
        assert_eq!(u, a.center);
    }

    #[test]
    fn quadratic_abs_tie_picks_nonnegative() {
        // a=e1, b=1, w=0, λ=1: v=±1 tie at objective 0.5, rule picks +1.
        let m = QuadraticAbsModel {
            direction: e1(2),
            target: 1.0,
        };
        let a = QuadraticAnchor::new(1.0, Array1::zeros(2));
        let u = quadratic_abs_prox(&m, &a);
        assert_eq!(u, e1(2));
    }

    #[test]
    fn quadratic_abs_outside_branch() {
        // a=e1, b=4, w=3e1, λ=10: stationary point v=2.5 beats breakpoints.
        let m = QuadraticAbsModel {
            direction: e1(1),
            target: 4.0,
        };
        let a = QuadraticAnchor::new(10.0, array![3.0]);
        let u = quadratic_abs_prox(&m, &a);
        assert!((u[0] - 2.5).abs() < 1e-12, "got {}", u[0]);
    }

    #[test]
    fn bilinear_zero_residual_stays() {
        let m = BilinearAbsModel {
            left: array![1.0, 0.0],
            right: array![0.0, 2.0],
            target: 6.0,
        };
        let ax = QuadraticAnchor::new(1.0, array![3.0, 9.0]);
        let ay = QuadraticAnchor::new(1.0, array![7.0, 1.0]);
        let sol = bilinear_abs_prox(&m, &ax, &ay);
        assert_eq!(sol.x, ax.center);
        assert_eq!(sol.y, ay.center);
        assert!(!sol.scan_fallback);
    }

    #[test]
    fn bilinear_scalar_case() {
        // ℓ=r=1, b=1, w=(2,2), λ=1: minimizer (1,1), objective 1.
        let m = BilinearAbsModel {
            left: array![1.0],
            right: array![1.0],
            target: 1.0,
        };
        let ax = QuadraticAnchor::new(1.0, array![2.0]);
        let ay = QuadraticAnchor::new(1.0, array![2.0]);
        let sol = bilinear_abs_prox(&m, &ax, &ay);
        assert!((sol.x[0] - 1.0).abs() < 1e-9, "x = {}", sol.x[0]);
        assert!((sol.y[0] - 1.0).abs() < 1e-9, "y = {}", sol.y[0]);
    }

    #[test]
    fn bilinear_zero_target() {
        // b=0, wx=0, wy=1: p*=0 with zero objective and x*=wx.
        let m = BilinearAbsModel {
            left: array![1.0],
            right: array![1.0],
            target: 0.0,
        };
        let ax = QuadraticAnchor::new(1.0, array![0.0]);
        let ay = QuadraticAnchor::new(1.0, array![1.0]);
        let sol = bilinear_abs_prox(&m, &ax, &ay);
        assert_eq!(sol.x[0], 0.0);
        assert_eq!(sol.y[0], 1.0);
    }

    #[test]
    fn soft_threshold_cases() {
        assert_eq!(soft_threshold(&array![2.0], 0.5)[0], 1.5);
        assert_eq!(soft_threshold(&array![-0.3], 0.5)[0], 0.0);
        let v = array![0.7, -2.0, 0.0];
        assert_eq!(soft_threshold(&v, 0.0), v);
    }

    #[test]
    fn anchor_composition_matches_manual() {
        let a = QuadraticAnchor::new(2.0, array![1.0, 0.0]);
        let b = QuadraticAnchor::new(0.5, array![0.0, 4.0]);
        let c = a.compose(&b);
        assert_eq!(c.weight, 2.5);
        assert_eq!(c.center, array![0.8, 0.8]);
    }

    #[test]
    fn linear_step_is_gradient_step() {
        let m = StepModel::Linear(AffineAbsModel {
            offset: 100.0,
            slope: array![1.0, -2.0],
        });
        let base = array![0.0, 0.0];
        let anchor = QuadraticAnchor::new(4.0, base.clone());
        let u = anchored_step(&m, &base, &anchor);
        assert_eq!(u, array![-0.25, 0.5]);
    }
}
