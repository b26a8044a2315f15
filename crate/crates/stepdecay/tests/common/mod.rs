//! Brute-force grid oracles for the anchored subproblems, independent of
//! the closed forms they check. Each oracle evaluates the true objective on
//! a coarse grid with local refinement and returns the best value found;
//! the solvers must do at least as well.

#![allow(dead_code)]

use ndarray::Array1;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use stepdecay::prox::{AffineAbsModel, BilinearAbsModel, QuadraticAbsModel, QuadraticAnchor};

/// Coarse-to-fine 1-D grid minimization; returns `(argmin, min)`.
pub fn refine_min_1d(
    mut lo: f64,
    mut hi: f64,
    rounds: usize,
    n: usize,
    f: impl Fn(f64) -> f64,
) -> (f64, f64) {
    let mut best_x = lo;
    let mut best = f64::INFINITY;
    for _ in 0..rounds {
        let step = (hi - lo) / n as f64;
        for i in 0..=n {
            let x = lo + step * i as f64;
            let v = f(x);
            if v < best {
                best = v;
                best_x = x;
            }
        }
        lo = best_x - step;
        hi = best_x + step;
    }
    (best_x, best)
}

/// Coarse-to-fine 2-D grid minimization; returns `((p, q), min)`.
pub fn refine_min_2d(
    mut box_: [f64; 4],
    rounds: usize,
    n: usize,
    f: impl Fn(f64, f64) -> f64,
) -> ((f64, f64), f64) {
    let mut best_pq = (box_[0], box_[2]);
    let mut best = f64::INFINITY;
    for _ in 0..rounds {
        let sp = (box_[1] - box_[0]) / n as f64;
        let sq = (box_[3] - box_[2]) / n as f64;
        for i in 0..=n {
            let p = box_[0] + sp * i as f64;
            for j in 0..=n {
                let q = box_[2] + sq * j as f64;
                let v = f(p, q);
                if v < best {
                    best = v;
                    best_pq = (p, q);
                }
            }
        }
        box_ = [
            best_pq.0 - sp,
            best_pq.0 + sp,
            best_pq.1 - sq,
            best_pq.1 + sq,
        ];
    }
    (best_pq, best)
}

pub fn anchored_objective(model_value: f64, anchor: &QuadraticAnchor, u: &Array1<f64>) -> f64 {
    let delta = u - &anchor.center;
    model_value + 0.5 * anchor.weight * delta.dot(&delta)
}

/// Objective of the rebased absolute-affine subproblem at `u`.
pub fn affine_abs_objective(m: &AffineAbsModel, anchor: &QuadraticAnchor, u: &Array1<f64>) -> f64 {
    let delta = u - &anchor.center;
    anchored_objective((m.offset + m.slope.dot(&delta)).abs(), anchor, u)
}

pub fn clipped_objective(
    m: &AffineAbsModel,
    lower: f64,
    anchor: &QuadraticAnchor,
    u: &Array1<f64>,
) -> f64 {
    let delta = u - &anchor.center;
    anchored_objective((m.offset + m.slope.dot(&delta)).max(lower), anchor, u)
}

pub fn quadratic_abs_objective(
    m: &QuadraticAbsModel,
    anchor: &QuadraticAnchor,
    u: &Array1<f64>,
) -> f64 {
    let ip = m.direction.dot(u);
    anchored_objective((ip * ip - m.target).abs(), anchor, u)
}

pub fn bilinear_objective(
    m: &BilinearAbsModel,
    ax: &QuadraticAnchor,
    ay: &QuadraticAnchor,
    x: &Array1<f64>,
    y: &Array1<f64>,
) -> f64 {
    let p = m.left.dot(x);
    let q = m.right.dot(y);
    let dx = x - &ax.center;
    let dy = y - &ay.center;
    (p * q - m.target).abs()
        + 0.5 * ax.weight * dx.dot(&dx)
        + 0.5 * ay.weight * dy.dot(&dy)
}

/// Grid oracle for the absolute-affine prox: searches the slope line
/// `u = w − t·g`, `t ∈ [−5, 5]`, with refinement.
pub fn oracle_affine_abs(m: &AffineAbsModel, anchor: &QuadraticAnchor) -> f64 {
    let f = |t: f64| {
        let u = &anchor.center - &m.slope.mapv(|g| t * g);
        affine_abs_objective(m, anchor, &u)
    };
    refine_min_1d(-5.0, 5.0, 7, 2000, f).1
}

pub fn oracle_clipped(m: &AffineAbsModel, lower: f64, anchor: &QuadraticAnchor) -> f64 {
    let f = |t: f64| {
        let u = &anchor.center - &m.slope.mapv(|g| t * g);
        clipped_objective(m, lower, anchor, &u)
    };
    refine_min_1d(-5.0, 5.0, 7, 2000, f).1
}

/// Grid oracle for the absolute-quadratic prox: searches the scalar
/// `v = aᵀu` over a bracket covering the anchor value and the breakpoints,
/// evaluating the true objective at the least-movement lift of each `v`.
pub fn oracle_quadratic_abs(m: &QuadraticAbsModel, anchor: &QuadraticAnchor) -> f64 {
    let asq = m.direction.dot(&m.direction);
    let v0 = m.direction.dot(&anchor.center);
    let span = v0.abs() + m.target.abs().sqrt() + 3.0;
    let f = |v: f64| {
        let u = &anchor.center + &m.direction.mapv(|a| (v - v0) / asq * a);
        quadratic_abs_objective(m, anchor, &u)
    };
    refine_min_1d(-span, span, 7, 2000, f).1
}

/// Grid oracle for the absolute-bilinear prox: 2-D search over
/// `(p, q) = (⟨ℓ, x⟩, ⟨r, y⟩)` with least-movement lifts.
pub fn oracle_bilinear(
    m: &BilinearAbsModel,
    ax: &QuadraticAnchor,
    ay: &QuadraticAnchor,
) -> f64 {
    let lsq = m.left.dot(&m.left);
    let rsq = m.right.dot(&m.right);
    let p0 = m.left.dot(&ax.center);
    let q0 = m.right.dot(&ay.center);
    let span_p = p0.abs() + m.target.abs().sqrt() + 4.0;
    let span_q = q0.abs() + m.target.abs().sqrt() + 4.0;
    let f = |p: f64, q: f64| {
        let x = &ax.center + &m.left.mapv(|l| (p - p0) / lsq * l);
        let y = &ay.center + &m.right.mapv(|r| (q - q0) / rsq * r);
        bilinear_objective(m, ax, ay, &x, &y)
    };
    refine_min_2d([-span_p, span_p, -span_q, span_q], 5, 220, f).1
}

/// Grid oracle for coordinatewise shrinkage: independent 1-D minimizations
/// of `θ|u| + (1/2)(u − v)²`.
pub fn oracle_soft_threshold(v: &Array1<f64>, theta: f64) -> Array1<f64> {
    v.mapv(|vi| {
        let span = vi.abs() + theta + 1.0;
        let f = |u: f64| theta * u.abs() + 0.5 * (u - vi) * (u - vi);
        refine_min_1d(-span, span, 8, 2000, f).0
    })
}

/// Coarse-to-fine 1-D minimization with the refinement window clamped to
/// the original interval (for constrained searches).
pub fn refine_min_1d_clamped(
    bound_lo: f64,
    bound_hi: f64,
    rounds: usize,
    n: usize,
    f: impl Fn(f64) -> f64,
) -> (f64, f64) {
    let (mut lo, mut hi) = (bound_lo, bound_hi);
    let mut best_x = lo;
    let mut best = f64::INFINITY;
    for _ in 0..rounds {
        let step = (hi - lo) / n as f64;
        for i in 0..=n {
            let x = lo + step * i as f64;
            let v = f(x);
            if v < best {
                best = v;
                best_x = x;
            }
        }
        lo = (best_x - step).max(bound_lo);
        hi = (best_x + step).min(bound_hi);
    }
    (best_x, best)
}

/// Dense refined grid for the blind-deconvolution distance: both sign
/// branches of `α` plus endpoints, to an effective step below 1e−6.
pub fn oracle_dist_blind(
    x: &Array1<f64>,
    y: &Array1<f64>,
    xbar: &Array1<f64>,
    ybar: &Array1<f64>,
    nu: f64,
) -> f64 {
    let h = |alpha: f64| {
        let dx = x - &xbar.mapv(|v| alpha * v);
        let dy = y - &ybar.mapv(|v| v / alpha);
        (dx.dot(&dx) + dy.dot(&dy)).sqrt()
    };
    let mut best = f64::INFINITY;
    for sign in [1.0, -1.0] {
        let (lo, hi) = if sign > 0.0 {
            (1.0 / nu, nu)
        } else {
            (-nu, -1.0 / nu)
        };
        let (_, v) = refine_min_1d_clamped(lo, hi, 6, 4000, &h);
        best = best.min(v);
        best = best.min(h(lo)).min(h(hi));
    }
    best
}

pub fn rand_vec(d: usize, scale: f64, rng: &mut ChaCha8Rng) -> Array1<f64> {
    (0..d)
        .map(|_| (rng.random::<f64>() * 2.0 - 1.0) * scale)
        .collect()
}

pub fn rand_unit(d: usize, rng: &mut ChaCha8Rng) -> Array1<f64> {
    loop {
        let v = rand_vec(d, 1.0, rng);
        let n = v.dot(&v).sqrt();
        if n > 1e-6 {
            return v / n;
        }
    }
}
