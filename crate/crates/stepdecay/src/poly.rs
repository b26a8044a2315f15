//! Real roots of low-degree polynomials.
//!
//! Quartics are solved by splitting the line at the critical points (roots of
//! the derivative cubic) and running safeguarded bisection/Newton on each
//! monotone piece. This finds every sign-crossing root; even-multiplicity
//! roots are recovered by checking the critical points themselves.

/// Refinement tolerance for root polishing, relative to the coefficient scale.
pub const ROOT_TOL: f64 = 1e-12;

const MAX_BISECT: usize = 200;

/// Roots of `c1*x + c0 = 0`.
fn linear_roots(c1: f64, c0: f64) -> Vec<f64> {
    if c1 == 0.0 {
        Vec::new()
    } else {
        vec![-c0 / c1]
    }
}

/// Real roots of `c2*x^2 + c1*x + c0 = 0`, in increasing order.
pub fn quadratic_roots(c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    if c2 == 0.0 {
        return linear_roots(c1, c0);
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    // Citardauq form on one branch avoids cancellation.
    let q = -0.5 * (c1 + c1.signum() * sq);
    let mut roots = if q == 0.0 {
        vec![0.0, 0.0]
    } else {
        vec![q / c2, c0 / q]
    };
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots
}

/// Real roots of `c3*x^3 + c2*x^2 + c1*x + c0 = 0`, in increasing order.
pub fn cubic_roots(c3: f64, c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    if c3 == 0.0 {
        return quadratic_roots(c2, c1, c0);
    }
    // Depressed form t^3 + p t + q with x = t - b/3.
    let b = c2 / c3;
    let c = c1 / c3;
    let d = c0 / c3;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let shift = -b / 3.0;
    let disc = (q / 2.0) * (q / 2.0) + (p / 3.0) * (p / 3.0) * (p / 3.0);
    let mut roots = if disc > 0.0 {
        let sq = disc.sqrt();
        let u = (-q / 2.0 + sq).cbrt();
        let v = (-q / 2.0 - sq).cbrt();
        vec![u + v + shift]
    } else if p == 0.0 && q == 0.0 {
        vec![shift]
    } else {
        // Three real roots; trigonometric form.
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + shift)
            .collect()
    };
    let eval = |x: f64| ((c3 * x + c2) * x + c1) * x + c0;
    let deriv = |x: f64| (3.0 * c3 * x + 2.0 * c2) * x + c1;
    for r in roots.iter_mut() {
        *r = polish(*r, eval, deriv);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() <= ROOT_TOL * (1.0 + a.abs()));
    roots
}

/// Real roots of `c4*x^4 + c3*x^3 + c2*x^2 + c1*x + c0 = 0`, increasing,
/// deduplicated. Multiplicities are not reported.
pub fn quartic_roots(c4: f64, c3: f64, c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    if c4 == 0.0 {
        return cubic_roots(c3, c2, c1, c0);
    }
    // Normalize so the bracketing bound below is well scaled.
    let (a3, a2, a1, a0) = (c3 / c4, c2 / c4, c1 / c4, c0 / c4);
    let eval = |x: f64| (((x + a3) * x + a2) * x + a1) * x + a0;
    let deriv = |x: f64| ((4.0 * x + 3.0 * a3) * x + 2.0 * a2) * x + a1;

    // Cauchy bound: all real roots lie in [-bound, bound].
    let bound = 1.0 + a3.abs().max(a2.abs()).max(a1.abs()).max(a0.abs());

    let mut knots = vec![-bound];
    for r in cubic_roots(4.0, 3.0 * a3, 2.0 * a2, a1) {
        if r > -bound && r < bound {
            knots.push(r);
        }
    }
    knots.push(bound);
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let scale = 1.0 + a0.abs().max(a1.abs()).max(a2.abs()).max(a3.abs());
    let mut roots = Vec::new();
    // Tangential (even-multiplicity) roots sit at critical points.
    for &k in knots.iter().skip(1).take(knots.len().saturating_sub(2)) {
        if eval(k).abs() <= ROOT_TOL * scale {
            roots.push(k);
        }
    }
    for pair in knots.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let (flo, fhi) = (eval(lo), eval(hi));
        if flo == 0.0 {
            roots.push(lo);
            continue;
        }
        if flo * fhi < 0.0 {
            let r = bisect(lo, hi, eval);
            roots.push(polish(r, eval, deriv));
        }
    }
    let fhi = eval(bound);
    if fhi == 0.0 {
        roots.push(bound);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * (1.0 + a.abs()));
    roots
}

/// Bracketed bisection; assumes a sign change on `[lo, hi]`.
fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..MAX_BISECT {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    0.5 * (lo + hi)
}

/// A few Newton steps, rejected if they wander.
fn polish(x0: f64, f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> f64 {
    let mut x = x0;
    for _ in 0..8 {
        let fx = f(x);
        let dx = df(x);
        if dx == 0.0 {
            break;
        }
        let step = fx / dx;
        if !step.is_finite() || step.abs() > 1.0 + x.abs() {
            break;
        }
        x -= step;
        if step.abs() <= f64::EPSILON * (1.0 + x.abs()) {
            break;
        }
    }
    if f(x).abs() <= f(x0).abs() {
        x
    } else {
        x0
    }
}
