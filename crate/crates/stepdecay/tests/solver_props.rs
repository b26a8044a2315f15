//! Solver-level properties: first-order optimality of the anchored steps
//! along real runs, feasibility under projection, exact prox-linear/clipped
//! iterate identity, schedule monotonicity, and ensemble soundness.

mod common;

use common::rand_vec;
use ndarray::Array1;
use rand::Rng;
use stepdecay::harness::{BlindOracle, PhaseOracle};
use stepdecay::problems::{
    sample_phase, unit_sphere, BlindInstance, ModelTag, PhaseInstance,
};
use stepdecay::prox::{anchored_step, QuadraticAnchor, StepModel};
use stepdecay::solvers::{ensemble_select, rmba, ModelOracle, Monitor, NoopMonitor, StageParams};
use stepdecay::stream::{StreamFactory, KSTAR, SAMPLES};

fn phase_instance(d: usize, p_fail: f64) -> PhaseInstance {
    let mut signal = Array1::zeros(d);
    signal[0] = 1.0;
    PhaseInstance::new(signal, p_fail, 10.0)
}

/// First-order optimality of the anchored step: at the returned point the
/// model subdifferential must contain `−λ(u − w)` to tolerance 1e−8.
fn check_first_order(model: &StepModel, basepoint: &Array1<f64>, anchor: &QuadraticAnchor) {
    let u = anchored_step(model, basepoint, anchor);
    let residual_vec: Array1<f64> = (&u - &anchor.center).mapv(|v| anchor.weight * v);
    match model {
        StepModel::AbsLinear(m) => {
            let margin = m.offset + m.slope.dot(&(&u - basepoint));
            let gsq = m.slope.dot(&m.slope);
            if margin.abs() > 1e-10 {
                // Smooth region: sign(margin)·g + λ(u − w) = 0.
                let err = (&m.slope.mapv(|g| margin.signum() * g) + &residual_vec)
                    .mapv(f64::abs)
                    .sum();
                assert!(err < 1e-8 * (1.0 + gsq), "abs-linear FOC error {err}");
            } else {
                // Kink: λ‖u − w‖ ≤ ‖g‖.
                assert!(
                    residual_vec.dot(&residual_vec).sqrt() <= gsq.sqrt() + 1e-8,
                    "kink condition violated"
                );
            }
        }
        StepModel::AbsQuadratic(m) => {
            let v = m.direction.dot(&u);
            let margin = v * v - m.target;
            if margin.abs() > 1e-10 {
                let grad = m.direction.mapv(|a| margin.signum() * 2.0 * v * a);
                let err = (&grad + &residual_vec).mapv(f64::abs).sum();
                assert!(err < 1e-7 * (1.0 + grad.dot(&grad)), "abs-quadratic FOC error {err}");
            } else {
                let gnorm = 2.0 * v.abs() * m.direction.dot(&m.direction).sqrt();
                assert!(residual_vec.dot(&residual_vec).sqrt() <= gnorm + 1e-8);
            }
        }
        _ => {}
    }
}

#[test]
fn anchored_steps_satisfy_first_order_conditions_along_a_run() {
    let inst = phase_instance(6, 0.2);
    let factory = StreamFactory::new(21);
    let mut rng = factory.stream(&[0]);
    for tag in [ModelTag::ProxLinear, ModelTag::ProxPoint] {
        let oracle = PhaseOracle::streaming(inst.clone(), tag);
        let mut y = rand_vec(6, 2.0, &mut rng);
        for step in 0..500 {
            let model = oracle.sample_model(&y, &mut rng);
            let alpha = 0.05 * 2f64.powi(-((step / 100) as i32));
            let anchor = QuadraticAnchor::new(1.0 / alpha, y.clone());
            check_first_order(&model, &y, &anchor);
            y = anchored_step(&model, &y, &anchor);
        }
    }
}

#[test]
fn prox_linear_and_clipped_produce_identical_iterates() {
    // Exact sequence equality over full restarted runs with shared seeds.
    for seed in 0..5u64 {
        let inst = phase_instance(10, 0.2);
        let factory = StreamFactory::new(100 + seed);

        struct Capture {
            points: Vec<Array1<f64>>,
        }
        impl Monitor for Capture {
            fn on_step(&mut self, _s: usize, _i: usize, _n: u64, p: &Array1<f64>) -> bool {
                self.points.push(p.clone());
                false
            }
            fn on_stage_end(&mut self, _p: &StageParams, _n: u64, point: &Array1<f64>) {
                self.points.push(point.clone());
            }
        }

        let run = |tag: ModelTag| {
            let oracle = PhaseOracle::streaming(inst.clone(), tag);
            let mut sample_rng = factory.stream(&[0, SAMPLES]);
            let mut kstar_rng = factory.stream(&[0, KSTAR]);
            let mut init_rng = factory.stream(&[0, stepdecay::stream::INIT]);
            let x0 = stepdecay::problems::random_init(&inst.signal, 0.25, &mut init_rng);
            let mut capture = Capture { points: Vec::new() };
            rmba(
                &oracle,
                x0,
                0.01,
                400,
                3,
                false,
                &mut sample_rng,
                &mut kstar_rng,
                &mut capture,
            );
            capture.points
        };
        let a = run(ModelTag::ProxLinear);
        let b = run(ModelTag::Clipped);
        assert_eq!(a.len(), b.len());
        for (pa, pb) in a.iter().zip(b.iter()) {
            assert_eq!(pa, pb, "iterate sequences diverged at seed {seed}");
        }
    }
}

#[test]
fn blind_iterates_stay_feasible() {
    let d = 4;
    let factory = StreamFactory::new(23);
    let mut truth_rng = factory.stream(&[0]);
    let left = unit_sphere(d, &mut truth_rng);
    let right = unit_sphere(d, &mut truth_rng);
    let inst = BlindInstance::new(left, right, 0.2, 10.0, 1.2);
    let radius = inst.feasible_radius();

    struct Feasible {
        d1: usize,
        radius: f64,
    }
    impl Monitor for Feasible {
        fn on_step(&mut self, _s: usize, _i: usize, _n: u64, p: &Array1<f64>) -> bool {
            let x = p.slice(ndarray::s![..self.d1]);
            let y = p.slice(ndarray::s![self.d1..]);
            assert!(x.dot(&x).sqrt() <= self.radius + 1e-9);
            assert!(y.dot(&y).sqrt() <= self.radius + 1e-9);
            false
        }
    }

    for tag in [
        ModelTag::Subgradient,
        ModelTag::ProxLinear,
        ModelTag::ProxPoint,
    ] {
        let oracle = BlindOracle::streaming(inst.clone(), tag);
        let mut sample_rng = factory.stream(&[1, SAMPLES]);
        let mut kstar_rng = factory.stream(&[1, KSTAR]);
        // Start outside the feasible set; the projection must clamp every
        // iterate back in.
        let x0 = Array1::from_elem(2 * d, 2.0 * radius);
        let mut monitor = Feasible { d1: d, radius };
        rmba(
            &oracle,
            x0,
            0.5,
            300,
            2,
            false,
            &mut sample_rng,
            &mut kstar_rng,
            &mut monitor,
        );
    }
}

#[test]
fn rmba_trace_reproducible_and_schedule_monotone() {
    let inst = phase_instance(5, 0.0);
    let factory = StreamFactory::new(24);

    struct Stages {
        alphas: Vec<f64>,
    }
    impl Monitor for Stages {
        fn on_stage_end(&mut self, p: &StageParams, _n: u64, _pt: &Array1<f64>) {
            self.alphas.push(p.alpha);
        }
    }

    let run = || {
        let oracle = PhaseOracle::streaming(inst.clone(), ModelTag::ProxLinear);
        let mut sample_rng = factory.stream(&[0, SAMPLES]);
        let mut kstar_rng = factory.stream(&[0, KSTAR]);
        let mut mon = Stages { alphas: Vec::new() };
        let out = rmba(
            &oracle,
            inst.signal.clone(),
            0.25,
            50,
            4,
            false,
            &mut sample_rng,
            &mut kstar_rng,
            &mut mon,
        );
        (out, mon.alphas)
    };
    let (a, alphas_a) = run();
    let (b, alphas_b) = run();
    assert_eq!(a, b);
    assert_eq!(alphas_a, alphas_b);
    for (t, alpha) in alphas_a.iter().enumerate() {
        assert_eq!(*alpha, 0.25 * 2f64.powi(-(t as i32)));
    }
}

#[test]
fn ensemble_is_sound_on_synthetic_clusters() {
    // Whenever a strict majority sits within ε of a common center, any
    // returned index lies within 3ε of that center.
    let factory = StreamFactory::new(25);
    let mut rng = factory.stream(&[0]);
    let eps = 0.05;
    for _ in 0..200 {
        let d = 3;
        let center = rand_vec(d, 2.0, &mut rng);
        let m = 9;
        let close = m / 2 + 1 + rng.random_range(0..(m / 2));
        let mut points = Vec::new();
        for i in 0..m {
            if i < close {
                let dir = common::rand_unit(d, &mut rng);
                let radius = eps * rng.random::<f64>();
                points.push(&center + &dir.mapv(|v| radius * v));
            } else {
                let dir = common::rand_unit(d, &mut rng);
                points.push(&center + &dir.mapv(|v| (10.0 + rng.random::<f64>()) * v));
            }
        }
        let index = ensemble_select(&points, eps).expect("majority exists");
        let delta = &points[index] - &center;
        assert!(delta.dot(&delta).sqrt() <= 3.0 * eps + 1e-12);
    }
}

#[test]
fn mba_is_deterministic_across_monitor_choices() {
    // Attaching a monitor must not change the sequence (it only observes).
    let inst = phase_instance(4, 0.1);
    let factory = StreamFactory::new(26);
    let oracle = PhaseOracle::streaming(inst.clone(), ModelTag::Subgradient);
    let run = |with_monitor: bool| {
        let mut sample_rng = factory.stream(&[0, SAMPLES]);
        let mut kstar_rng = factory.stream(&[0, KSTAR]);
        if with_monitor {
            struct Count(usize);
            impl Monitor for Count {
                fn on_step(&mut self, _s: usize, _i: usize, _n: u64, _p: &Array1<f64>) -> bool {
                    self.0 += 1;
                    false
                }
            }
            let mut m = Count(0);
            rmba(
                &oracle,
                inst.signal.clone(),
                0.1,
                30,
                2,
                false,
                &mut sample_rng,
                &mut kstar_rng,
                &mut m,
            )
        } else {
            rmba(
                &oracle,
                inst.signal.clone(),
                0.1,
                30,
                2,
                false,
                &mut sample_rng,
                &mut kstar_rng,
                &mut NoopMonitor,
            )
        }
    };
    assert_eq!(run(true), run(false));
}
