use affine_algebroid::dynamics::{monitor, DynamicsError, Integrator, StepConfig, Trajectory};
use affine_algebroid::lagrangian::Lagrangian;
use affine_algebroid::prolong::ProlongedAlgebroid;
use affine_algebroid::{fixtures, Expr, ZeroTest};

fn v(n: &str) -> Expr {
    Expr::var(n)
}

fn integrator(p: &ProlongedAlgebroid, l: Expr) -> Integrator {
    let sode = Lagrangian::new(p, l).unwrap().derive_sode(&ZeroTest::default()).unwrap();
    Integrator::new(&sode).unwrap()
}

fn oscillator() -> Integrator {
    let (p, l) = fixtures::harmonic_oscillator();
    integrator(&p, l)
}

fn run(int: &Integrator, s0: &[f64], t1: f64, h: f64) -> Trajectory {
    int.integrate(s0, StepConfig { t0: 0.0, t1, h }).unwrap()
}

fn col(t: &Trajectory, name: &str) -> Vec<f64> {
    let j = t.names.iter().position(|n| n == name).unwrap();
    t.states.iter().map(|s| s[j]).collect()
}

#[test]
fn oscillator_endpoint_matches_cosine() {
    let int = oscillator();
    assert_eq!(int.names(), ["t", "x", "y1"]);
    let t = run(&int, &[0.0, 1.0, 0.0], 1.0, 1e-3);
    assert_eq!(t.times.len(), 1001);
    let x = *col(&t, "x").last().unwrap();
    assert!((x - 1f64.cos()).abs() <= 1e-6, "{x}");
    assert!((t.times.last().unwrap() - 1.0).abs() < 1e-12);
    assert!(t.adm_residual.iter().all(|r| *r <= 1e-12));
}

#[test]
fn step_halving_is_fourth_order() {
    // At h = 1e-3 the error is already at round-off, so coarser steps are used.
    let int = oscillator();
    let err = |h: f64| (col(&run(&int, &[0.0, 1.0, 0.0], 1.0, h), "x").last().unwrap() - 1f64.cos()).abs();
    let ratio = err(0.1) / err(0.05);
    assert!((12.0..=20.0).contains(&ratio), "{ratio}");
}

fn euler_rhs(y: [f64; 3], i: [f64; 3]) -> [f64; 3] {
    [
        (i[1] - i[2]) / i[0] * y[1] * y[2],
        (i[2] - i[0]) / i[1] * y[2] * y[0],
        (i[0] - i[1]) / i[2] * y[0] * y[1],
    ]
}

/// Hand-written RK4 on Euler's equations, independent of the symbolic pipeline.
fn euler_reference(y0: [f64; 3], t1: f64, h: f64) -> [f64; 3] {
    let i = fixtures::EULER_INERTIA.map(|k| k as f64);
    let steps = (t1 / h).round() as usize;
    let mut y = y0;
    let add = |a: [f64; 3], b: [f64; 3], s: f64| [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]];
    for _ in 0..steps {
        let k1 = euler_rhs(y, i);
        let k2 = euler_rhs(add(y, k1, h / 2.0), i);
        let k3 = euler_rhs(add(y, k2, h / 2.0), i);
        let k4 = euler_rhs(add(y, k3, h), i);
        for c in 0..3 {
            y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
    }
    y
}

#[test]
fn euler_top_conserves_energy_and_momentum() {
    let (p, l) = fixtures::euler_top_lagrangian();
    let int = integrator(&p, l);
    let t = run(&int, &[1.0, 1.0, 1.0], 5.0, 1e-3);
    let i = fixtures::EULER_INERTIA.map(|k| k as f64);
    let energy = |y: &[f64]| 0.5 * (0..3).map(|a| i[a] * y[a] * y[a]).sum::<f64>();
    let m2 = |y: &[f64]| (0..3).map(|a| (i[a] * y[a]).powi(2)).sum::<f64>();
    let (e0, m0) = (energy(&t.states[0]), m2(&t.states[0]));
    for s in &t.states {
        assert!(((energy(s) - e0) / e0).abs() <= 1e-8);
        assert!(((m2(s) - m0) / m0).abs() <= 1e-8);
    }
    let reference = euler_reference([1.0, 1.0, 1.0], 5.0, 1e-4);
    let end = t.states.last().unwrap();
    for c in 0..3 {
        assert!((end[c] - reference[c]).abs() < 1e-9, "{c}: {} vs {}", end[c], reference[c]);
    }
    for r in [energy(&reference), m2(&reference)].iter().zip([e0, m0]) {
        assert!(((r.0 - r.1) / r.1).abs() <= 1e-8);
    }
}

#[test]
fn free_particle_moves_linearly() {
    let (p, _) = fixtures::harmonic_oscillator();
    let l = Expr::powi(v("y1"), 2) / Expr::int(2);
    let int = integrator(&p, l.clone());
    let t = run(&int, &[0.0, 0.0, 1.0], 2.0, 0.01);
    for (tt, x) in t.times.iter().zip(col(&t, "x")) {
        assert!((x - tt).abs() < 1e-12);
    }
    let table = monitor(&t, &[("L".into(), l)]).unwrap();
    assert!(table.column(0).all(|c| (c.unwrap() - 0.5).abs() < 1e-15));
}

#[test]
fn oscillator_monitors() {
    let int = oscillator();
    let t = run(&int, &[0.0, 1.0, 0.0], 1.0, 1e-3);
    let (p, _) = fixtures::harmonic_oscillator();
    // θ = e^0 paired with the admissible point: ⟨e^0, X0 + y X1⟩.
    let (hat, _) = p.split_form(&affine_algebroid::KForm::basis(p.source().vector(), 0)).unwrap();
    let invariant = Expr::powi(v("x"), 2) + Expr::powi(v("y1"), 2);
    let table = monitor(&t, &[("r2".into(), invariant), ("theta_hat".into(), hat), ("sqrt_x".into(), Expr::sqrt(v("x")))]).unwrap();
    assert!(table.column(0).all(|c| (c.unwrap() - 1.0).abs() < 1e-8));
    assert!(table.column(1).all(|c| c == Some(1.0)));
    // x stays positive on [0,1], so no monitor failures.
    assert!(table.failures.is_empty());
    let long = run(&int, &[0.0, 1.0, 0.0], 3.0, 1e-2);
    let table = monitor(&long, &[("log_x".into(), Expr::log(v("x")))]).unwrap();
    let first_bad = table.failures.first().unwrap().node;
    assert!(long.times[first_bad] > std::f64::consts::FRAC_PI_2 - 0.02);
    assert!(table.column(0).nth(first_bad).unwrap().is_none());
}

#[test]
fn domain_error_aborts_with_partial_trajectory() {
    let (p, _) = fixtures::harmonic_oscillator();
    // F = −1/√x pulls x through zero, where √x leaves its domain.
    let l = Expr::powi(v("y1"), 2) / Expr::int(2) - Expr::int(2) * Expr::sqrt(v("x"));
    let int = integrator(&p, l);
    match int.integrate(&[0.0, 1.0, 0.0], StepConfig { t0: 0.0, t1: 5.0, h: 1e-2 }) {
        Err(DynamicsError::Aborted { node, partial, .. }) => {
            assert!(!partial.times.is_empty() && partial.times.len() <= node + 1);
            assert!(partial.states.iter().flatten().all(|x| x.is_finite()));
        }
        other => panic!("{:?}", other.map(|t| t.times.len())),
    }
}

#[test]
fn invalid_step_configs_are_rejected() {
    let int = oscillator();
    for cfg in [StepConfig { t0: 0.0, t1: 1.0, h: 0.0 }, StepConfig { t0: 1.0, t1: 0.0, h: 0.1 }] {
        assert!(matches!(int.integrate(&[0.0, 1.0, 0.0], cfg), Err(DynamicsError::Config(_))));
    }
    assert_eq!(StepConfig { t0: 0.0, t1: 1.0, h: 0.1 }.nodes().unwrap(), 11);
    assert_eq!(StepConfig { t0: 0.0, t1: 1.0, h: 0.3 }.nodes().unwrap(), 4);
}
