use affine_algebroid::calculus::KForm;
use affine_algebroid::lagrangian::{CanonicalForms, Lagrangian};
use affine_algebroid::prolong::{Forces, ProlongedAlgebroid};
use affine_algebroid::symkernel::linalg;
use affine_algebroid::{fixtures, Expr, Section, ZeroTest};

fn zt() -> ZeroTest {
    ZeroTest::default()
}

fn v(n: &str) -> Expr {
    Expr::var(n)
}

fn free_particle() -> (ProlongedAlgebroid, Expr) {
    let (p, _) = fixtures::harmonic_oscillator();
    (p, Expr::powi(v("y1"), 2) / Expr::int(2))
}

fn regular() -> Vec<(ProlongedAlgebroid, Expr)> {
    vec![fixtures::harmonic_oscillator(), fixtures::euler_top_lagrangian(), free_particle()]
}

#[test]
fn gamma_annihilates_omega_and_satisfies_euler_lagrange() {
    for (p, l) in regular() {
        let lag = Lagrangian::new(&p, l.clone()).unwrap();
        let sode = lag.derive_sode(&zt()).unwrap();
        let gamma = sode.section().unwrap();
        assert!(p.is_pseudo_sode(&gamma, &zt()).unwrap().is_zero());

        let i_omega = lag.cartan_two_form().contract(&gamma).unwrap();
        assert!(i_omega.is_zero(&zt()).is_zero(), "{l}: {i_omega}");

        let theta = lag.cartan_one_form();
        let dl = KForm::function(p.algebroid(), l.clone()).d();
        let el = theta.lie_derive(&gamma).unwrap() - dl;
        assert!(el.is_zero(&zt()).is_zero(), "{l}: {el}");

        let pairing = theta.evaluate(&[gamma]).unwrap() - l.clone();
        assert!(zt().check(&pairing).is_zero());
        assert!(lag.cartan_two_form().d().is_zero(&zt()).is_zero());
    }
}

#[test]
fn euler_top_forces_match_euler_equations() {
    let (p, l) = fixtures::euler_top_lagrangian();
    let sode = Lagrangian::new(&p, l).unwrap().derive_sode(&zt()).unwrap();
    let Forces::Explicit(f) = &sode.forces else { panic!("constant Hessian") };
    // Oracle: I1 ẏ1 = (I2 − I3) y2 y3, cyclic.
    let i = fixtures::EULER_INERTIA.map(|k| k as f64);
    let pt = [0.3, -0.7, 0.45];
    let y = [("y1", pt[0]), ("y2", pt[1]), ("y3", pt[2])];
    let expect = [
        (i[1] - i[2]) / i[0] * pt[1] * pt[2],
        (i[2] - i[0]) / i[1] * pt[2] * pt[0],
        (i[0] - i[1]) / i[2] * pt[0] * pt[1],
    ];
    for k in 0..3 {
        assert!((f[k].eval_at(&y).unwrap() - expect[k]).abs() < 1e-15, "F{} = {}", k + 1, f[k]);
    }
    assert_eq!(f[0], -(v("y2") * v("y3")));
}

#[test]
fn oscillator_and_free_particle_forces() {
    let (p, l) = fixtures::harmonic_oscillator();
    let sode = Lagrangian::new(&p, l).unwrap().derive_sode(&zt()).unwrap();
    let Forces::Explicit(f) = &sode.forces else { panic!() };
    assert_eq!(f[0], -v("x"));
    let (p, l) = free_particle();
    let sode = Lagrangian::new(&p, l).unwrap().derive_sode(&zt()).unwrap();
    let Forces::Explicit(f) = &sode.forces else { panic!() };
    assert!(f[0].is_literal_zero());
}

#[test]
fn implicit_forces_annihilate_omega_pointwise() {
    // Hessian 1 + y², solved numerically per point.
    let (p, _) = fixtures::harmonic_oscillator();
    let y = v("y1");
    let l = Expr::powi(y.clone(), 2) / Expr::int(2) + Expr::powi(y, 4) / Expr::int(12) - Expr::powi(v("x"), 2) / Expr::int(2);
    let lag = Lagrangian::new(&p, l).unwrap();
    let sode = lag.derive_sode(&zt()).unwrap();
    let Forces::Implicit { hessian, rhs } = &sode.forces else { panic!("fibre-dependent Hessian") };
    let gamma = p.sode_section(&[v("F1")]);
    let i_omega = lag.cartan_two_form().contract(&gamma).unwrap();
    for pt in [[0.1, 0.4, -0.3], [0.0, -0.8, 0.9], [2.0, 0.25, 0.5]] {
        let at = [("t", pt[0]), ("x", pt[1]), ("y1", pt[2])];
        let g = vec![vec![hessian[0][0].eval_at(&at).unwrap()]];
        let b = vec![rhs[0].eval_at(&at).unwrap()];
        let f = linalg::solve_numeric(&g, &b).unwrap()[0];
        assert!((f - (-pt[1] / (1.0 + pt[2] * pt[2]))).abs() < 1e-14);
        let mut full = at.to_vec();
        full.push(("F1", f));
        for c in i_omega.terms().values() {
            assert!(c.eval_at(&full).unwrap().abs() < 1e-12, "{c}");
        }
    }
}

#[test]
fn cartan_form_examples() {
    let (p, _) = fixtures::harmonic_oscillator();
    let alg = p.algebroid();
    // L = y1 → Θ = θ^1 + y1 X^0 = X^1.
    let theta = Lagrangian::new(&p, v("y1")).unwrap().cartan_one_form();
    assert!((theta - KForm::basis(alg, p.x(1))).is_zero(&zt()).is_zero());
    // L = f(x) → Θ = f X^0, and Ω has no θ∧ψ (V-containing) component.
    let f = Expr::sin(v("x")) * v("t");
    let lag = Lagrangian::new(&p, f.clone()).unwrap();
    assert!((lag.cartan_one_form() - KForm::basis(alg, 0).scale(&f)).is_zero(&zt()).is_zero());
    assert!(lag.cartan_two_form().terms().keys().all(|k| !k.contains(&p.v(0))));
    // Oscillator: Ω = θ^1∧ψ^1 + x θ^1∧X^0, with ψ^1 = V^1.
    let (p, l) = fixtures::harmonic_oscillator();
    let alg = p.algebroid();
    let omega = Lagrangian::new(&p, l).unwrap().cartan_two_form();
    let theta1 = p.contact_form(0);
    let expect = theta1.wedge(&KForm::basis(alg, p.v(0))) + theta1.wedge(&KForm::basis(alg, 0)).scale(&v("x"));
    assert!((omega - expect).is_zero(&zt()).is_zero());
}

#[test]
fn legendre_map_and_pullbacks() {
    for (p, l) in regular() {
        let lag = Lagrangian::new(&p, l.clone()).unwrap();
        let fl = lag.legendre();
        // Affine approximation: Φ_0 + y^α Φ_α = L.
        let recon = Expr::add_all(
            std::iter::once(fl.phi[0].clone()).chain((0..p.fiber_dim()).map(|a| &fl.phi[a + 1] * p.y(a))),
        );
        assert!(zt().check(&(recon - l.clone())).is_zero());
        let c = CanonicalForms::new(p.source()).unwrap();
        assert!((fl.pullback(&c, &c.theta0) - lag.cartan_one_form()).is_zero(&zt()).is_zero());
        assert!((fl.pullback(&c, &c.omega0) - lag.cartan_two_form()).is_zero(&zt()).is_zero());
        assert!((c.omega0.clone() - c.omega0_displayed(p.source())).is_zero(&zt()).is_zero());
        assert!(c.omega0.d().is_zero(&zt()).is_zero());
    }
    // Oscillator components: (t, x, −y²/2 − x²/2, y).
    let (p, l) = fixtures::harmonic_oscillator();
    let fl = Lagrangian::new(&p, l).unwrap().legendre();
    let expect = -(Expr::powi(v("y1"), 2) / Expr::int(2)) - Expr::powi(v("x"), 2) / Expr::int(2);
    assert!(zt().check(&(fl.phi[0].clone() - expect)).is_zero());
    assert_eq!(fl.phi[1], v("y1"));
    // L = f(x) → (f, 0); L linear in y → μ0 is the y-free part.
    let fl = Lagrangian::new(&p, v("x") * v("t")).unwrap().legendre();
    assert_eq!(fl.phi[0], v("x") * v("t"));
    assert!(fl.phi[1].is_literal_zero());
    let fl = Lagrangian::new(&p, Expr::int(3) * v("y1") + v("x")).unwrap().legendre();
    assert_eq!(fl.phi[0], v("x"));
}

#[test]
fn canonical_omega_on_fixtures() {
    // Canonical J1: structure terms vanish, ω0 = Σ X^a ∧ P^a.
    let a = fixtures::canonical_j1();
    let c = CanonicalForms::new(&a).unwrap();
    let n = 2;
    let expect = KForm::from_terms(&c.algebroid, 2, (0..n).map(|k| (vec![k, n + k], Expr::one())));
    assert!((c.omega0.clone() - expect).is_literal_zero());
    // Euler top: the X^1∧X^2 coefficient is μ3.
    let a = fixtures::euler_top();
    let c = CanonicalForms::new(&a).unwrap();
    assert_eq!(c.omega0.coeff(&[1, 2]), v("mu3"));
    assert!(CanonicalForms::new(&fixtures::broken_jacobi()).is_err());
}

#[test]
fn singular_lagrangian_reports_a_point() {
    let (p, _) = fixtures::harmonic_oscillator();
    let err = Lagrangian::new(&p, v("x") * v("y1")).unwrap().derive_sode(&zt()).unwrap_err();
    assert!(err.to_string().starts_with("singular Lagrangian"), "{err}");
}

#[test]
fn theta_annihilated_on_vertical_and_contact_directions() {
    // Contact parts vanish on any pseudo-SODE; S kills the V directions.
    let (p, l) = fixtures::euler_top_lagrangian();
    let lag = Lagrangian::new(&p, l.clone()).unwrap();
    let gamma = p.sode_section(&[v("a"), v("b"), v("c")]);
    let pairing = lag.cartan_one_form().evaluate(&[gamma]).unwrap();
    assert!(zt().check(&(pairing - l)).is_zero());
    let vert = Section::basis(p.algebroid(), p.v(0));
    assert!(lag.cartan_one_form().evaluate(&[vert]).unwrap().is_literal_zero());
}
