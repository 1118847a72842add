use std::sync::Arc;

use affine_algebroid::algebroid::{Axiom, Status, ValidateOptions};
use affine_algebroid::calculus::KForm;
use affine_algebroid::poisson::PoissonTensor;
use affine_algebroid::{fixtures, random, AffineAlgebroid, Expr, Section, VectorAlgebroid, ZeroTest};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn zt() -> ZeroTest {
    ZeroTest::default()
}

fn fixture(k: usize) -> AffineAlgebroid {
    fixtures::positive().swap_remove(k)
}

fn zero_section(s: &Section) -> bool {
    s.is_zero(&zt()).is_zero()
}

fn zero_form(w: &KForm) -> bool {
    w.is_zero(&zt()).is_zero()
}

fn vars(v: &Arc<VectorAlgebroid>) -> Vec<String> {
    v.chart().names().to_vec()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn frame_brackets_are_skew(k in 0usize..4) {
        let a = fixture(k);
        let n = a.vector().rank();
        for i in 0..n {
            for j in 0..n {
                let s = a.e(i).bracket(&a.e(j)).unwrap() + a.e(j).bracket(&a.e(i)).unwrap();
                prop_assert!(zero_section(&s));
            }
        }
    }

    #[test]
    fn bracket_leibniz(k in 0usize..4, seed in any::<u64>()) {
        let a = fixture(k);
        let v = a.vector();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z1 = random::section(&mut rng, v);
        let z2 = random::section(&mut rng, v);
        let f = random::poly(&mut rng, &vars(v), 2, 3);
        let lhs = z1.bracket(&z2.scale(&f)).unwrap()
            - z1.bracket(&z2).unwrap().scale(&f)
            - z2.scale(&z1.anchor_apply(&f));
        prop_assert!(zero_section(&lhs));
    }

    #[test]
    fn d_is_an_antiderivation(k in 0usize..4, seed in any::<u64>(), p in 0usize..3, q in 0usize..2) {
        let a = fixture(k);
        let v = a.vector();
        prop_assume!(p + q < v.rank());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random::form(&mut rng, v, p);
        let e = random::form(&mut rng, v, q);
        let sign = if p % 2 == 0 { Expr::one() } else { Expr::int(-1) };
        let lhs = w.wedge(&e).d() - w.d().wedge(&e) - w.wedge(&e.d()).scale(&sign);
        prop_assert!(zero_form(&lhs));
    }

    #[test]
    fn d_squared_vanishes(k in 0usize..4, seed in any::<u64>(), p in 0usize..3) {
        let a = fixture(k);
        let v = a.vector();
        prop_assume!(p < v.rank());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert!(zero_form(&random::form(&mut rng, v, p).d().d()));
    }

    #[test]
    fn wedge_is_graded_commutative(k in 0usize..4, seed in any::<u64>(), p in 0usize..3, q in 0usize..3) {
        let a = fixture(k);
        let v = a.vector();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random::form(&mut rng, v, p.min(v.rank()));
        let e = random::form(&mut rng, v, q.min(v.rank()));
        let sign = if (w.degree() * e.degree()) % 2 == 0 { Expr::one() } else { Expr::int(-1) };
        prop_assert!(zero_form(&(w.wedge(&e) - e.wedge(&w).scale(&sign))));
    }

    #[test]
    fn double_contraction_vanishes(k in 0usize..4, seed in any::<u64>(), p in 2usize..4) {
        let a = fixture(k);
        let v = a.vector();
        prop_assume!(p <= v.rank());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random::form(&mut rng, v, p);
        let z = random::section(&mut rng, v);
        prop_assert!(zero_form(&w.contract(&z).unwrap().contract(&z).unwrap()));
    }

    #[test]
    fn lie_derivative_commutes_with_d(k in 0usize..4, seed in any::<u64>(), p in 0usize..2) {
        let a = fixture(k);
        let v = a.vector();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random::form(&mut rng, v, p.min(v.rank() - 1));
        let z = random::section(&mut rng, v);
        let lhs = w.lie_derive(&z).unwrap().d() - w.d().lie_derive(&z).unwrap();
        prop_assert!(zero_form(&lhs));
    }

    #[test]
    fn e0_ideal_is_differential(k in 0usize..4, seed in any::<u64>(), p in 0usize..2) {
        // d(e^0 ∧ η) = −e^0 ∧ dη stays in the ideal generated by e^0.
        let a = fixture(k);
        let v = a.vector();
        prop_assume!(p + 1 < v.rank());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = KForm::basis(v, 0).wedge(&random::form(&mut rng, v, p)).d();
        for (idx, c) in w.terms() {
            if !idx.contains(&0) {
                prop_assert!(zt().check(c).is_zero(), "{idx:?}: {c}");
            }
        }
    }

    #[test]
    fn poisson_homomorphism(k in 0usize..4, seed in any::<u64>()) {
        let a = fixture(k);
        let v = a.vector();
        let p = PoissonTensor::new(v).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z1 = random::section(&mut rng, v);
        let z2 = random::section(&mut rng, v);
        let lhs = p.linear_function(&z1.bracket(&z2).unwrap()).unwrap();
        let rhs = p.bracket(&p.linear_function(&z1).unwrap(), &p.linear_function(&z2).unwrap()).unwrap();
        prop_assert!(zt().check(&(lhs - rhs)).is_zero());
        // {ζ̂, f} = ρ(ζ)(f)
        let f = random::poly(&mut rng, &vars(v), 2, 3);
        let lhs = p.bracket(&p.linear_function(&z1).unwrap(), &f).unwrap();
        prop_assert!(zt().check(&(lhs - z1.anchor_apply(&f))).is_zero());
    }
}

#[test]
fn every_fixture_validates() {
    for a in fixtures::positive() {
        let r = a.validate(&ValidateOptions::default());
        assert!(r.all_pass(), "{r:?}");
        assert_eq!(a.vector().jacobi_by_brackets(&zt()), Status::Pass);
    }
}

#[test]
fn broken_fixture_witness_reproduces() {
    let a = fixtures::broken_jacobi();
    let r = a.validate(&ValidateOptions::default());
    let j = r.get(Axiom::Jacobi).unwrap();
    assert_eq!(j.status, Status::Fail);
    // Oracle: d(dx1) = d(e^1) = −C^1_{12} e^1∧e^2 = −x1 e^1∧e^2.
    let w = j.witness.as_ref().unwrap();
    let x1 = w.point.iter().find(|(n, _)| n == "x1").unwrap().1;
    assert!((w.value - (-x1)).abs() < 1e-12);
}

#[test]
fn calculus_examples() {
    let a = fixtures::canonical_j1();
    let v = a.vector();
    assert_eq!(KForm::function(v, Expr::var("x")).d().coeff(&[1]), Expr::one());
    assert!(KForm::function(v, Expr::var("x")).d().coeff(&[0]).is_literal_zero());
    assert!(KForm::function(v, Expr::int(4)).d().is_literal_zero());
    for f in fixtures::positive() {
        assert!(KForm::basis(f.vector(), 0).d().is_literal_zero());
        assert!(KForm::basis(f.vector(), 0).lie_derive(&f.e(0)).unwrap().is_literal_zero());
        assert_eq!(KForm::basis(f.vector(), 0).contract(&f.e(0)).unwrap().coeff(&[]), Expr::one());
    }
    // (x e^0) ∧ (y1 e^1) = x y1 e^0∧e^1, with y1 a parameter.
    let w = KForm::basis(v, 0).scale(&Expr::var("x")).wedge(&KForm::basis(v, 1).scale(&Expr::var("y1")));
    assert_eq!(w.coeff(&[0, 1]), Expr::var("x") * Expr::var("y1"));
    assert_eq!(w.coeff(&[1, 0]), -(Expr::var("x") * Expr::var("y1")));
    // contract(e0 + y1 e1, e^1 − y1 e^0) = 0
    let y = Expr::var("y1");
    let z = a.section(vec![Expr::one(), y.clone()]).unwrap();
    let theta = KForm::basis(v, 1) - KForm::basis(v, 0).scale(&y);
    assert!(theta.contract(&z).unwrap().coeff(&[]).is_literal_zero());
    // L_{e1}(x e^0) by brute force: i_{e1} d(x e^0) + d(i_{e1}(x e^0)) = i_{e1}(e^1∧e^0) + 0 = e^0.
    let l = KForm::basis(v, 0).scale(&Expr::var("x")).lie_derive(&a.e(1)).unwrap();
    assert_eq!(l.coeff(&[0]), Expr::one());
    assert_eq!(l.terms().len(), 1);
}

#[test]
fn poisson_suite() {
    for a in fixtures::positive() {
        let v = a.vector();
        let p = PoissonTensor::new(v).unwrap();
        let m = a.base().len();
        let n = a.fiber_dim();
        let mu = |k: usize| Expr::var(&format!("mu{k}"));
        for i in 0..m {
            for j in 0..m {
                assert!(p.bracket(&a.base().coordinate(i), &a.base().coordinate(j)).unwrap().is_literal_zero());
            }
            for al in 0..n {
                assert_eq!(p.bracket(&mu(al + 1), &a.base().coordinate(i)).unwrap(), *a.rho(i, al));
            }
        }
        for b in 0..n {
            let expect = Expr::add_all((0..n).map(|g| a.c0(g, b) * mu(g + 1)));
            assert!(zt().check(&(p.bracket(&mu(0), &mu(b + 1)).unwrap() - expect)).is_zero());
            for al in 0..n {
                let expect = Expr::add_all((0..n).map(|g| a.c(g, al, b) * mu(g + 1)));
                assert!(zt().check(&(p.bracket(&mu(al + 1), &mu(b + 1)).unwrap() - expect)).is_zero());
            }
        }
        assert!(p.jacobi(&zt()).is_zero());
        assert!(p.mu0_independent(&zt()).is_zero());
        assert!(p.linear_function(&a.e(0)).unwrap() == mu(0));
        assert!(p.linear_function(&Section::zero(v)).unwrap().is_literal_zero());
    }
}
