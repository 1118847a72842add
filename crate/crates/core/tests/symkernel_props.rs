use affine_algebroid::symkernel::{parse, parse_in, Chart, Expr, Func, Rational, Zeroness, ZeroTest};
use proptest::prelude::*;

const VARS: [&str; 3] = ["x", "y", "z"];

/// Raw (unsimplified) polynomial/trig trees of bounded depth.
fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-5i64..=5, 1i64..=4).prop_map(|(n, d)| Expr::ratio(n, d)),
        (0usize..3).prop_map(|i| Expr::var(VARS[i])),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::raw_add),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::raw_mul),
            (inner.clone(), 0i64..=3).prop_map(|(b, k)| Expr::raw_pow(b, Rational::from_integer(k))),
            inner.clone().prop_map(|a| Expr::raw_func(Func::Sin, a)),
            inner.clone().prop_map(|a| Expr::raw_func(Func::Cos, a)),
            inner.prop_map(|a| Expr::raw_mul(vec![Expr::int(-1), a])),
        ]
    })
}

fn arb_point() -> impl Strategy<Value = [f64; 3]> {
    [-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0]
}

fn at(e: &Expr, p: &[f64; 3]) -> f64 {
    e.eval_at(&[("x", p[0]), ("y", p[1]), ("z", p[2])]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn diff_matches_central_differences(e in arb_expr(), v in 0usize..3, pts in prop::collection::vec(arb_point(), 5)) {
        let d = e.diff(VARS[v]);
        let h = 1e-5;
        for p in &pts {
            let (mut hi, mut lo) = (*p, *p);
            hi[v] += h;
            lo[v] -= h;
            let fd = (at(&e, &hi) - at(&e, &lo)) / (2.0 * h);
            let exact = at(&d, p);
            prop_assert!((fd - exact).abs() <= 1e-5 * exact.abs().max(1.0), "{e} d/d{} = {d}: {exact} vs {fd}", VARS[v]);
        }
    }

    #[test]
    fn simplify_preserves_value(e in arb_expr(), p in arb_point()) {
        let a = at(&e, &p);
        let b = at(&e.simplify(), &p);
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "{e}: {a} vs {b}");
    }

    #[test]
    fn simplify_is_idempotent(e in arb_expr()) {
        let s = e.simplify();
        prop_assert_eq!(s.simplify(), s);
    }

    #[test]
    fn parse_print_preserves_evaluation(e in arb_expr(), p in arb_point()) {
        let text = e.to_string();
        let back = parse_in(&text, &VARS).unwrap();
        let (a, b) = (at(&e, &p), at(&back, &p));
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "{text}: {a} vs {b}");
        let s = e.simplify();
        let back = parse_in(&s.to_string(), &VARS).unwrap();
        prop_assert!((at(&s, &p) - at(&back, &p)).abs() <= 1e-10 * (1.0 + a.abs()));
    }
}

#[test]
fn spec_examples() {
    let chart = Chart::base(["t", "x", "y1"]).unwrap();
    assert!(parse("0", &chart).unwrap().is_literal_zero());
    let l = parse("y1^2/2 - x^2/2", &chart).unwrap();
    assert_eq!(l.eval_at(&[("x", 1.0), ("y1", 2.0)]).unwrap(), 1.5);

    let e = parse_in("sin(q)*p", &["q", "p"]).unwrap();
    let d = e.diff("q");
    let f = |q: f64| e.eval_at(&[("q", q), ("p", 1.7)]).unwrap();
    let fd = (f(0.3 + 1e-6) - f(0.3 - 1e-6)) / 2e-6;
    assert!((d.eval_at(&[("q", 0.3), ("p", 1.7)]).unwrap() - fd).abs() < 1e-8);
    assert_eq!(d.simplify(), parse_in("cos(q)*p", &["q", "p"]).unwrap().simplify());

    let e = parse_in("exp(2*t)*y", &["t", "y"]).unwrap();
    let d = e.diff("t").eval_at(&[("t", 0.1), ("y", 2.0)]).unwrap();
    assert!((d - 4.0 * 0.2f64.exp()).abs() < 1e-6);
    assert!((d - 4.8856).abs() < 1e-4);

    assert!(parse_in("x^2/2", &["x"]).unwrap().diff("x").simplify() == Expr::var("x"));
    assert!(Expr::int(7).diff("x").is_literal_zero());
}

#[test]
fn zero_test_examples() {
    let zt = ZeroTest::default();
    let vars = ["q", "x", "y"];
    assert_eq!(zt.check(&parse_in("sin(q)^2 + cos(q)^2 - 1", &vars).unwrap()), Zeroness::Zero);
    assert_eq!(zt.check(&parse_in("x - x", &vars).unwrap()), Zeroness::Zero);
    assert!(matches!(zt.check(&parse_in("x*y - 0.5", &vars).unwrap()), Zeroness::NonZero(Some(_))));
}

#[test]
fn parse_errors_locate_the_problem() {
    let chart = Chart::base(["x"]).unwrap();
    let err = parse("x + q", &chart).unwrap_err();
    assert_eq!(err.to_string(), "unknown identifier `q` at byte 4");
    assert!(parse("x +", &chart).is_err());
}
