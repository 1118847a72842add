//! Reference algebroids and Lagrangians used by tests, benchmarks and the CLI.

use crate::algebroid::AffineAlgebroid;
use crate::prolong::ProlongedAlgebroid;
use crate::symkernel::{Chart, Expr};

fn v(name: &str) -> Expr {
    Expr::var(name)
}

/// `J¹(R × R) → R × R` with base `(t, x)`, fibre `y1`,
/// `ρ(e0) = ∂_t`, `ρ(e1) = ∂_x` and vanishing brackets.
pub fn canonical_j1() -> AffineAlgebroid {
    AffineAlgebroid::new(
        Chart::base(["t", "x"]).unwrap(),
        vec!["y1".into()],
        vec![Expr::one(), Expr::zero()],
        vec![vec![Expr::zero()], vec![Expr::one()]],
        vec![],
        vec![],
    )
    .unwrap()
}

/// `so(3)` over a point: `[e_α, e_β] = ε_{αβγ} e_γ`, `e0` central.
pub fn euler_top() -> AffineAlgebroid {
    AffineAlgebroid::new(
        Chart::empty(),
        vec!["y1".into(), "y2".into(), "y3".into()],
        vec![],
        vec![],
        vec![],
        vec![(2, 0, 1, Expr::one()), (0, 1, 2, Expr::one()), (1, 0, 2, Expr::int(-1))],
    )
    .unwrap()
}

/// A two-dimensional nonabelian Lie algebra `[e1, e2] = e2` over a point,
/// extended by the derivation `[e0, e1] = e2`, `[e0, e2] = 2 e2`.
pub fn affine_lie_algebra_point() -> AffineAlgebroid {
    AffineAlgebroid::new(
        Chart::empty(),
        vec!["y1".into(), "y2".into()],
        vec![],
        vec![],
        vec![(1, 0, Expr::one()), (1, 1, Expr::int(2))],
        vec![(1, 0, 1, Expr::one())],
    )
    .unwrap()
}

/// Fibre dimension zero: a single vector field `X0 = −x2 ∂_{x1} + x1 ∂_{x2}`.
pub fn trivial_vectorfield() -> AffineAlgebroid {
    AffineAlgebroid::new(
        Chart::base(["x1", "x2"]).unwrap(),
        vec![],
        vec![-v("x2"), v("x1")],
        vec![vec![], vec![]],
        vec![],
        vec![],
    )
    .unwrap()
}

/// Jet-like anchor on `(t, x1, x2)` with `[e1, e2] = x1 e1`. The bracket is
/// not compatible with the anchor, so `d²x1 ≠ 0`.
pub fn broken_jacobi() -> AffineAlgebroid {
    AffineAlgebroid::new(
        Chart::base(["t", "x1", "x2"]).unwrap(),
        vec!["y1".into(), "y2".into()],
        vec![Expr::one(), Expr::zero(), Expr::zero()],
        vec![
            vec![Expr::zero(), Expr::zero()],
            vec![Expr::one(), Expr::zero()],
            vec![Expr::zero(), Expr::one()],
        ],
        vec![],
        vec![(0, 0, 1, v("x1"))],
    )
    .unwrap()
}

/// The four fixtures expected to validate.
pub fn positive() -> Vec<AffineAlgebroid> {
    vec![canonical_j1(), euler_top(), affine_lie_algebra_point(), trivial_vectorfield()]
}

/// Principal moments of inertia of the reference top.
pub const EULER_INERTIA: [i64; 3] = [1, 2, 3];

/// `L = y1²/2 − x²/2` on [`canonical_j1`].
pub fn harmonic_oscillator() -> (ProlongedAlgebroid, Expr) {
    let p = ProlongedAlgebroid::new_unchecked(&canonical_j1());
    let l = Expr::powi(v("y1"), 2) / Expr::int(2) - Expr::powi(v("x"), 2) / Expr::int(2);
    (p, l)
}

/// `L = ½ Σ I_α (y^α)²` on [`euler_top`].
pub fn euler_top_lagrangian() -> (ProlongedAlgebroid, Expr) {
    let p = ProlongedAlgebroid::new_unchecked(&euler_top());
    let l = Expr::add_all(
        EULER_INERTIA.iter().enumerate().map(|(k, i)| Expr::ratio(*i, 2) * Expr::powi(v(&format!("y{}", k + 1)), 2)),
    );
    (p, l)
}
