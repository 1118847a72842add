//! Seeded generators of random polynomials, sections and forms, for fuzzing
//! identities over the fixtures.

use std::sync::Arc;

use rand::Rng;

use crate::algebroid::{Section, VectorAlgebroid};
use crate::calculus::{increasing, KForm};
use crate::symkernel::Expr;

/// Sum of up to `terms` monomials of total degree ≤ `max_deg` in `vars`,
/// with integer coefficients in `-3..=3`.
pub fn poly<R: Rng>(rng: &mut R, vars: &[String], max_deg: u32, terms: usize) -> Expr {
    Expr::add_all((0..terms).map(|_| {
        let c = Expr::int(rng.gen_range(-3..=3));
        let mut factors = vec![c];
        if !vars.is_empty() {
            let deg = rng.gen_range(0..=max_deg);
            for _ in 0..deg {
                factors.push(Expr::var(&vars[rng.gen_range(0..vars.len())]));
            }
        }
        Expr::mul_all(factors)
    }))
}

/// Section with polynomial coefficients in the algebroid's chart.
pub fn section<R: Rng>(rng: &mut R, alg: &Arc<VectorAlgebroid>) -> Section {
    let vars = alg.chart().names().to_vec();
    let coeffs = (0..alg.rank()).map(|_| poly(rng, &vars, 2, 3)).collect();
    Section::new(alg, coeffs).expect("rank matches")
}

/// Degree-`k` form with polynomial coefficients on about half of the
/// increasing multi-indices (at least one).
pub fn form<R: Rng>(rng: &mut R, alg: &Arc<VectorAlgebroid>, k: usize) -> KForm {
    let vars = alg.chart().names().to_vec();
    let idx = increasing(alg.rank(), k);
    let pick = rng.gen_range(0..idx.len().max(1));
    let mut terms = Vec::new();
    for (j, i) in idx.into_iter().enumerate() {
        if j == pick || rng.gen_bool(0.5) {
            terms.push((i, poly(rng, &vars, 2, 3)));
        }
    }
    KForm::from_terms(alg, k, terms)
}
