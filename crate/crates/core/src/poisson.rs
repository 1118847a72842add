//! The linear Poisson structure on the extended dual `E†`, in coordinates
//! `(x^i, μ_0, …, μ_n)`.

use std::sync::Arc;

use thiserror::Error;

use crate::algebroid::{combine, Section, VectorAlgebroid};
use crate::symkernel::{Chart, Expr, Role, SymError, ZeroTest, Zeroness};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PoissonError {
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("section belongs to a different algebroid")]
    Mismatch,
}

#[derive(Debug, Clone)]
pub struct PoissonTensor {
    algebroid: Arc<VectorAlgebroid>,
    chart: Chart,
    /// `table[A][B] = Λ^{AB} = {z_A, z_B}`
    table: Vec<Vec<Expr>>,
}

impl PoissonTensor {
    /// Momenta are named `mu0, mu1, …`.
    pub fn new(algebroid: &Arc<VectorAlgebroid>) -> Result<Self, PoissonError> {
        let names = (0..algebroid.rank()).map(|a| format!("mu{a}")).collect();
        Self::with_momenta(algebroid, names)
    }

    pub fn with_momenta(algebroid: &Arc<VectorAlgebroid>, momenta: Vec<String>) -> Result<Self, PoissonError> {
        assert_eq!(momenta.len(), algebroid.rank(), "one momentum per frame element");
        let base = algebroid.chart();
        let chart = base.extended(momenta.iter().map(|m| (m.clone(), Role::DualFiber)))?;
        let m = base.len();
        let n = algebroid.rank();
        let mut table = vec![vec![Expr::zero(); m + n]; m + n];
        for a in 0..n {
            for (i, row) in table.iter_mut().enumerate().take(m) {
                row[m + a] = -algebroid.anchor(i, a).clone();
            }
            for (i, slot) in table[m + a].iter_mut().enumerate().take(m) {
                *slot = algebroid.anchor(i, a).clone();
            }
            for b in 0..n {
                table[m + a][m + b] = Expr::add_all(
                    (0..n).map(|c| algebroid.structure(c, a, b) * Expr::var(&momenta[c])),
                );
            }
        }
        Ok(PoissonTensor { algebroid: algebroid.clone(), chart, table })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn momentum(&self, a: usize) -> Expr {
        self.chart.coordinate(self.algebroid.chart().len() + a)
    }

    /// `{z_A, z_B}`
    pub fn entry(&self, a: usize, b: usize) -> &Expr {
        &self.table[a][b]
    }

    /// `{F, G} = Λ^{AB} ∂F/∂z_A ∂G/∂z_B`
    pub fn bracket(&self, f: &Expr, g: &Expr) -> Result<Expr, PoissonError> {
        self.chart.covers(f)?;
        self.chart.covers(g)?;
        let df: Vec<Expr> = self.chart.names().iter().map(|z| f.diff(z)).collect();
        let dg: Vec<Expr> = self.chart.names().iter().map(|z| g.diff(z)).collect();
        let mut terms = Vec::new();
        for (a, fa) in df.iter().enumerate() {
            if fa.is_literal_zero() {
                continue;
            }
            for (b, gb) in dg.iter().enumerate() {
                if gb.is_literal_zero() || self.table[a][b].is_literal_zero() {
                    continue;
                }
                terms.push(&self.table[a][b] * fa * gb);
            }
        }
        Ok(Expr::add_all(terms))
    }

    /// `ζ̂ = ζ^a μ_a`
    pub fn linear_function(&self, zeta: &Section) -> Result<Expr, PoissonError> {
        if zeta.algebroid().as_ref() != self.algebroid.as_ref() {
            return Err(PoissonError::Mismatch);
        }
        Ok(Expr::add_all(zeta.coeffs().iter().enumerate().map(|(a, c)| c * self.momentum(a))))
    }

    /// Cyclic sums `{z_A,{z_B,z_C}} + cyclic` over all coordinate triples.
    pub fn jacobi(&self, zt: &ZeroTest) -> Zeroness {
        let k = self.chart.len();
        let z: Vec<Expr> = (0..k).map(|i| self.chart.coordinate(i)).collect();
        let br = |f: &Expr, g: &Expr| self.bracket(f, g).expect("chart functions");
        let mut checks = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                for c in b + 1..k {
                    let s = br(&z[a], &br(&z[b], &z[c])) + br(&z[b], &br(&z[c], &z[a])) + br(&z[c], &br(&z[a], &z[b]));
                    checks.push(zt.check(&s));
                }
            }
        }
        combine(checks.into_iter())
    }

    /// `∂Λ^{AB}/∂μ_0 = 0` for all `A, B`.
    pub fn mu0_independent(&self, zt: &ZeroTest) -> Zeroness {
        let mu0 = self.chart.name(self.algebroid.chart().len()).to_string();
        combine(self.table.iter().flatten().map(|e| zt.check(&e.diff(&mu0))))
    }
}
