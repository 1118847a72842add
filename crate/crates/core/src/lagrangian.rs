//! Lagrangian mechanics on the prolongation: Cartan forms, the Lagrangian
//! pseudo-SODE and the Legendre map into the extended dual.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebroid::{AffineAlgebroid, Section, VectorAlgebroid};
use crate::calculus::{increasing, Coframe, KForm, SINGULAR_DET};
use crate::prolong::{prolong_vector, Forces, ProlongedAlgebroid, PseudoSode};
use crate::symkernel::{linalg, Expr, Role, SymError, ZeroTest};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LagrangianError {
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("singular Lagrangian: Hessian determinant {det:e} at {point:?}")]
    Singular { point: Vec<(String, f64)>, det: f64 },
    #[error("Hessian could not be evaluated at any sample point")]
    Unevaluable,
    #[error("source algebroid does not validate")]
    InvalidSource,
}

#[derive(Debug, Clone)]
pub struct Lagrangian {
    prolonged: ProlongedAlgebroid,
    expr: Expr,
}

impl Lagrangian {
    /// `expr` must be a function of the base and fibre coordinates.
    pub fn new(prolonged: &ProlongedAlgebroid, expr: Expr) -> Result<Self, LagrangianError> {
        let expr = expr.simplify();
        prolonged.algebroid().chart().covers(&expr)?;
        Ok(Lagrangian { prolonged: prolonged.clone(), expr })
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn prolonged(&self) -> &ProlongedAlgebroid {
        &self.prolonged
    }

    fn alg(&self) -> &Arc<VectorAlgebroid> {
        self.prolonged.algebroid()
    }

    fn n(&self) -> usize {
        self.prolonged.fiber_dim()
    }

    fn dl_dy(&self, alpha: usize) -> Expr {
        self.expr.diff(&self.prolonged.source().fiber()[alpha])
    }

    /// `Θ_L = ∂L/∂y^α θ^α + L X^0`
    pub fn cartan_one_form(&self) -> KForm {
        let mut theta = KForm::basis(self.alg(), 0).scale(&self.expr);
        for al in 0..self.n() {
            theta = theta + self.prolonged.contact_form(al).scale(&self.dl_dy(al));
        }
        theta
    }

    /// `Θ_L = dL∘S + L X^0`, assembled from `S` frame element by frame element.
    pub fn cartan_one_form_via_endomorphism(&self) -> KForm {
        let alg = self.alg();
        let dl = KForm::function(alg, self.expr.clone()).d();
        let mut terms = Vec::new();
        for b in 0..alg.rank() {
            let s = self.prolonged.vertical_endomorphism(&Section::basis(alg, b)).expect("own frame");
            terms.push((vec![b], dl.evaluate(&[s]).expect("1-form on one section")));
        }
        terms.push((vec![0], self.expr.clone()));
        KForm::from_terms(alg, 1, terms)
    }

    /// `Ω_L = −dΘ_L`
    pub fn cartan_two_form(&self) -> KForm {
        -self.cartan_one_form().d()
    }

    /// `Ω_L` assembled from its closed-form coefficients in the coframe
    /// `{X^0, θ^α, ψ^α = V^α}` dual to `{Γ_0, X_α, V_α}`, where `Γ_0` is the
    /// pseudo-SODE with zero force.
    pub fn cartan_two_form_displayed(&self) -> KForm {
        let p = &self.prolonged;
        let a = p.source();
        let alg = self.alg();
        let n = self.n();
        let base = a.base();
        let zeros = vec![Expr::zero(); n];
        let gamma0 = p.sode_section(&zeros);
        let dl: Vec<Expr> = (0..n).map(|al| self.dl_dy(al)).collect();

        // Coframe rows: X^0, θ^α, ψ^α.
        let size = alg.rank();
        let mut rows = Vec::with_capacity(size);
        rows.push(unit(size, 0));
        for al in 0..n {
            let mut r = unit(size, p.x(al + 1));
            r[0] = -p.y(al);
            rows.push(r);
        }
        for al in 0..n {
            rows.push(unit(size, p.v(al)));
        }
        let cf = Coframe::new(alg, rows, &ZeroTest::default()).expect("unipotent coframe");
        let theta = |al: usize| 1 + al;
        let psi = |al: usize| 1 + n + al;

        let mut coeffs = Vec::new();
        for al in 0..n {
            let mut t = vec![gamma0.anchor_apply(&dl[al])];
            t.extend((0..n).map(|g| -(&dl[g] * p.c_mixed(g, al))));
            t.extend((0..base.len()).map(|i| -(a.rho(i, al) * self.expr.diff(base.name(i)))));
            coeffs.push((vec![theta(al), 0], Expr::add_all(t)));
            for be in 0..n {
                coeffs.push((vec![theta(al), psi(be)], dl[al].diff(&a.fiber()[be])));
            }
            for be in al + 1..n {
                let mut t: Vec<Expr> = (0..base.len())
                    .flat_map(|i| {
                        let xi = base.name(i);
                        [a.rho(i, be) * dl[al].diff(xi), -(a.rho(i, al) * dl[be].diff(xi))]
                    })
                    .collect();
                t.extend((0..n).map(|g| &dl[g] * a.c(g, al, be)));
                coeffs.push((vec![theta(al), theta(be)], Expr::add_all(t)));
            }
        }
        cf.assemble(2, coeffs)
    }

    /// Hessian `g_{αβ}` and right-hand side of `g F = rhs`, where
    /// `rhs_α = ρ^i_α ∂L/∂x^i + C^γ_α ∂L/∂y^γ − ẋ^i ∂²L/∂x^i∂y^α`.
    pub fn sode_system(&self) -> (Vec<Vec<Expr>>, Vec<Expr>) {
        let p = &self.prolonged;
        let a = p.source();
        let base = a.base();
        let n = self.n();
        let dl: Vec<Expr> = (0..n).map(|al| self.dl_dy(al)).collect();
        let hessian = (0..n).map(|al| (0..n).map(|be| dl[al].diff(&a.fiber()[be])).collect()).collect();
        let rhs = (0..n)
            .map(|al| {
                let mut t: Vec<Expr> =
                    (0..base.len()).map(|i| a.rho(i, al) * self.expr.diff(base.name(i))).collect();
                t.extend((0..n).map(|g| p.c_mixed(g, al) * &dl[g]));
                t.extend((0..base.len()).map(|i| -(p.xdot(i) * dl[al].diff(base.name(i)))));
                Expr::add_all(t)
            })
            .collect();
        (hessian, rhs)
    }

    /// Solve for the Lagrangian pseudo-SODE. The Hessian is probed at
    /// `zt.samples` points of `zt.domain`; a determinant at or below `1e-10`
    /// in magnitude rejects the Lagrangian as singular. A fibre-independent
    /// Hessian is inverted symbolically; otherwise the forces stay implicit.
    pub fn derive_sode(&self, zt: &ZeroTest) -> Result<PseudoSode, LagrangianError> {
        let (hessian, rhs) = self.sode_system();
        let chart = self.alg().chart();
        let vars: Vec<String> = chart.names().to_vec();
        let compiled: Vec<Vec<_>> = hessian
            .iter()
            .map(|r| r.iter().map(|e| e.compile(&vars).expect("Lagrangian is over the chart")).collect())
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(zt.seed);
        let mut point = vec![0.0; vars.len()];
        let mut evaluated = 0;
        for _ in 0..zt.samples {
            for (slot, name) in point.iter_mut().zip(&vars) {
                let (lo, hi) = zt.domain.range(name);
                *slot = if hi > lo { rng.gen_range(lo..hi) } else { lo };
            }
            let m: Result<Vec<Vec<f64>>, _> = compiled.iter().map(|r| r.iter().map(|c| c.eval(&point)).collect()).collect();
            let Ok(m) = m else { continue };
            evaluated += 1;
            let det = linalg::determinant(&m);
            if det.abs() <= SINGULAR_DET {
                return Err(LagrangianError::Singular { point: vars.iter().cloned().zip(point.iter().copied()).collect(), det });
            }
        }
        if evaluated == 0 && zt.samples > 0 {
            return Err(LagrangianError::Unevaluable);
        }
        let fibre_free = hessian.iter().flatten().all(|e| self.prolonged.source().fiber().iter().all(|y| !e.depends_on(y)));
        let forces = match fibre_free.then(|| linalg::solve_vector(&hessian, &rhs)).flatten() {
            Some(f) => Forces::Explicit(f.iter().map(Expr::simplify).collect()),
            None => Forces::Implicit { hessian, rhs },
        };
        Ok(PseudoSode { prolonged: self.prolonged.clone(), forces })
    }

    pub fn legendre(&self) -> LegendreMap {
        let n = self.n();
        let dl: Vec<Expr> = (0..n).map(|al| self.dl_dy(al)).collect();
        let p = &self.prolonged;
        let mut phi = vec![Expr::add_all(
            std::iter::once(self.expr.clone()).chain((0..n).map(|al| -(&dl[al] * p.y(al)))),
        )];
        phi.extend(dl);
        LegendreMap { lagrangian: self.clone(), phi }
    }
}

fn unit(size: usize, k: usize) -> Vec<Expr> {
    let mut r = vec![Expr::zero(); size];
    r[k] = Expr::one();
    r
}

/// The prolongation of the extended dual over `E†`, in the frame
/// `[X0..Xn, P0..Pn]`, with its canonical forms.
#[derive(Debug, Clone)]
pub struct CanonicalForms {
    pub algebroid: Arc<VectorAlgebroid>,
    pub momenta: Vec<String>,
    /// `θ_0 = μ_a X^a`
    pub theta0: KForm,
    /// `ω_0 = −dθ_0`
    pub omega0: KForm,
}

impl CanonicalForms {
    /// Validates `source` first with the default zero test.
    pub fn new(source: &AffineAlgebroid) -> Result<Self, LagrangianError> {
        if !source.validate(&Default::default()).all_pass() {
            return Err(LagrangianError::InvalidSource);
        }
        let n = source.fiber_dim() + 1;
        let momenta: Vec<String> = (0..n).map(|a| format!("mu{a}")).collect();
        let alg = prolong_vector(source.vector(), &momenta, Role::DualFiber, "X", "P", 0).map_err(|e| match e {
            crate::algebroid::AlgebroidError::Sym(s) => LagrangianError::Sym(s),
            other => unreachable!("{other}"),
        })?;
        let alg = Arc::new(alg);
        let theta0 = KForm::from_terms(&alg, 1, (0..n).map(|a| (vec![a], Expr::var(&momenta[a]))));
        let omega0 = -theta0.d();
        Ok(CanonicalForms { algebroid: alg, momenta, theta0, omega0 })
    }

    /// `X^a ∧ P^a + Σ_{a<b} μ_c C^c_{ab} X^a ∧ X^b`
    pub fn omega0_displayed(&self, source: &AffineAlgebroid) -> KForm {
        let n = self.momenta.len();
        let v = source.vector();
        let mut terms: Vec<(Vec<usize>, Expr)> = (0..n).map(|a| (vec![a, n + a], Expr::one())).collect();
        for a in 0..n {
            for b in a + 1..n {
                let c = Expr::add_all((0..n).map(|c| Expr::var(&self.momenta[c]) * v.structure(c, a, b)));
                terms.push((vec![a, b], c));
            }
        }
        KForm::from_terms(&self.algebroid, 2, terms)
    }
}

/// `Φ_L(x, y) = (x, L − y^α ∂L/∂y^α, ∂L/∂y^α)`
#[derive(Debug, Clone)]
pub struct LegendreMap {
    lagrangian: Lagrangian,
    /// `μ_a ∘ Φ_L`
    pub phi: Vec<Expr>,
}

impl LegendreMap {
    /// Image of the prolongation frame element `b` under the prolonged map:
    /// `X_a ↦ X_a + ρ^i_a ∂Φ_c/∂x^i P_c` and `V_α ↦ ∂Φ_c/∂y^α P_c`.
    pub fn push_frame(&self, target: &CanonicalForms, b: usize) -> Section {
        let p = self.lagrangian.prolonged();
        let src = p.algebroid();
        let n = self.phi.len();
        let mut c = vec![Expr::zero(); 2 * n];
        if b < n {
            c[b] = Expr::one();
        }
        for (k, phi) in self.phi.iter().enumerate() {
            c[n + k] = Section::basis(src, b).anchor_apply(phi);
        }
        Section::new(&target.algebroid, c).expect("rank matches")
    }

    /// Pull a form on the dual prolongation back to the prolongation of `E`.
    pub fn pullback(&self, target: &CanonicalForms, omega: &KForm) -> KForm {
        let src = self.lagrangian.prolonged().algebroid();
        let pushed: Vec<Section> = (0..src.rank()).map(|b| self.push_frame(target, b)).collect();
        let subs: HashMap<String, Expr> = target.momenta.iter().cloned().zip(self.phi.iter().cloned()).collect();
        let k = omega.degree();
        let terms = increasing(src.rank(), k).into_iter().map(|idx| {
            let secs: Vec<Section> = idx.iter().map(|&i| pushed[i].clone()).collect();
            let c = omega.evaluate(&secs).expect("degree matches").substitute(&subs);
            (idx, c)
        });
        KForm::from_terms(src, k, terms)
    }
}
