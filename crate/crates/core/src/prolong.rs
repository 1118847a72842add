//! Prolongation of an affine algebroid over its own bundle `E`, with the
//! contact forms, the vertical endomorphism and the vertical and complete
//! lifts.

use std::sync::Arc;

use crate::algebroid::{combine, AffineAlgebroid, AlgebroidError, Section, VectorAlgebroid};
use crate::calculus::KForm;
use crate::symkernel::{Expr, Role, ZeroTest, Zeroness};
use crate::algebroid::ValidateOptions;

/// Prolong a vector algebroid over fibre coordinates `u^I`. The new frame is
/// `{X_a} ∪ {V_I}` with `ρ(X_a) = ρ^i_a ∂_{x^i}`, `ρ(V_I) = ∂_{u^I}` and the
/// only nonzero brackets `[X_a, X_b] = C^c_{ab} X_c`.
pub fn prolong_vector(
    source: &VectorAlgebroid,
    fiber: &[String],
    role: Role,
    x_prefix: &str,
    v_prefix: &str,
    v_offset: usize,
) -> Result<VectorAlgebroid, AlgebroidError> {
    let chart = source.chart().extended(fiber.iter().map(|f| (f.clone(), role)))?;
    let n = source.rank();
    let k = fiber.len();
    let m = source.chart().len();
    let mut frame: Vec<String> = (0..n).map(|a| format!("{x_prefix}{a}")).collect();
    frame.extend((0..k).map(|i| format!("{v_prefix}{}", i + v_offset)));
    let mut anchor = Vec::with_capacity(m + k);
    for i in 0..m {
        let mut row: Vec<Expr> = (0..n).map(|a| source.anchor(i, a).clone()).collect();
        row.extend(std::iter::repeat_n(Expr::zero(), k));
        anchor.push(row);
    }
    for j in 0..k {
        let mut row = vec![Expr::zero(); n + k];
        row[n + j] = Expr::one();
        anchor.push(row);
    }
    let mut structure = Vec::new();
    for c in 0..n {
        for (a, b, e) in source.structure_row(c) {
            structure.push((c, a, b, e.clone()));
        }
    }
    VectorAlgebroid::new(chart, frame, anchor, structure)
}

/// The prolongation `T^E E` in the frame `[X0, X1..Xn, V1..Vn]`.
#[derive(Debug, Clone)]
pub struct ProlongedAlgebroid {
    source: AffineAlgebroid,
    alg: Arc<VectorAlgebroid>,
}

impl ProlongedAlgebroid {
    /// Validates `source` first with the default zero test.
    pub fn new(source: &AffineAlgebroid) -> Result<Self, ProlongError> {
        let report = source.validate(&ValidateOptions::default());
        if let Some(bad) = report.results.iter().find(|r| r.status != crate::algebroid::Status::Pass) {
            return Err(ProlongError::InvalidSource(format!("{:?} is {:?}", bad.axiom, bad.status)));
        }
        Ok(Self::new_unchecked(source))
    }

    pub fn new_unchecked(source: &AffineAlgebroid) -> Self {
        let alg = prolong_vector(source.vector(), source.fiber(), Role::Fiber, "X", "V", 1)
            .expect("fibre names are distinct from base names");
        ProlongedAlgebroid { source: source.clone(), alg: Arc::new(alg) }
    }

    pub fn source(&self) -> &AffineAlgebroid {
        &self.source
    }

    pub fn algebroid(&self) -> &Arc<VectorAlgebroid> {
        &self.alg
    }

    pub fn fiber_dim(&self) -> usize {
        self.source.fiber_dim()
    }

    /// Frame index of `X_a`, `a` in `0..=n`.
    pub fn x(&self, a: usize) -> usize {
        a
    }

    /// Frame index of `V_α`, `α` 0-based.
    pub fn v(&self, alpha: usize) -> usize {
        self.fiber_dim() + 1 + alpha
    }

    /// The fibre coordinate `y^α`.
    pub fn y(&self, alpha: usize) -> Expr {
        Expr::var(&self.source.fiber()[alpha])
    }

    /// `ḟ = (ρ^i_0 + ρ^i_β y^β) ∂f/∂x^i`
    pub fn dot(&self, f: &Expr) -> Expr {
        let base = self.source.base();
        Expr::add_all((0..base.len()).map(|i| self.xdot(i) * f.diff(base.name(i))))
    }

    /// `ρ^i_0 + ρ^i_β y^β`
    pub fn xdot(&self, i: usize) -> Expr {
        let n = self.fiber_dim();
        Expr::add_all(
            std::iter::once(self.source.rho0(i).clone()).chain((0..n).map(|b| self.source.rho(i, b) * self.y(b))),
        )
    }

    /// `C^α_β = C^α_{0β} + C^α_{γβ} y^γ`
    pub fn c_mixed(&self, alpha: usize, beta: usize) -> Expr {
        let n = self.fiber_dim();
        Expr::add_all(
            std::iter::once(self.source.c0(alpha, beta).clone())
                .chain((0..n).map(|g| self.source.c(alpha, g, beta) * self.y(g))),
        )
    }

    /// `θ^α = X^α − y^α X^0`
    pub fn contact_form(&self, alpha: usize) -> KForm {
        KForm::from_terms(&self.alg, 1, [(vec![self.x(alpha + 1)], Expr::one()), (vec![self.x(0)], -self.y(alpha))])
    }

    fn owns(&self, z: &Section) -> Result<(), ProlongError> {
        if z.algebroid().as_ref() == self.alg.as_ref() {
            Ok(())
        } else {
            Err(ProlongError::Mismatch)
        }
    }

    fn check_source(&self, z: &Section) -> Result<(), ProlongError> {
        if z.algebroid().as_ref() == self.source.vector().as_ref() {
            Ok(())
        } else {
            Err(ProlongError::Mismatch)
        }
    }

    /// `S(Z) = Σ (Z^{X_α} − y^α Z^{X_0}) V_α`
    pub fn vertical_endomorphism(&self, z: &Section) -> Result<Section, ProlongError> {
        self.owns(z)?;
        let n = self.fiber_dim();
        let mut c = vec![Expr::zero(); self.alg.rank()];
        for al in 0..n {
            c[self.v(al)] = z.coeff(self.x(al + 1)) - self.y(al) * z.coeff(self.x(0));
        }
        Ok(Section::new(&self.alg, c)?)
    }

    /// `ζ^V = (ζ^α − y^α ζ^0) V_α`
    pub fn vertical_lift(&self, zeta: &Section) -> Result<Section, ProlongError> {
        self.check_source(zeta)?;
        let n = self.fiber_dim();
        let mut c = vec![Expr::zero(); self.alg.rank()];
        for al in 0..n {
            c[self.v(al)] = zeta.coeff(al + 1) - self.y(al) * zeta.coeff(0);
        }
        Ok(Section::new(&self.alg, c)?)
    }

    /// `ζ^C = ζ^a X_a + [(ζ̇^α − y^α ζ̇^0) + C^α_β (ζ^β − y^β ζ^0)] V_α`
    pub fn complete_lift(&self, zeta: &Section) -> Result<Section, ProlongError> {
        self.check_source(zeta)?;
        let n = self.fiber_dim();
        let mut c = vec![Expr::zero(); self.alg.rank()];
        for a in 0..=n {
            c[self.x(a)] = zeta.coeff(a).clone();
        }
        let z0 = zeta.coeff(0);
        let z0dot = self.dot(z0);
        let vert: Vec<Expr> = (0..n).map(|b| zeta.coeff(b + 1) - self.y(b) * z0).collect();
        for al in 0..n {
            let mut terms = vec![self.dot(zeta.coeff(al + 1)), -(self.y(al) * &z0dot)];
            terms.extend((0..n).map(|b| self.c_mixed(al, b) * &vert[b]));
            c[self.v(al)] = Expr::add_all(terms);
        }
        Ok(Section::new(&self.alg, c)?)
    }

    /// Split a 1-form `θ = θ_a e^a` on the source into `θ̂ = θ_0 + θ_α y^α`
    /// and `θ̄ = θ_α θ^α`, so that its pullback is `θ̂ X^0 + θ̄`.
    pub fn split_form(&self, theta: &KForm) -> Result<(Expr, KForm), ProlongError> {
        if theta.algebroid().as_ref() != self.source.vector().as_ref() || theta.degree() != 1 {
            return Err(ProlongError::Mismatch);
        }
        let n = self.fiber_dim();
        let hat = Expr::add_all(
            std::iter::once(theta.coeff(&[0])).chain((0..n).map(|al| theta.coeff(&[al + 1]) * self.y(al))),
        );
        let mut bar = KForm::zero(&self.alg, 1);
        for al in 0..n {
            bar = bar + self.contact_form(al).scale(&theta.coeff(&[al + 1]));
        }
        Ok((hat, bar))
    }

    /// `θ_a e^a ↦ θ_a X^a`
    pub fn pullback_form(&self, theta: &KForm) -> Result<KForm, ProlongError> {
        if theta.algebroid().as_ref() != self.source.vector().as_ref() {
            return Err(ProlongError::Mismatch);
        }
        Ok(KForm::from_terms(&self.alg, theta.degree(), theta.terms().iter().map(|(k, v)| (k.clone(), v.clone()))))
    }

    /// `Γ = X_0 + y^α X_α + F^α V_α`
    pub fn sode_section(&self, forces: &[Expr]) -> Section {
        let n = self.fiber_dim();
        assert_eq!(forces.len(), n, "one force component per fibre coordinate");
        let mut c = vec![Expr::zero(); self.alg.rank()];
        c[self.x(0)] = Expr::one();
        for al in 0..n {
            c[self.x(al + 1)] = self.y(al);
            c[self.v(al)] = forces[al].clone();
        }
        Section::new(&self.alg, c).expect("rank matches")
    }

    /// `⟨X^0, Γ⟩ = 1` and `S(Γ) = 0`.
    pub fn is_pseudo_sode(&self, gamma: &Section, zt: &ZeroTest) -> Result<Zeroness, ProlongError> {
        let s = self.vertical_endomorphism(gamma)?;
        let first = zt.check(&(gamma.coeff(self.x(0)) - Expr::one()));
        Ok(combine([first, s.is_zero(zt)].into_iter()))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProlongError {
    #[error("source algebroid does not validate: {0}")]
    InvalidSource(String),
    #[error("section or form belongs to a different algebroid")]
    Mismatch,
    #[error(transparent)]
    Algebroid(#[from] AlgebroidError),
}

/// Force components of a pseudo-SODE `Γ = X_0 + y^α X_α + F^α V_α`.
#[derive(Debug, Clone)]
pub enum Forces {
    Explicit(Vec<Expr>),
    /// `g F = rhs`, solved pointwise.
    Implicit { hessian: Vec<Vec<Expr>>, rhs: Vec<Expr> },
}

#[derive(Debug, Clone)]
pub struct PseudoSode {
    pub prolonged: ProlongedAlgebroid,
    pub forces: Forces,
}

impl PseudoSode {
    /// `None` when the forces are only known implicitly.
    pub fn section(&self) -> Option<Section> {
        match &self.forces {
            Forces::Explicit(f) => Some(self.prolonged.sode_section(f)),
            Forces::Implicit { .. } => None,
        }
    }

    /// `ẋ^i` components on `E`.
    pub fn xdot(&self) -> Vec<Expr> {
        (0..self.prolonged.source().base().len()).map(|i| self.prolonged.xdot(i)).collect()
    }
}
