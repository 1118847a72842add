//! Vector Lie algebroids in a fixed frame, and their affine specialisation on
//! the bidual frame `{e0, e1, …, en}`.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::calculus::KForm;
use crate::symkernel::{Chart, Expr, Role, SymError, Witness, ZeroTest, Zeroness};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebroidError {
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("{what}: expected {expected} entries, found {found}")]
    Shape { what: String, expected: usize, found: usize },
    #[error("structure index ({c}, {a}, {b}) out of range for a frame of size {n}")]
    IndexOutOfRange { c: usize, a: usize, b: usize, n: usize },
    #[error("structure entry ({c}, {a}, {b}) must have {a} < {b}")]
    NotIncreasing { c: usize, a: usize, b: usize },
    #[error("structure entry ({c}, {a}, {b}) given twice")]
    DuplicateEntry { c: usize, a: usize, b: usize },
    #[error("{what} depends on `{var}`, which is not a base coordinate")]
    NotOnBase { what: String, var: String },
    #[error("duplicate frame element `{0}`")]
    DuplicateFrame(String),
    #[error("operands belong to different algebroids")]
    Mismatch,
}

/// A Lie algebroid given by anchor components `ρ^i_a` and structure
/// functions `C^c_{ab}` in a fixed local frame.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorAlgebroid {
    chart: Chart,
    frame: Vec<String>,
    /// `anchor[i][a] = ρ^i_a`
    anchor: Vec<Vec<Expr>>,
    /// Dense and skew: `structure[(c * n + a) * n + b] = C^c_{ab}`.
    structure: Vec<Expr>,
}

impl VectorAlgebroid {
    /// `structure` lists `(c, a, b, C^c_{ab})` with `a < b`; missing entries
    /// are zero and the `a > b` half follows by skew-symmetry.
    pub fn new(
        chart: Chart,
        frame: Vec<String>,
        anchor: Vec<Vec<Expr>>,
        structure: Vec<(usize, usize, usize, Expr)>,
    ) -> Result<Self, AlgebroidError> {
        let n = frame.len();
        for (k, name) in frame.iter().enumerate() {
            if frame[..k].contains(name) {
                return Err(AlgebroidError::DuplicateFrame(name.clone()));
            }
        }
        if anchor.len() != chart.len() {
            return Err(AlgebroidError::Shape { what: "anchor rows".into(), expected: chart.len(), found: anchor.len() });
        }
        let mut rows = Vec::with_capacity(anchor.len());
        for row in anchor {
            if row.len() != n {
                return Err(AlgebroidError::Shape { what: "anchor columns".into(), expected: n, found: row.len() });
            }
            let row: Vec<Expr> = row.iter().map(Expr::simplify).collect();
            for e in &row {
                chart.covers(e)?;
            }
            rows.push(row);
        }
        let mut table = vec![Expr::zero(); n * n * n];
        let mut seen = vec![false; n * n * n];
        for (c, a, b, e) in structure {
            if c >= n || a >= n || b >= n {
                return Err(AlgebroidError::IndexOutOfRange { c, a, b, n });
            }
            if a >= b {
                return Err(AlgebroidError::NotIncreasing { c, a, b });
            }
            let idx = (c * n + a) * n + b;
            if seen[idx] {
                return Err(AlgebroidError::DuplicateEntry { c, a, b });
            }
            seen[idx] = true;
            let e = e.simplify();
            chart.covers(&e)?;
            table[(c * n + b) * n + a] = -e.clone();
            table[idx] = e;
        }
        Ok(VectorAlgebroid { chart, frame, anchor: rows, structure: table })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn frame(&self) -> &[String] {
        &self.frame
    }

    pub fn rank(&self) -> usize {
        self.frame.len()
    }

    /// `ρ^i_a`
    pub fn anchor(&self, i: usize, a: usize) -> &Expr {
        &self.anchor[i][a]
    }

    /// `C^c_{ab}`, for any order of `a`, `b`.
    pub fn structure(&self, c: usize, a: usize, b: usize) -> &Expr {
        let n = self.rank();
        &self.structure[(c * n + a) * n + b]
    }

    /// `ρ(e_a)(f) = ρ^i_a ∂f/∂x^i`
    pub fn anchor_derivative(&self, a: usize, f: &Expr) -> Expr {
        Expr::add_all((0..self.chart.len()).filter_map(|i| {
            let r = &self.anchor[i][a];
            if r.is_literal_zero() {
                return None;
            }
            let df = f.diff(self.chart.name(i));
            (!df.is_literal_zero()).then(|| r * df)
        }))
    }

    /// Nonzero entries `(a, b, C^c_{ab})` with `a < b`, for a fixed `c`.
    pub fn structure_row(&self, c: usize) -> impl Iterator<Item = (usize, usize, &Expr)> + '_ {
        let n = self.rank();
        (0..n).flat_map(move |a| (a + 1..n).map(move |b| (a, b))).filter_map(move |(a, b)| {
            let e = self.structure(c, a, b);
            (!e.is_literal_zero()).then_some((a, b, e))
        })
    }

    /// Debug cross-check of the Jacobi identity by direct expansion of
    /// `[[e_a, e_b], e_c] + cyclic` over all frame triples.
    pub fn jacobi_by_brackets(self: &Arc<Self>, zt: &ZeroTest) -> Status {
        let n = self.rank();
        let mut checks = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let ea = Section::basis(self, a);
                    let eb = Section::basis(self, b);
                    let ec = Section::basis(self, c);
                    let s = ea.bracket(&eb).unwrap().bracket(&ec).unwrap()
                        + eb.bracket(&ec).unwrap().bracket(&ea).unwrap()
                        + ec.bracket(&ea).unwrap().bracket(&eb).unwrap();
                    checks.push((format!("[[e{a},e{b}],e{c}] + cyclic"), s.is_zero(zt)));
                }
            }
        }
        Status::aggregate(checks).0
    }
}

fn same(a: &Arc<VectorAlgebroid>, b: &Arc<VectorAlgebroid>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A section `Σ ζ^a e_a`. Coefficients are functions of the owning chart;
/// symbols outside the chart are treated as constant parameters.
#[derive(Debug, Clone)]
pub struct Section {
    algebroid: Arc<VectorAlgebroid>,
    coeffs: Vec<Expr>,
}

impl Section {
    pub fn new(algebroid: &Arc<VectorAlgebroid>, coeffs: Vec<Expr>) -> Result<Self, AlgebroidError> {
        if coeffs.len() != algebroid.rank() {
            return Err(AlgebroidError::Shape {
                what: "section coefficients".into(),
                expected: algebroid.rank(),
                found: coeffs.len(),
            });
        }
        Ok(Section { algebroid: algebroid.clone(), coeffs: coeffs.iter().map(Expr::simplify).collect() })
    }

    pub fn zero(algebroid: &Arc<VectorAlgebroid>) -> Self {
        Section { algebroid: algebroid.clone(), coeffs: vec![Expr::zero(); algebroid.rank()] }
    }

    /// The frame element `e_a`.
    pub fn basis(algebroid: &Arc<VectorAlgebroid>, a: usize) -> Self {
        let mut s = Section::zero(algebroid);
        s.coeffs[a] = Expr::one();
        s
    }

    pub fn algebroid(&self) -> &Arc<VectorAlgebroid> {
        &self.algebroid
    }

    pub fn coeffs(&self) -> &[Expr] {
        &self.coeffs
    }

    pub fn coeff(&self, a: usize) -> &Expr {
        &self.coeffs[a]
    }

    pub fn scale(&self, f: &Expr) -> Section {
        Section { algebroid: self.algebroid.clone(), coeffs: self.coeffs.iter().map(|c| c * f).collect() }
    }

    fn check_same(&self, other: &Section) -> Result<(), AlgebroidError> {
        if same(&self.algebroid, &other.algebroid) {
            Ok(())
        } else {
            Err(AlgebroidError::Mismatch)
        }
    }

    /// `ρ(ζ)(f) = ζ^a ρ^i_a ∂f/∂x^i`
    pub fn anchor_apply(&self, f: &Expr) -> Expr {
        Expr::add_all(self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_literal_zero()).map(|(a, c)| {
            c * self.algebroid.anchor_derivative(a, f)
        }))
    }

    /// Bracket extended from the frame brackets by bilinearity and the
    /// Leibniz rule:
    /// `[ζ, η] = (ρ(ζ)(η^b) − ρ(η)(ζ^b)) e_b + ζ^a η^b C^c_{ab} e_c`.
    pub fn bracket(&self, other: &Section) -> Result<Section, AlgebroidError> {
        self.check_same(other)?;
        let alg = &self.algebroid;
        let n = alg.rank();
        let mut out: Vec<Vec<Expr>> = vec![Vec::new(); n];
        for (b, slot) in out.iter_mut().enumerate() {
            slot.push(self.anchor_apply(&other.coeffs[b]));
            slot.push(-other.anchor_apply(&self.coeffs[b]));
        }
        for a in 0..n {
            if self.coeffs[a].is_literal_zero() {
                continue;
            }
            for b in 0..n {
                if a == b || other.coeffs[b].is_literal_zero() {
                    continue;
                }
                let fg = &self.coeffs[a] * &other.coeffs[b];
                for (c, slot) in out.iter_mut().enumerate() {
                    let k = alg.structure(c, a, b);
                    if !k.is_literal_zero() {
                        slot.push(&fg * k);
                    }
                }
            }
        }
        Ok(Section { algebroid: alg.clone(), coeffs: out.into_iter().map(Expr::add_all).collect() })
    }

    /// Component-wise zero test.
    pub fn is_zero(&self, zt: &ZeroTest) -> Zeroness {
        combine(self.coeffs.iter().map(|c| zt.check(c)))
    }
}

impl std::ops::Add for Section {
    type Output = Section;
    fn add(self, rhs: Section) -> Section {
        assert!(same(&self.algebroid, &rhs.algebroid), "adding sections of different algebroids");
        Section {
            algebroid: self.algebroid,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl std::ops::Sub for Section {
    type Output = Section;
    fn sub(self, rhs: Section) -> Section {
        assert!(same(&self.algebroid, &rhs.algebroid), "subtracting sections of different algebroids");
        Section {
            algebroid: self.algebroid,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

/// First failure wins; otherwise any `Unknown` makes the result `Unknown`.
pub(crate) fn combine(results: impl Iterator<Item = Zeroness>) -> Zeroness {
    let mut unknown = false;
    for r in results {
        match r {
            Zeroness::Zero => {}
            Zeroness::NonZero(w) => return Zeroness::NonZero(w),
            Zeroness::Unknown => unknown = true,
        }
    }
    if unknown {
        Zeroness::Unknown
    } else {
        Zeroness::Zero
    }
}

/// A Lie algebroid on an affine bundle, stored on its bidual frame.
/// Frame index 0 is `e0`; fibre index `α` (0-based) is frame index `α + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineAlgebroid {
    vector: Arc<VectorAlgebroid>,
    fiber: Vec<String>,
}

impl AffineAlgebroid {
    /// Build from the split coordinate data. All indices are 0-based over
    /// the fibre: `rho0[i] = ρ^i_0`, `rho[i][α] = ρ^i_α`,
    /// `c0 = (γ, β, C^γ_{0β})`, `c = (γ, α, β, C^γ_{αβ})` with `α < β`.
    pub fn new(
        base: Chart,
        fiber: Vec<String>,
        rho0: Vec<Expr>,
        rho: Vec<Vec<Expr>>,
        c0: Vec<(usize, usize, Expr)>,
        c: Vec<(usize, usize, usize, Expr)>,
    ) -> Result<Self, AlgebroidError> {
        let m = base.len();
        let n = fiber.len();
        if rho0.len() != m {
            return Err(AlgebroidError::Shape { what: "anchor rho0".into(), expected: m, found: rho0.len() });
        }
        if rho.len() != m {
            return Err(AlgebroidError::Shape { what: "anchor rho rows".into(), expected: m, found: rho.len() });
        }
        for name in &fiber {
            if base.contains(name) {
                return Err(SymError::DuplicateCoordinate(name.clone()).into());
            }
        }
        let only_base = |what: &str, e: &Expr| -> Result<(), AlgebroidError> {
            match e.free_vars().into_iter().find(|v| !base.contains(v)) {
                Some(var) => Err(AlgebroidError::NotOnBase { what: what.to_string(), var }),
                None => Ok(()),
            }
        };
        let mut anchor = Vec::with_capacity(m);
        for (i, (r0, row)) in rho0.into_iter().zip(rho).enumerate() {
            if row.len() != n {
                return Err(AlgebroidError::Shape { what: "anchor rho columns".into(), expected: n, found: row.len() });
            }
            only_base(&format!("rho0[{i}]"), &r0)?;
            let mut full = vec![r0];
            for (a, e) in row.into_iter().enumerate() {
                only_base(&format!("rho[{i}][{a}]"), &e)?;
                full.push(e);
            }
            anchor.push(full);
        }
        let mut structure = Vec::new();
        for (g, b, e) in c0 {
            if g >= n || b >= n {
                return Err(AlgebroidError::IndexOutOfRange { c: g + 1, a: 0, b: b + 1, n: n + 1 });
            }
            only_base("C0", &e)?;
            structure.push((g + 1, 0, b + 1, e));
        }
        for (g, a, b, e) in c {
            if g >= n || a >= n || b >= n {
                return Err(AlgebroidError::IndexOutOfRange { c: g + 1, a: a + 1, b: b + 1, n: n + 1 });
            }
            only_base("C", &e)?;
            structure.push((g + 1, a + 1, b + 1, e));
        }
        let frame = std::iter::once("e0".to_string()).chain((1..=n).map(|k| format!("e{k}"))).collect();
        let vector = VectorAlgebroid::new(base, frame, anchor, structure)?;
        Ok(AffineAlgebroid { vector: Arc::new(vector), fiber })
    }

    /// Wrap an arbitrary vector algebroid on a bidual frame. The `C^0`
    /// table is not checked here; [`AffineAlgebroid::validate`] reports it.
    pub fn from_bidual(vector: VectorAlgebroid, fiber: Vec<String>) -> Result<Self, AlgebroidError> {
        if vector.rank() != fiber.len() + 1 {
            return Err(AlgebroidError::Shape { what: "bidual frame".into(), expected: fiber.len() + 1, found: vector.rank() });
        }
        Ok(AffineAlgebroid { vector: Arc::new(vector), fiber })
    }

    pub fn vector(&self) -> &Arc<VectorAlgebroid> {
        &self.vector
    }

    pub fn base(&self) -> &Chart {
        self.vector.chart()
    }

    /// Names of the fibre coordinates `y^α`.
    pub fn fiber(&self) -> &[String] {
        &self.fiber
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber.len()
    }

    /// Chart on `E`: base coordinates followed by fibre coordinates.
    pub fn total_chart(&self) -> Chart {
        self.base()
            .extended(self.fiber.iter().map(|n| (n.clone(), Role::Fiber)))
            .expect("fibre names were checked against the base at construction")
    }

    pub fn rho0(&self, i: usize) -> &Expr {
        self.vector.anchor(i, 0)
    }

    pub fn rho(&self, i: usize, alpha: usize) -> &Expr {
        self.vector.anchor(i, alpha + 1)
    }

    /// `C^γ_{0β}`
    pub fn c0(&self, gamma: usize, beta: usize) -> &Expr {
        self.vector.structure(gamma + 1, 0, beta + 1)
    }

    /// `C^γ_{αβ}`
    pub fn c(&self, gamma: usize, alpha: usize, beta: usize) -> &Expr {
        self.vector.structure(gamma + 1, alpha + 1, beta + 1)
    }

    pub fn section(&self, coeffs: Vec<Expr>) -> Result<Section, AlgebroidError> {
        Section::new(&self.vector, coeffs)
    }

    pub fn e(&self, a: usize) -> Section {
        Section::basis(&self.vector, a)
    }

    pub fn validate(&self, opts: &ValidateOptions) -> ValidationReport {
        let mut report = validate_vector(&self.vector, &opts.zero_test);
        let n = self.vector.rank();
        let mut checks = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                checks.push((format!("C^0_{{{a}{b}}}"), opts.zero_test.check(self.vector.structure(0, a, b))));
            }
        }
        let de0 = KForm::basis(&self.vector, 0).d();
        checks.push(("d(e^0)".to_string(), de0.is_zero(&opts.zero_test)));
        report.push(Axiom::Affine, checks);
        if let Some(f) = &opts.exactness {
            let diff = KForm::function(&self.vector, f.clone()).d() - KForm::basis(&self.vector, 0);
            report.push(Axiom::Exactness, vec![(format!("d({f}) - e^0"), diff.is_zero(&opts.zero_test))]);
        }
        report
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidateOptions {
    pub zero_test: ZeroTest,
    /// Candidate `f` for the probe `df = e^0`.
    pub exactness: Option<Expr>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    /// `d²f = 0` on coordinates and `d²e^c = 0` on the coframe.
    Jacobi,
    /// `ρ([e_a, e_b]) = [ρ(e_a), ρ(e_b)]` on coordinate functions.
    AnchorMorphism,
    /// No `e0` component in any frame bracket; equivalently `de^0 = 0`.
    Affine,
    /// `df = e^0` for the nominated function.
    Exactness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Unknown,
}

impl Status {
    /// Overall status plus the first failing identity and its witness.
    fn aggregate(checks: Vec<(String, Zeroness)>) -> (Status, Option<(String, Option<Witness>)>) {
        let mut unknown = None;
        for (label, z) in checks {
            match z {
                Zeroness::Zero => {}
                Zeroness::NonZero(w) => return (Status::Fail, Some((label, w))),
                Zeroness::Unknown => {
                    unknown.get_or_insert(label);
                }
            }
        }
        match unknown {
            Some(l) => (Status::Unknown, Some((l, None))),
            None => (Status::Pass, None),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomResult {
    pub axiom: Axiom,
    pub status: Status,
    pub identities_checked: usize,
    /// The first identity that did not test Zero.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_identity: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ValidationReport {
    pub results: Vec<AxiomResult>,
}

impl ValidationReport {
    fn push(&mut self, axiom: Axiom, checks: Vec<(String, Zeroness)>) {
        let identities_checked = checks.len();
        let (status, failure) = Status::aggregate(checks);
        let (failed_identity, witness) = match failure {
            Some((l, w)) => (Some(l), w),
            None => (None, None),
        };
        self.results.push(AxiomResult { axiom, status, identities_checked, failed_identity, witness });
    }

    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.status == Status::Pass)
    }

    pub fn get(&self, axiom: Axiom) -> Option<&AxiomResult> {
        self.results.iter().find(|r| r.axiom == axiom)
    }
}

/// Jacobi (through `d² = 0`) and anchor-morphism checks.
pub fn validate_vector(alg: &Arc<VectorAlgebroid>, zt: &ZeroTest) -> ValidationReport {
    let mut report = ValidationReport::default();
    let chart = alg.chart();
    let n = alg.rank();

    let mut jacobi = Vec::new();
    for i in 0..chart.len() {
        let dd = KForm::function(alg, chart.coordinate(i)).d().d();
        jacobi.push((format!("d²({})", chart.name(i)), dd.is_zero(zt)));
    }
    for c in 0..n {
        let dd = KForm::basis(alg, c).d().d();
        jacobi.push((format!("d²(e^{c})"), dd.is_zero(zt)));
    }
    report.push(Axiom::Jacobi, jacobi);

    let mut morphism = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let ea = Section::basis(alg, a);
            let eb = Section::basis(alg, b);
            let br = ea.bracket(&eb).expect("same algebroid");
            for i in 0..chart.len() {
                let f = chart.coordinate(i);
                let lhs = br.anchor_apply(&f);
                let rhs = ea.anchor_apply(&eb.anchor_apply(&f)) - eb.anchor_apply(&ea.anchor_apply(&f));
                morphism.push((format!("ρ([e{a},e{b}])({}) - [ρ(e{a}),ρ(e{b})]({})", chart.name(i), chart.name(i)), zt.check(&(lhs - rhs))));
            }
        }
    }
    report.push(Axiom::AnchorMorphism, morphism);
    report
}

impl VectorAlgebroid {
    pub fn validate(self: &Arc<Self>, zt: &ZeroTest) -> ValidationReport {
        validate_vector(self, zt)
    }
}
