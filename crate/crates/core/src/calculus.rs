//! Exterior calculus on a vector algebroid: sparse k-forms in the dual
//! coframe `{e^a}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebroid::{combine, Section, VectorAlgebroid};
use crate::symkernel::{linalg, Expr, ZeroTest, Zeroness};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CalculusError {
    #[error("cannot contract a 0-form")]
    DegreeZero,
    #[error("operands belong to different algebroids")]
    Mismatch,
    #[error("expected {expected} sections, got {found}")]
    Arity { expected: usize, found: usize },
    #[error("coframe is singular{}", .point.as_ref().map(|p| format!(" at {p:?}")).unwrap_or_default())]
    Singular { point: Option<Vec<(String, f64)>> },
}

/// Sort a multi-index, returning the permutation sign, or `None` on a repeat.
pub(crate) fn sort_with_sign(mut seq: Vec<usize>) -> Option<(Vec<usize>, bool)> {
    let mut odd = false;
    for i in 1..seq.len() {
        let mut j = i;
        while j > 0 && seq[j - 1] > seq[j] {
            seq.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
        if j > 0 && seq[j - 1] == seq[j] {
            return None;
        }
    }
    Some((seq, odd))
}

#[derive(Default)]
struct Acc(BTreeMap<Vec<usize>, Vec<Expr>>);

impl Acc {
    fn push(&mut self, idx: Vec<usize>, e: Expr) {
        if !e.is_literal_zero() {
            self.0.entry(idx).or_default().push(e);
        }
    }

    /// Push `±e` at the sorted form of `seq`; nothing if `seq` repeats.
    fn push_signed(&mut self, seq: Vec<usize>, negate: bool, e: Expr) {
        if let Some((idx, odd)) = sort_with_sign(seq) {
            self.push(idx, if odd != negate { -e } else { e });
        }
    }

    fn finish(self) -> BTreeMap<Vec<usize>, Expr> {
        self.0
            .into_iter()
            .filter_map(|(k, v)| {
                let s = Expr::add_all(v);
                (!s.is_literal_zero()).then_some((k, s))
            })
            .collect()
    }
}

/// A k-form `Σ_{I increasing} ω_I e^I`.
#[derive(Debug, Clone)]
pub struct KForm {
    algebroid: Arc<VectorAlgebroid>,
    degree: usize,
    terms: BTreeMap<Vec<usize>, Expr>,
}

fn same(a: &Arc<VectorAlgebroid>, b: &Arc<VectorAlgebroid>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl KForm {
    pub fn zero(algebroid: &Arc<VectorAlgebroid>, degree: usize) -> Self {
        KForm { algebroid: algebroid.clone(), degree, terms: BTreeMap::new() }
    }

    pub fn function(algebroid: &Arc<VectorAlgebroid>, f: Expr) -> Self {
        Self::monomial(algebroid, &[], f)
    }

    /// The coframe element `e^a`.
    pub fn basis(algebroid: &Arc<VectorAlgebroid>, a: usize) -> Self {
        Self::monomial(algebroid, &[a], Expr::one())
    }

    /// `coeff · e^{i1} ∧ … ∧ e^{ik}`, indices in any order.
    pub fn monomial(algebroid: &Arc<VectorAlgebroid>, indices: &[usize], coeff: Expr) -> Self {
        assert!(indices.iter().all(|&i| i < algebroid.rank()), "coframe index out of range");
        let mut acc = Acc::default();
        acc.push_signed(indices.to_vec(), false, coeff.simplify());
        KForm { algebroid: algebroid.clone(), degree: indices.len(), terms: acc.finish() }
    }

    /// Build from increasing multi-indices; repeated keys are summed.
    pub fn from_terms(
        algebroid: &Arc<VectorAlgebroid>,
        degree: usize,
        terms: impl IntoIterator<Item = (Vec<usize>, Expr)>,
    ) -> Self {
        let mut acc = Acc::default();
        for (idx, e) in terms {
            assert_eq!(idx.len(), degree, "multi-index of wrong length");
            acc.push_signed(idx, false, e);
        }
        KForm { algebroid: algebroid.clone(), degree, terms: acc.finish() }
    }

    pub fn algebroid(&self) -> &Arc<VectorAlgebroid> {
        &self.algebroid
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, Expr> {
        &self.terms
    }

    /// Coefficient on `e^{indices}`; unsorted indices pick up the sign.
    pub fn coeff(&self, indices: &[usize]) -> Expr {
        match sort_with_sign(indices.to_vec()) {
            None => Expr::zero(),
            Some((idx, odd)) => {
                let c = self.terms.get(&idx).cloned().unwrap_or_else(Expr::zero);
                if odd {
                    -c
                } else {
                    c
                }
            }
        }
    }

    pub fn is_literal_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, f: &Expr) -> KForm {
        KForm::from_terms(&self.algebroid, self.degree, self.terms.iter().map(|(k, v)| (k.clone(), v * f)))
    }

    /// Panics if the operands belong to different algebroids.
    pub fn wedge(&self, other: &KForm) -> KForm {
        assert!(same(&self.algebroid, &other.algebroid), "wedge of forms on different algebroids");
        let mut acc = Acc::default();
        for (i, f) in &self.terms {
            for (j, g) in &other.terms {
                let seq = i.iter().chain(j).copied().collect();
                acc.push_signed(seq, false, f * g);
            }
        }
        KForm { algebroid: self.algebroid.clone(), degree: self.degree + other.degree, terms: acc.finish() }
    }

    /// `d e^c = −Σ_{a<b} C^c_{ab} e^a ∧ e^b`, extended as an antiderivation.
    pub fn d(&self) -> KForm {
        let alg = &self.algebroid;
        let n = alg.rank();
        let mut acc = Acc::default();
        for (idx, f) in &self.terms {
            for a in 0..n {
                if idx.contains(&a) {
                    continue;
                }
                let g = alg.anchor_derivative(a, f);
                if g.is_literal_zero() {
                    continue;
                }
                let seq = std::iter::once(a).chain(idx.iter().copied()).collect();
                acc.push_signed(seq, false, g);
            }
            for (p, &c) in idx.iter().enumerate() {
                for (a, b, k) in alg.structure_row(c) {
                    let mut seq = idx[..p].to_vec();
                    seq.extend([a, b]);
                    seq.extend_from_slice(&idx[p + 1..]);
                    // (−1)^p from moving d past e^{i1..ip}, and the overall minus.
                    acc.push_signed(seq, p % 2 == 0, f * k);
                }
            }
        }
        KForm { algebroid: alg.clone(), degree: self.degree + 1, terms: acc.finish() }
    }

    /// Interior product `i_Z ω`.
    pub fn contract(&self, z: &Section) -> Result<KForm, CalculusError> {
        if self.degree == 0 {
            return Err(CalculusError::DegreeZero);
        }
        if !same(&self.algebroid, z.algebroid()) {
            return Err(CalculusError::Mismatch);
        }
        let mut acc = Acc::default();
        for (idx, f) in &self.terms {
            for (p, &a) in idx.iter().enumerate() {
                let za = z.coeff(a);
                if za.is_literal_zero() {
                    continue;
                }
                let mut rest = idx.clone();
                rest.remove(p);
                acc.push(rest, if p % 2 == 1 { -(za * f) } else { za * f });
            }
        }
        Ok(KForm { algebroid: self.algebroid.clone(), degree: self.degree - 1, terms: acc.finish() })
    }

    /// `L_Z = i_Z d + d i_Z`.
    pub fn lie_derive(&self, z: &Section) -> Result<KForm, CalculusError> {
        let first = self.d().contract(z)?;
        if self.degree == 0 {
            return Ok(first);
        }
        Ok(first + self.contract(z)?.d())
    }

    /// `ω(Z1, …, Zk)`.
    pub fn evaluate(&self, sections: &[Section]) -> Result<Expr, CalculusError> {
        if sections.len() != self.degree {
            return Err(CalculusError::Arity { expected: self.degree, found: sections.len() });
        }
        let mut w = self.clone();
        for s in sections {
            w = w.contract(s)?;
        }
        Ok(w.coeff(&[]))
    }

    pub fn is_zero(&self, zt: &ZeroTest) -> Zeroness {
        combine(self.terms.values().map(|c| zt.check(c)))
    }

    /// Substitute into every coefficient.
    pub fn substitute(&self, map: &std::collections::HashMap<String, Expr>) -> KForm {
        KForm::from_terms(&self.algebroid, self.degree, self.terms.iter().map(|(k, v)| (k.clone(), v.substitute(map))))
    }
}

impl std::ops::Add for KForm {
    type Output = KForm;
    fn add(self, rhs: KForm) -> KForm {
        assert!(same(&self.algebroid, &rhs.algebroid), "adding forms on different algebroids");
        assert_eq!(self.degree, rhs.degree, "adding forms of different degree");
        let terms = self.terms.into_iter().chain(rhs.terms);
        KForm::from_terms(&self.algebroid, self.degree, terms)
    }
}

impl std::ops::Neg for KForm {
    type Output = KForm;
    fn neg(self) -> KForm {
        self.scale(&Expr::int(-1))
    }
}

impl std::ops::Sub for KForm {
    type Output = KForm;
    fn sub(self, rhs: KForm) -> KForm {
        self + (-rhs)
    }
}

impl std::fmt::Display for KForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let frame = self.algebroid.frame();
        for (k, (idx, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if idx.is_empty() {
                write!(f, "{c}")?;
            } else {
                let names: Vec<String> = idx.iter().map(|&i| format!("{}*", frame[i])).collect();
                write!(f, "({c}) {}", names.join("^"))?;
            }
        }
        Ok(())
    }
}

/// Another coframe `ϑ^A = M^A_a e^a` and its dual frame `Ẑ_A = N^a_A e_a`
/// with `N = M⁻¹`.
#[derive(Debug, Clone)]
pub struct Coframe {
    algebroid: Arc<VectorAlgebroid>,
    forms: Vec<KForm>,
    dual: Vec<Section>,
}

/// Determinants below this magnitude count as singular.
pub const SINGULAR_DET: f64 = 1e-10;

impl Coframe {
    /// `rows[A][a] = M^A_a`. Rejects matrices whose determinant vanishes at a
    /// sample point of `zt`'s domain, or that cannot be inverted symbolically.
    pub fn new(algebroid: &Arc<VectorAlgebroid>, rows: Vec<Vec<Expr>>, zt: &ZeroTest) -> Result<Self, CalculusError> {
        let n = algebroid.rank();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(CalculusError::Arity { expected: n, found: rows.len() });
        }
        let vars: Vec<String> = rows.iter().flatten().flat_map(|e| e.free_vars()).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        let compiled: Vec<Vec<_>> = rows
            .iter()
            .map(|r| r.iter().map(|e| e.compile(&vars).expect("all variables slotted")).collect())
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(zt.seed);
        let mut point = vec![0.0; vars.len()];
        for _ in 0..zt.samples {
            for (slot, name) in point.iter_mut().zip(&vars) {
                let (lo, hi) = zt.domain.range(name);
                *slot = if hi > lo { rng.gen_range(lo..hi) } else { lo };
            }
            let m: Result<Vec<Vec<f64>>, _> =
                compiled.iter().map(|r| r.iter().map(|c| c.eval(&point)).collect()).collect();
            let Ok(m) = m else { continue };
            if linalg::determinant(&m).abs() <= SINGULAR_DET {
                return Err(CalculusError::Singular { point: Some(vars.iter().cloned().zip(point.iter().copied()).collect()) });
            }
        }
        let inv = linalg::invert(&rows).ok_or(CalculusError::Singular { point: None })?;
        let forms = rows
            .iter()
            .map(|r| KForm::from_terms(algebroid, 1, r.iter().enumerate().map(|(a, e)| (vec![a], e.clone()))))
            .collect();
        let dual = (0..n)
            .map(|big| Section::new(algebroid, (0..n).map(|a| inv[a][big].clone()).collect()).expect("rank matches"))
            .collect();
        Ok(Coframe { algebroid: algebroid.clone(), forms, dual })
    }

    pub fn form(&self, big: usize) -> &KForm {
        &self.forms[big]
    }

    pub fn dual(&self, big: usize) -> &Section {
        &self.dual[big]
    }

    /// Coefficients of `ω` on the increasing wedges `ϑ^J`.
    pub fn express(&self, omega: &KForm) -> Result<BTreeMap<Vec<usize>, Expr>, CalculusError> {
        if !same(&self.algebroid, omega.algebroid()) {
            return Err(CalculusError::Mismatch);
        }
        let n = self.forms.len();
        let mut out = BTreeMap::new();
        for idx in increasing(n, omega.degree()) {
            let secs: Vec<Section> = idx.iter().map(|&i| self.dual[i].clone()).collect();
            let c = omega.evaluate(&secs)?.simplify();
            if !c.is_literal_zero() {
                out.insert(idx, c);
            }
        }
        Ok(out)
    }

    /// `Σ_J c_J ϑ^J` back in the standard coframe; `J` may be unsorted.
    pub fn assemble(&self, degree: usize, coeffs: impl IntoIterator<Item = (Vec<usize>, Expr)>) -> KForm {
        let mut out = KForm::zero(&self.algebroid, degree);
        for (idx, c) in coeffs {
            let mut w = KForm::function(&self.algebroid, c);
            for &i in &idx {
                w = w.wedge(&self.forms[i]);
            }
            out = out + w;
        }
        out
    }
}

/// All increasing multi-indices of length `k` from `0..n`.
pub fn increasing(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}
