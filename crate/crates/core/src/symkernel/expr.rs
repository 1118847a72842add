//! Expression trees.
//!
//! Two kinds of trees share one node type. *Raw* trees come straight from the
//! parser and mirror the source text. *Canonical* trees are produced by the
//! smart constructors ([`Expr::add_all`], [`Expr::mul_all`], [`Expr::pow`],
//! [`Expr::func`]) and by the arithmetic operators; [`Expr::simplify`] turns a
//! raw tree into a canonical one by rebuilding it bottom-up.
//!
//! Canonical form:
//! - sums are flat, have at least two terms, at most one numeric term, and
//!   like terms are merged with their numeric coefficients added;
//! - products are flat, have at most one (leading) numeric factor, and repeated
//!   bases are merged by adding exponents;
//! - a numeric coefficient times a single sum is distributed;
//! - `e^0 = 1`, `e^1 = e`, `0 * e = 0`;
//! - children of sums and products are sorted by the structural order.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops;
use std::sync::Arc;

use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::number::{Number, Rational};

/// The elementary functions of the expression language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 6] = [Func::Sin, Func::Cos, Func::Tan, Func::Exp, Func::Log, Func::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Node {
    Num(Number),
    Var(Arc<str>),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, Rational),
    Func(Func, Expr),
}

/// An immutable, cheaply clonable scalar expression.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Expr(Arc<Node>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl Expr {
    pub fn from_node(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn num(n: impl Into<Number>) -> Self {
        Expr::from_node(Node::Num(n.into()))
    }

    pub fn int(n: i64) -> Self {
        Expr::num(Number::int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Expr::num(Number::ratio(n, d))
    }

    pub fn float(v: f64) -> Self {
        Expr::num(Number::from_f64(v))
    }

    pub fn zero() -> Self {
        Expr::int(0)
    }

    pub fn one() -> Self {
        Expr::int(1)
    }

    pub fn var(name: &str) -> Self {
        Expr::from_node(Node::Var(Arc::from(name)))
    }

    pub fn as_number(&self) -> Option<Number> {
        match self.node() {
            Node::Num(n) => Some(*n),
            _ => None,
        }
    }

    /// True for the literal constant 0 (no sampling involved).
    pub fn is_literal_zero(&self) -> bool {
        self.as_number().is_some_and(Number::is_zero)
    }

    pub fn is_literal_one(&self) -> bool {
        self.as_number().is_some_and(Number::is_one)
    }

    // ---- raw constructors (no canonicalisation) ----

    pub fn raw_add(terms: Vec<Expr>) -> Self {
        Expr::from_node(Node::Add(terms))
    }

    pub fn raw_mul(factors: Vec<Expr>) -> Self {
        Expr::from_node(Node::Mul(factors))
    }

    pub fn raw_pow(base: Expr, exp: Rational) -> Self {
        Expr::from_node(Node::Pow(base, exp))
    }

    pub fn raw_func(f: Func, arg: Expr) -> Self {
        Expr::from_node(Node::Func(f, arg))
    }

    // ---- canonical constructors ----

    pub fn add_all<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        let mut constant = Number::zero();
        let mut collected: BTreeMap<Expr, Number> = BTreeMap::new();
        for t in terms {
            push_term(&t, &mut constant, &mut collected);
        }
        let mut out = Vec::with_capacity(collected.len() + 1);
        if !constant.is_zero() {
            out.push(Expr::num(constant));
        }
        for (rest, c) in collected {
            if c.is_zero() {
                continue;
            }
            out.push(with_coefficient(c, rest));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => {
                out.sort();
                Expr::raw_add(out)
            }
        }
    }

    pub fn mul_all<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        let mut pending: Vec<Expr> = factors.into_iter().collect();
        // A merged exponent can turn `b^(1/2) * b^(1/2)` into a product or a
        // number that must be folded again; a couple of passes always settle.
        loop {
            let mut coeff = Number::one();
            let mut bases: BTreeMap<Expr, Rational> = BTreeMap::new();
            for f in &pending {
                push_factor(f, &mut coeff, &mut bases);
            }
            if coeff.is_zero() {
                return Expr::zero();
            }
            let mut rebuilt = Vec::with_capacity(bases.len());
            let mut unsettled = false;
            for (base, exp) in bases {
                if exp.is_zero() {
                    continue;
                }
                let f = Expr::pow(base, exp);
                if matches!(f.node(), Node::Num(_) | Node::Mul(_)) {
                    unsettled = true;
                }
                rebuilt.push(f);
            }
            if unsettled {
                rebuilt.push(Expr::num(coeff));
                pending = rebuilt;
                continue;
            }
            rebuilt.sort();
            if rebuilt.is_empty() {
                return Expr::num(coeff);
            }
            if coeff.is_one() {
                if rebuilt.len() == 1 {
                    return rebuilt.pop().unwrap();
                }
                return Expr::raw_mul(rebuilt);
            }
            if rebuilt.len() == 1 {
                if let Node::Add(terms) = rebuilt[0].node() {
                    let c = Expr::num(coeff);
                    return Expr::add_all(terms.iter().map(|t| Expr::mul_all([c.clone(), t.clone()])));
                }
            }
            rebuilt.insert(0, Expr::num(coeff));
            return Expr::raw_mul(rebuilt);
        }
    }

    pub fn pow(base: Expr, exp: Rational) -> Expr {
        if exp.is_zero() {
            return Expr::one();
        }
        if exp.is_one() {
            return base;
        }
        match base.node() {
            Node::Num(c) => {
                if exp.is_integer() {
                    if let Some(v) = exp.to_integer().to_i64().and_then(|e| c.powi(e)) {
                        return Expr::num(v);
                    }
                } else if c.is_one() {
                    return Expr::one();
                } else if let Number::Float(v) = c {
                    if *v >= 0.0 {
                        let r = v.powf(exp.to_f64().unwrap_or(f64::NAN));
                        if r.is_finite() {
                            return Expr::float(r);
                        }
                    }
                }
                Expr::raw_pow(base, exp)
            }
            Node::Pow(inner, q) if exp.is_integer() => Expr::pow(inner.clone(), q * exp),
            Node::Mul(fs) if exp.is_integer() => {
                Expr::mul_all(fs.iter().map(|f| Expr::pow(f.clone(), exp)))
            }
            _ => Expr::raw_pow(base, exp),
        }
    }

    pub fn powi(base: Expr, exp: i64) -> Expr {
        Expr::pow(base, Rational::from_integer(exp))
    }

    pub fn func(f: Func, arg: Expr) -> Expr {
        if let Some(c) = arg.as_number() {
            if let Some(v) = fold_function(f, c) {
                return Expr::num(v);
            }
        }
        Expr::raw_func(f, arg)
    }

    pub fn sin(arg: Expr) -> Expr {
        Expr::func(Func::Sin, arg)
    }

    pub fn cos(arg: Expr) -> Expr {
        Expr::func(Func::Cos, arg)
    }

    pub fn exp(arg: Expr) -> Expr {
        Expr::func(Func::Exp, arg)
    }

    pub fn log(arg: Expr) -> Expr {
        Expr::func(Func::Log, arg)
    }

    pub fn sqrt(arg: Expr) -> Expr {
        Expr::func(Func::Sqrt, arg)
    }

    pub fn recip(&self) -> Expr {
        Expr::powi(self.clone(), -1)
    }

    /// Canonicalise by rebuilding bottom-up with the smart constructors.
    pub fn simplify(&self) -> Expr {
        self.map_rebuild(&mut |_| None)
    }

    /// Replace variables by expressions, then canonicalise.
    pub fn substitute(&self, map: &HashMap<String, Expr>) -> Expr {
        self.map_rebuild(&mut |name| map.get(name).cloned())
    }

    fn map_rebuild(&self, leaf: &mut dyn FnMut(&str) -> Option<Expr>) -> Expr {
        match self.node() {
            Node::Num(_) => self.clone(),
            Node::Var(v) => leaf(v).unwrap_or_else(|| self.clone()),
            Node::Add(ts) => Expr::add_all(ts.iter().map(|t| t.map_rebuild(leaf)).collect::<Vec<_>>()),
            Node::Mul(fs) => Expr::mul_all(fs.iter().map(|f| f.map_rebuild(leaf)).collect::<Vec<_>>()),
            Node::Pow(b, p) => Expr::pow(b.map_rebuild(leaf), *p),
            Node::Func(f, a) => Expr::func(*f, a.map_rebuild(leaf)),
        }
    }

    /// Fully distribute products over sums and expand non-negative integer
    /// powers of sums. Returns `None` when the result would exceed
    /// `max_terms` terms.
    pub fn expand(&self, max_terms: usize) -> Option<Expr> {
        let terms = expand_terms(&self.simplify(), max_terms)?;
        Some(Expr::add_all(terms))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self.node() {
            Node::Num(_) => {}
            Node::Var(v) => {
                out.insert(v.to_string());
            }
            Node::Add(xs) | Node::Mul(xs) => xs.iter().for_each(|x| x.collect_vars(out)),
            Node::Pow(b, _) => b.collect_vars(out),
            Node::Func(_, a) => a.collect_vars(out),
        }
    }

    pub fn depends_on(&self, name: &str) -> bool {
        match self.node() {
            Node::Num(_) => false,
            Node::Var(v) => &**v == name,
            Node::Add(xs) | Node::Mul(xs) => xs.iter().any(|x| x.depends_on(name)),
            Node::Pow(b, _) => b.depends_on(name),
            Node::Func(_, a) => a.depends_on(name),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Num(_) | Node::Var(_) => 1,
            Node::Add(xs) | Node::Mul(xs) => 1 + xs.iter().map(Expr::size).sum::<usize>(),
            Node::Pow(b, _) => 1 + b.size(),
            Node::Func(_, a) => 1 + a.size(),
        }
    }
}

fn split_coefficient(e: &Expr) -> (Number, Option<Expr>) {
    match e.node() {
        Node::Num(c) => (*c, None),
        Node::Mul(fs) => match fs.first().and_then(Expr::as_number) {
            Some(c) => {
                let rest = if fs.len() == 2 {
                    fs[1].clone()
                } else {
                    Expr::raw_mul(fs[1..].to_vec())
                };
                (c, Some(rest))
            }
            None => (Number::one(), Some(e.clone())),
        },
        _ => (Number::one(), Some(e.clone())),
    }
}

fn push_term(t: &Expr, constant: &mut Number, collected: &mut BTreeMap<Expr, Number>) {
    if let Node::Add(inner) = t.node() {
        for x in inner {
            push_term(x, constant, collected);
        }
        return;
    }
    // Raw input may hide sums inside unsimplified products; canonical inputs
    // never do, so this only costs a match.
    match split_coefficient(t) {
        (c, None) => *constant = *constant + c,
        (c, Some(rest)) => {
            if c.is_zero() {
                return;
            }
            if let Node::Add(inner) = rest.node() {
                let k = Expr::num(c);
                for x in inner {
                    push_term(&Expr::mul_all([k.clone(), x.clone()]), constant, collected);
                }
                return;
            }
            let slot = collected.entry(rest).or_insert_with(Number::zero);
            *slot = *slot + c;
        }
    }
}

fn with_coefficient(c: Number, rest: Expr) -> Expr {
    if c.is_one() {
        return rest;
    }
    match rest.node() {
        Node::Mul(fs) => {
            let mut v = Vec::with_capacity(fs.len() + 1);
            v.push(Expr::num(c));
            v.extend(fs.iter().cloned());
            Expr::raw_mul(v)
        }
        _ => Expr::raw_mul(vec![Expr::num(c), rest]),
    }
}

fn push_factor(f: &Expr, coeff: &mut Number, bases: &mut BTreeMap<Expr, Rational>) {
    match f.node() {
        Node::Num(c) => *coeff = *coeff * *c,
        Node::Mul(fs) => fs.iter().for_each(|x| push_factor(x, coeff, bases)),
        Node::Pow(b, p) => {
            let slot = bases.entry(b.clone()).or_insert_with(Rational::zero);
            *slot += *p;
        }
        _ => {
            let slot = bases.entry(f.clone()).or_insert_with(Rational::zero);
            *slot += Rational::one();
        }
    }
}

fn fold_function(f: Func, c: Number) -> Option<Number> {
    match c {
        Number::Rational(r) => {
            if r.is_zero() {
                return match f {
                    Func::Sin | Func::Tan | Func::Sqrt => Some(Number::zero()),
                    Func::Cos | Func::Exp => Some(Number::one()),
                    Func::Log => None,
                };
            }
            match f {
                Func::Log if r.is_one() => Some(Number::zero()),
                Func::Sqrt if r.is_positive() => {
                    let n = exact_isqrt(*r.numer())?;
                    let d = exact_isqrt(*r.denom())?;
                    Some(Number::ratio(n, d))
                }
                _ => None,
            }
        }
        Number::Float(v) => {
            let r = match f {
                Func::Sin => v.sin(),
                Func::Cos => v.cos(),
                Func::Tan => v.tan(),
                Func::Exp => v.exp(),
                Func::Log if v > 0.0 => v.ln(),
                Func::Sqrt if v >= 0.0 => v.sqrt(),
                _ => return None,
            };
            r.is_finite().then(|| Number::from_f64(r))
        }
    }
}

fn exact_isqrt(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let r = n.sqrt();
    (r * r == n).then_some(r)
}

fn expand_terms(e: &Expr, max_terms: usize) -> Option<Vec<Expr>> {
    match e.node() {
        Node::Add(ts) => {
            let mut out = Vec::new();
            for t in ts {
                out.extend(expand_terms(t, max_terms)?);
                if out.len() > max_terms {
                    return None;
                }
            }
            Some(out)
        }
        Node::Mul(fs) => {
            let mut acc = vec![Expr::one()];
            for f in fs {
                let parts = expand_terms(f, max_terms)?;
                if acc.len() * parts.len() > max_terms {
                    return None;
                }
                let mut next = Vec::with_capacity(acc.len() * parts.len());
                for a in &acc {
                    for p in &parts {
                        next.push(Expr::mul_all([a.clone(), p.clone()]));
                    }
                }
                acc = next;
            }
            Some(acc)
        }
        Node::Pow(b, p) if p.is_integer() && p.is_positive() && matches!(b.node(), Node::Add(_)) => {
            let n = p.to_integer();
            let parts = expand_terms(b, max_terms)?;
            let mut acc = vec![Expr::one()];
            for _ in 0..n {
                if acc.len() * parts.len() > max_terms {
                    return None;
                }
                let mut next = Vec::with_capacity(acc.len() * parts.len());
                for a in &acc {
                    for q in &parts {
                        next.push(Expr::mul_all([a.clone(), q.clone()]));
                    }
                }
                // Merge like terms as we go to keep the intermediate small.
                acc = match Expr::add_all(next).node() {
                    Node::Add(ts) => ts.clone(),
                    _ => vec![Expr::add_all(Vec::<Expr>::new())],
                };
                if acc.len() == 1 && acc[0].is_literal_zero() {
                    return Some(acc);
                }
            }
            Some(acc)
        }
        _ => Some(vec![e.clone()]),
    }
}

// ---- operators (always canonicalising) ----

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl ops::$trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs.clone())
            }
        }
        impl ops::$trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs)
            }
        }
        impl ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs.clone())
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::add_all([a, b]));
binop!(Sub, sub, |a, b| Expr::add_all([a, Expr::mul_all([Expr::int(-1), b])]));
binop!(Mul, mul, |a, b| Expr::mul_all([a, b]));
binop!(Div, div, |a, b| Expr::mul_all([a, Expr::powi(b, -1)]));

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul_all([Expr::int(-1), self])
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -(self.clone())
    }
}

impl From<i64> for Expr {
    fn from(v: i64) -> Self {
        Expr::int(v)
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::add_all(iter)
    }
}

impl std::iter::Product for Expr {
    fn product<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::mul_all(iter)
    }
}

// ---- printing ----
//
// The printer emits text accepted by the parser. Precedence levels:
// sum 1, product 2, power 3, atom 4.

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const POWER: u8 = 3;
const ATOM: u8 = 4;

fn number_prec(n: Number) -> u8 {
    if n.is_negative() {
        SUM
    } else if n.is_integer() || matches!(n, Number::Float(_)) {
        ATOM
    } else {
        PRODUCT
    }
}

/// Leading numeric factor of a product, if negative, split off for printing.
fn negated_for_print(e: &Expr) -> Option<Expr> {
    match e.node() {
        Node::Num(c) if c.is_negative() => Some(Expr::from_node(Node::Num(-*c))),
        Node::Mul(fs) => {
            let c = fs.first()?.as_number()?;
            if !c.is_negative() {
                return None;
            }
            let c = -c;
            let mut rest: Vec<Expr> = fs[1..].to_vec();
            if !c.is_one() {
                rest.insert(0, Expr::from_node(Node::Num(c)));
            }
            Some(match rest.len() {
                0 => Expr::one(),
                1 => rest.pop().unwrap(),
                _ => Expr::raw_mul(rest),
            })
        }
        _ => None,
    }
}

fn prec(e: &Expr) -> u8 {
    match e.node() {
        Node::Num(n) => number_prec(*n),
        Node::Var(_) | Node::Func(..) => ATOM,
        Node::Add(ts) if ts.len() == 1 => prec(&ts[0]),
        Node::Add(ts) if ts.is_empty() => ATOM,
        Node::Add(_) => SUM,
        Node::Mul(fs) if fs.is_empty() => ATOM,
        Node::Mul(_) => {
            if negated_for_print(e).is_some() {
                SUM
            } else {
                PRODUCT
            }
        }
        Node::Pow(_, p) if p.is_negative() => PRODUCT,
        Node::Pow(..) => POWER,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if prec(e) < min {
        write!(f, "(")?;
        write_expr(f, e)?;
        write!(f, ")")
    } else {
        write_expr(f, e)
    }
}

fn write_exponent(f: &mut fmt::Formatter<'_>, p: Rational) -> fmt::Result {
    if p.is_integer() && !p.is_negative() {
        write!(f, "^{}", p.numer())
    } else if p.is_integer() {
        write!(f, "^({})", p.numer())
    } else {
        write!(f, "^({}/{})", p.numer(), p.denom())
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e.node() {
        Node::Num(n) => write!(f, "{n}"),
        Node::Var(v) => write!(f, "{v}"),
        Node::Func(func, a) => {
            write!(f, "{}(", func.name())?;
            write_expr(f, a)?;
            write!(f, ")")
        }
        Node::Pow(b, p) if p.is_negative() => {
            write!(f, "1/")?;
            write_at(f, b, ATOM)?;
            if !(-*p).is_one() {
                write_exponent(f, -*p)?;
            }
            Ok(())
        }
        Node::Pow(b, p) => {
            write_at(f, b, ATOM)?;
            write_exponent(f, *p)
        }
        Node::Add(ts) => {
            if ts.is_empty() {
                return write!(f, "0");
            }
            write_at(f, &ts[0], SUM)?;
            for t in &ts[1..] {
                match negated_for_print(t) {
                    Some(n) => {
                        write!(f, " - ")?;
                        write_at(f, &n, PRODUCT)?;
                    }
                    None => {
                        write!(f, " + ")?;
                        write_at(f, t, PRODUCT)?;
                    }
                }
            }
            Ok(())
        }
        Node::Mul(fs) => {
            if fs.is_empty() {
                return write!(f, "1");
            }
            if let Some(n) = negated_for_print(e) {
                write!(f, "-")?;
                return write_at(f, &n, PRODUCT);
            }
            let mut num: Vec<Expr> = Vec::new();
            let mut den: Vec<Expr> = Vec::new();
            for x in fs {
                match x.node() {
                    Node::Num(Number::Rational(r)) if !r.is_integer() => {
                        if !r.numer().is_one() {
                            num.push(Expr::int(*r.numer()));
                        }
                        den.push(Expr::int(*r.denom()));
                    }
                    Node::Pow(b, p) if p.is_negative() => {
                        den.push(if (-*p).is_one() {
                            b.clone()
                        } else {
                            Expr::raw_pow(b.clone(), -*p)
                        });
                    }
                    _ => num.push(x.clone()),
                }
            }
            if num.is_empty() {
                write!(f, "1")?;
            }
            for (i, x) in num.iter().enumerate() {
                if i > 0 {
                    write!(f, "*")?;
                }
                write_at(f, x, POWER)?;
            }
            if !den.is_empty() {
                write!(f, "/")?;
                if den.len() == 1 {
                    write_at(f, &den[0], POWER)?;
                } else {
                    write!(f, "(")?;
                    for (i, x) in den.iter().enumerate() {
                        if i > 0 {
                            write!(f, "*")?;
                        }
                        write_at(f, x, POWER)?;
                    }
                    write!(f, ")")?;
                }
            }
            Ok(())
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::var("x")
    }

    fn y() -> Expr {
        Expr::var("y")
    }

    #[test]
    fn like_terms_cancel() {
        assert!((x() - x()).is_literal_zero());
        assert_eq!(x() + x(), Expr::int(2) * x());
        assert_eq!((x() * y()) - (y() * x()), Expr::zero());
    }

    #[test]
    fn powers_merge_and_vanish() {
        assert_eq!(x() * x(), Expr::powi(x(), 2));
        assert!((x() / x()).is_literal_one());
        assert_eq!(Expr::powi(Expr::powi(x(), 2), 3), Expr::powi(x(), 6));
        let h = Expr::pow(x(), Rational::new(1, 2));
        assert_eq!(h.clone() * h, x());
    }

    #[test]
    fn zero_annihilates_products() {
        assert!((Expr::zero() * Expr::log(x())).is_literal_zero());
    }

    #[test]
    fn numeric_coefficient_distributes_over_a_sum() {
        let s = x() + y();
        let e = Expr::int(-1) * s + x() + y();
        assert!(e.is_literal_zero());
    }

    #[test]
    fn expand_cancels_polynomial_identities() {
        let s = x() + y();
        let e = Expr::powi(s.clone(), 2) - x() * x() - Expr::int(2) * x() * y() - y() * y();
        assert!(e.expand(1000).unwrap().is_literal_zero());
        let e = s.clone() * (x() - y()) - (x() * x() - y() * y());
        assert!(e.expand(1000).unwrap().is_literal_zero());
    }

    #[test]
    fn function_folding() {
        assert!(Expr::sin(Expr::zero()).is_literal_zero());
        assert!(Expr::exp(Expr::zero()).is_literal_one());
        assert_eq!(Expr::sqrt(Expr::ratio(9, 4)), Expr::ratio(3, 2));
        assert!(matches!(Expr::sin(Expr::one()).node(), Node::Func(..)));
    }

    #[test]
    fn printing() {
        assert_eq!((-x()).to_string(), "-x");
        assert_eq!((Expr::ratio(1, 2) * x() * x()).to_string(), "x^2/2");
        assert_eq!((x() / y()).to_string(), "x/y");
        assert_eq!((x() - y()).to_string(), "x - y");
        assert_eq!(Expr::powi(x() + y(), -2).to_string(), "1/(x + y)^2");
        assert_eq!(Expr::pow(x(), Rational::new(1, 3)).to_string(), "x^(1/3)");
    }
}
