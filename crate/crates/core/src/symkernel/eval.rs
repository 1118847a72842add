//! Numeric evaluation, by name lookup or through a compiled slot layout.

use std::collections::HashMap;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use super::expr::{Expr, Func, Node};
use super::number::Rational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("domain error: {op} undefined at {arg}")]
    Domain { op: &'static str, arg: f64 },
    #[error("non-finite intermediate value")]
    NonFinite,
}

fn finite(v: f64) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite)
    }
}

fn apply_pow(b: f64, p: Rational) -> Result<f64, EvalError> {
    if p.is_integer() {
        if b == 0.0 && p.is_negative() {
            return Err(EvalError::Domain { op: "division", arg: b });
        }
        let e = p.to_integer();
        return finite(match e.to_i32() {
            Some(e) => b.powi(e),
            None => b.powf(e as f64),
        });
    }
    let pf = p.to_f64().unwrap_or(f64::NAN);
    if b == 0.0 {
        if p.is_negative() {
            return Err(EvalError::Domain { op: "division", arg: b });
        }
        return Ok(0.0);
    }
    if b < 0.0 {
        // Odd-denominator roots of negative numbers are real.
        if p.denom().is_odd() {
            let mag = (-b).powf(pf);
            let sign = if p.numer().is_odd() { -1.0 } else { 1.0 };
            return finite(sign * mag);
        }
        return Err(EvalError::Domain { op: "fractional power", arg: b });
    }
    finite(b.powf(pf))
}

fn apply_func(f: Func, a: f64) -> Result<f64, EvalError> {
    let v = match f {
        Func::Sin => a.sin(),
        Func::Cos => a.cos(),
        Func::Tan => {
            if a.cos() == 0.0 {
                return Err(EvalError::Domain { op: "tan", arg: a });
            }
            a.tan()
        }
        Func::Exp => a.exp(),
        Func::Log => {
            if a <= 0.0 {
                return Err(EvalError::Domain { op: "log", arg: a });
            }
            a.ln()
        }
        Func::Sqrt => {
            if a < 0.0 {
                return Err(EvalError::Domain { op: "sqrt", arg: a });
            }
            a.sqrt()
        }
    };
    finite(v)
}

impl Expr {
    /// Evaluate with a variable lookup. Never returns NaN.
    pub fn eval_with(&self, lookup: &dyn Fn(&str) -> Option<f64>) -> Result<f64, EvalError> {
        match self.node() {
            Node::Num(n) => finite(n.to_f64()),
            Node::Var(v) => lookup(v).ok_or_else(|| EvalError::Unbound(v.to_string())),
            Node::Add(ts) => {
                let mut s = 0.0;
                for t in ts {
                    s += t.eval_with(lookup)?;
                }
                finite(s)
            }
            Node::Mul(fs) => {
                let mut p = 1.0;
                for x in fs {
                    p *= x.eval_with(lookup)?;
                }
                finite(p)
            }
            Node::Pow(b, p) => apply_pow(b.eval_with(lookup)?, *p),
            Node::Func(f, a) => apply_func(*f, a.eval_with(lookup)?),
        }
    }

    pub fn eval(&self, point: &HashMap<String, f64>) -> Result<f64, EvalError> {
        self.eval_with(&|name| point.get(name).copied())
    }

    /// Evaluate at a point given as `(name, value)` pairs.
    pub fn eval_at(&self, point: &[(&str, f64)]) -> Result<f64, EvalError> {
        self.eval_with(&|name| point.iter().find(|(n, _)| *n == name).map(|(_, v)| *v))
    }

    /// Resolve variable names to slot indices once, for repeated evaluation.
    pub fn compile<S: AsRef<str>>(&self, slots: &[S]) -> Result<Compiled, EvalError> {
        Ok(Compiled(compile_node(self, slots)?))
    }
}

#[derive(Debug, Clone)]
enum CNode {
    Num(f64),
    Slot(usize),
    Add(Vec<CNode>),
    Mul(Vec<CNode>),
    Pow(Box<CNode>, Rational),
    Func(Func, Box<CNode>),
}

/// An expression with its variables bound to positions of a state slice.
#[derive(Debug, Clone)]
pub struct Compiled(CNode);

fn compile_node<S: AsRef<str>>(e: &Expr, slots: &[S]) -> Result<CNode, EvalError> {
    Ok(match e.node() {
        Node::Num(n) => CNode::Num(n.to_f64()),
        Node::Var(v) => CNode::Slot(
            slots
                .iter()
                .position(|s| s.as_ref() == &**v)
                .ok_or_else(|| EvalError::Unbound(v.to_string()))?,
        ),
        Node::Add(ts) => CNode::Add(ts.iter().map(|t| compile_node(t, slots)).collect::<Result<_, _>>()?),
        Node::Mul(fs) => CNode::Mul(fs.iter().map(|t| compile_node(t, slots)).collect::<Result<_, _>>()?),
        Node::Pow(b, p) => CNode::Pow(Box::new(compile_node(b, slots)?), *p),
        Node::Func(f, a) => CNode::Func(*f, Box::new(compile_node(a, slots)?)),
    })
}

fn run(n: &CNode, state: &[f64]) -> Result<f64, EvalError> {
    match n {
        CNode::Num(v) => Ok(*v),
        CNode::Slot(i) => finite(state[*i]),
        CNode::Add(ts) => {
            let mut s = 0.0;
            for t in ts {
                s += run(t, state)?;
            }
            finite(s)
        }
        CNode::Mul(fs) => {
            let mut p = 1.0;
            for f in fs {
                p *= run(f, state)?;
            }
            finite(p)
        }
        CNode::Pow(b, p) => apply_pow(run(b, state)?, *p),
        CNode::Func(f, a) => apply_func(*f, run(a, state)?),
    }
}

impl Compiled {
    pub fn eval(&self, state: &[f64]) -> Result<f64, EvalError> {
        run(&self.0, state)
    }
}
