use num_traits::One;

use super::expr::{Expr, Func, Node};
use super::number::Rational;

impl Expr {
    /// Symbolic partial derivative with respect to the variable `var`.
    /// Variables other than `var` are held constant.
    pub fn diff(&self, var: &str) -> Expr {
        if !self.depends_on(var) {
            return Expr::zero();
        }
        match self.node() {
            Node::Num(_) => Expr::zero(),
            Node::Var(v) => {
                if &**v == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Add(ts) => Expr::add_all(ts.iter().map(|t| t.diff(var)).collect::<Vec<_>>()),
            Node::Mul(fs) => {
                let mut terms = Vec::with_capacity(fs.len());
                for (i, fi) in fs.iter().enumerate() {
                    let di = fi.diff(var);
                    if di.is_literal_zero() {
                        continue;
                    }
                    let mut prod = Vec::with_capacity(fs.len());
                    prod.push(di);
                    prod.extend(fs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, f)| f.clone()));
                    terms.push(Expr::mul_all(prod));
                }
                Expr::add_all(terms)
            }
            Node::Pow(b, p) => {
                let db = b.diff(var);
                Expr::mul_all([Expr::num(*p), Expr::pow(b.clone(), p - Rational::one()), db])
            }
            Node::Func(f, a) => {
                let da = a.diff(var);
                let outer = match f {
                    Func::Sin => Expr::cos(a.clone()),
                    Func::Cos => -Expr::sin(a.clone()),
                    Func::Tan => Expr::powi(Expr::cos(a.clone()), -2),
                    Func::Exp => Expr::exp(a.clone()),
                    Func::Log => a.recip(),
                    Func::Sqrt => Expr::ratio(1, 2) * Expr::sqrt(a.clone()).recip(),
                };
                outer * da
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elementary_rules() {
        let x = Expr::var("x");
        assert!(Expr::int(7).diff("x").is_literal_zero());
        assert_eq!((Expr::powi(x.clone(), 2) / Expr::int(2)).diff("x"), x);
        assert_eq!(Expr::sin(x.clone()).diff("x"), Expr::cos(x.clone()));
        assert_eq!(Expr::log(x.clone()).diff("x"), x.recip());
        assert!(Expr::var("y").diff("x").is_literal_zero());
    }
}
