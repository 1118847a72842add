//! Recursive-descent parser for the expression language.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := base ('^' exponent)?
//! exponent := '-'? number | '(' '-'? number ('/' number)? ')'
//! base     := number | func '(' expr ')' | ident | '(' expr ')'
//! func     := 'sin' | 'cos' | 'tan' | 'exp' | 'log' | 'sqrt'
//! ```
//!
//! Numbers are decimal literals with an optional fraction and exponent
//! (`3`, `0.25`, `1e-3`); they become exact rationals whenever they fit.
//! Exponents must be rational. The parser returns a raw tree that mirrors
//! the input; call [`Expr::simplify`] for the canonical form.

use num_traits::{One, Zero};

use super::chart::Chart;
use super::expr::{Expr, Func};
use super::number::{Number, Rational};
use super::SymError;

pub fn parse(text: &str, chart: &Chart) -> Result<Expr, SymError> {
    parse_with(text, &|name| chart.contains(name))
}

/// Parse against an explicit list of admissible identifiers.
pub fn parse_in(text: &str, names: &[&str]) -> Result<Expr, SymError> {
    parse_with(text, &|name| names.contains(&name))
}

pub fn parse_with(text: &str, known: &dyn Fn(&str) -> bool) -> Result<Expr, SymError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, known };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    known: &'a dyn Fn(&str) -> bool,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> SymError {
        SymError::Syntax { offset: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), SymError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, SymError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                terms.push(negate(self.term()?));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::raw_add(terms) })
    }

    fn term(&mut self) -> Result<Expr, SymError> {
        let mut factors = vec![self.unary()?];
        loop {
            if self.eat(b'*') {
                factors.push(self.unary()?);
            } else if self.eat(b'/') {
                factors.push(Expr::raw_pow(self.unary()?, -Rational::one()));
            } else {
                break;
            }
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { Expr::raw_mul(factors) })
    }

    fn unary(&mut self) -> Result<Expr, SymError> {
        if self.eat(b'-') {
            return Ok(negate(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, SymError> {
        let base = self.base()?;
        if self.eat(b'^') {
            let exp = self.exponent()?;
            return Ok(Expr::raw_pow(base, exp));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Rational, SymError> {
        let value = if self.eat(b'(') {
            let neg = self.eat(b'-');
            let mut v = self.rational_literal()?;
            if self.eat(b'/') {
                let d = self.rational_literal()?;
                if d.is_zero() {
                    return Err(self.error("zero denominator in exponent"));
                }
                v /= d;
            }
            self.expect(b')')?;
            if neg {
                -v
            } else {
                v
            }
        } else {
            let neg = self.eat(b'-');
            let v = self.rational_literal()?;
            if neg {
                -v
            } else {
                v
            }
        };
        Ok(value)
    }

    fn rational_literal(&mut self) -> Result<Rational, SymError> {
        self.skip_ws();
        let at = self.pos;
        match self.number()? {
            Number::Rational(r) => Ok(r),
            Number::Float(_) => {
                self.pos = at;
                Err(self.error("exponent must be rational"))
            }
        }
    }

    fn number(&mut self) -> Result<Number, SymError> {
        self.skip_ws();
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let int_len = digits(self);
        let mut frac_len = 0;
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            frac_len = digits(self);
        }
        if int_len + frac_len == 0 {
            self.pos = start;
            return Err(self.error("expected a number"));
        }
        let mantissa_end = self.pos;
        let mut exp10: i64 = 0;
        if self.pos < self.src.len() && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            let neg = match self.src.get(self.pos) {
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                _ => false,
            };
            let es = self.pos;
            if digits(self) == 0 {
                // `2e` followed by something else: treat `e` as not part of the number.
                self.pos = save;
            } else {
                let text = std::str::from_utf8(&self.src[es..self.pos]).unwrap();
                exp10 = text.parse::<i64>().map_err(|_| self.error("exponent out of range"))?;
                if neg {
                    exp10 = -exp10;
                }
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let mantissa: String = std::str::from_utf8(&self.src[start..mantissa_end])
            .unwrap()
            .chars()
            .filter(|c| *c != '.')
            .collect();
        let exact = mantissa.parse::<i64>().ok().and_then(|m| {
            let shift = exp10 - frac_len as i64;
            let pow = 10i64.checked_pow(shift.unsigned_abs().try_into().ok()?)?;
            if shift >= 0 {
                m.checked_mul(pow).map(Rational::from_integer)
            } else {
                Some(Rational::new(m, pow))
            }
        });
        Ok(match exact {
            Some(r) => Number::Rational(r),
            None => Number::Float(text.parse::<f64>().map_err(|_| self.error("malformed number"))?),
        })
    }

    fn identifier(&mut self) -> Option<&str> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphabetic() || self.src[self.pos] == b'_') {
            self.pos += 1;
            while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                self.pos += 1;
            }
            Some(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
        } else {
            None
        }
    }

    fn base(&mut self) -> Result<Expr, SymError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Expr::num(self.number()?)),
            Some(_) => {
                let start = self.pos;
                let Some(name) = self.identifier().map(str::to_string) else {
                    return Err(self.error("unexpected character"));
                };
                if let Some(f) = Func::from_name(&name) {
                    if self.peek() == Some(b'(') {
                        self.pos += 1;
                        let arg = self.expr()?;
                        self.expect(b')')?;
                        return Ok(Expr::raw_func(f, arg));
                    }
                }
                if !(self.known)(&name) {
                    return Err(SymError::UnknownIdentifier { name, offset: start });
                }
                Ok(Expr::var(&name))
            }
        }
    }
}

fn negate(e: Expr) -> Expr {
    match e.as_number() {
        Some(n) => Expr::num(-n),
        None => Expr::raw_mul(vec![Expr::int(-1), e]),
    }
}
