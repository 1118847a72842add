//! Numeric constants: exact rationals with a binary64 fallback.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, One, Signed, ToPrimitive, Zero};

pub type Rational = Ratio<i64>;

/// A constant appearing in an expression.
///
/// Arithmetic stays exact while the operands are rational and the result fits
/// in `i64` numerator/denominator; anything else degrades to `f64`.
#[derive(Clone, Copy, Debug)]
pub enum Number {
    Rational(Rational),
    Float(f64),
}

impl Number {
    pub fn int(n: i64) -> Self {
        Number::Rational(Rational::from_integer(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Number::Rational(Rational::new(n, d))
    }

    pub fn zero() -> Self {
        Number::int(0)
    }

    pub fn one() -> Self {
        Number::int(1)
    }

    /// Integral finite floats are stored exactly.
    pub fn from_f64(v: f64) -> Self {
        if v.is_finite() && v.fract() == 0.0 && v.abs() < 9.0e15 {
            Number::int(v as i64)
        } else {
            Number::Float(v)
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Number::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Number::Float(f) => f,
        }
    }

    pub fn as_rational(self) -> Option<Rational> {
        match self {
            Number::Rational(r) => Some(r),
            Number::Float(_) => None,
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Number::Rational(r) => r.is_zero(),
            Number::Float(f) => f == 0.0,
        }
    }

    pub fn is_one(self) -> bool {
        match self {
            Number::Rational(r) => r.is_one(),
            Number::Float(f) => f == 1.0,
        }
    }

    pub fn is_negative(self) -> bool {
        match self {
            Number::Rational(r) => r.is_negative(),
            Number::Float(f) => f < 0.0,
        }
    }

    pub fn is_integer(self) -> bool {
        match self {
            Number::Rational(r) => r.is_integer(),
            Number::Float(_) => false,
        }
    }

    pub fn abs(self) -> Number {
        if self.is_negative() {
            -self
        } else {
            self
        }
    }

    /// `None` when raising zero to a negative power.
    pub fn powi(self, exp: i64) -> Option<Number> {
        if self.is_zero() && exp < 0 {
            return None;
        }
        match self {
            Number::Rational(r) => {
                let (base, e) = if exp < 0 { (r.recip(), -exp) } else { (r, exp) };
                let mut acc = Rational::one();
                for _ in 0..e {
                    match acc.checked_mul(&base) {
                        Some(v) => acc = v,
                        None => {
                            return Some(Number::Float(r.to_f64()?.powi(exp as i32)));
                        }
                    }
                }
                Some(Number::Rational(acc))
            }
            Number::Float(f) => Some(Number::Float(f.powi(exp as i32))),
        }
    }
}

impl std::ops::Add for Number {
    type Output = Number;

    fn add(self, other: Number) -> Number {
        match (self, other) {
            (Number::Rational(a), Number::Rational(b)) => match a.checked_add(&b) {
                Some(r) => Number::Rational(r),
                None => Number::Float(self.to_f64() + other.to_f64()),
            },
            _ => Number::Float(self.to_f64() + other.to_f64()),
        }
    }
}

impl std::ops::Mul for Number {
    type Output = Number;

    fn mul(self, other: Number) -> Number {
        match (self, other) {
            (Number::Rational(a), Number::Rational(b)) => match a.checked_mul(&b) {
                Some(r) => Number::Rational(r),
                None => Number::Float(self.to_f64() * other.to_f64()),
            },
            _ => Number::Float(self.to_f64() * other.to_f64()),
        }
    }
}

impl std::ops::Neg for Number {
    type Output = Number;

    fn neg(self) -> Number {
        match self {
            Number::Rational(r) => Number::Rational(-r),
            Number::Float(f) => Number::Float(-f),
        }
    }
}

impl From<i64> for Number {
    fn from(v: i64) -> Self {
        Number::int(v)
    }
}

impl From<Rational> for Number {
    fn from(v: Rational) -> Self {
        Number::Rational(v)
    }
}

impl PartialEq for Number {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Number {}

impl PartialOrd for Number {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Structural order: all rationals precede all floats. Used for canonical
/// term ordering, not for numeric comparison.
impl Ord for Number {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Number::Rational(a), Number::Rational(b)) => a.cmp(b),
            (Number::Float(a), Number::Float(b)) => a.total_cmp(b),
            (Number::Rational(_), Number::Float(_)) => Ordering::Less,
            (Number::Float(_), Number::Rational(_)) => Ordering::Greater,
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Rational(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Number::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Number::Float(v) => write!(f, "{v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_degrades_to_float() {
        let big = Number::int(i64::MAX / 2);
        let s = big + big + big;
        assert!(matches!(s, Number::Float(_)));
        assert!((s.to_f64() - 1.5 * (i64::MAX as f64)).abs() / s.to_f64() < 1e-12);
    }

    #[test]
    fn rational_powers_are_exact() {
        assert_eq!(Number::ratio(2, 3).powi(-2), Some(Number::ratio(9, 4)));
        assert_eq!(Number::zero().powi(-1), None);
    }

    #[test]
    fn integral_floats_become_rational() {
        assert_eq!(Number::from_f64(4.0), Number::int(4));
        assert!(matches!(Number::from_f64(0.25), Number::Float(_)));
    }
}
