//! A small computer-algebra kernel: expression trees, a text parser,
//! partial differentiation, canonical simplification, numeric evaluation and
//! sampling-based zero tests.

mod chart;
mod diff;
mod eval;
mod expr;
pub mod linalg;
mod number;
mod parse;
mod zero;

pub use chart::{Chart, Role};
pub use eval::{Compiled, EvalError};
pub use expr::{Expr, Func, Node};
pub use number::{Number, Rational};
pub use parse::{parse, parse_in, parse_with};
pub use zero::{is_zero, SampleBox, Witness, ZeroTest, Zeroness, DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOL};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate coordinate `{0}`")]
    DuplicateCoordinate(String),
    #[error("`{0}` is not a valid coordinate name")]
    BadCoordinate(String),
}
