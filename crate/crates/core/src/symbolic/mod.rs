//! Generalized polynomials (real exponents) and their quotients.
//!
//! Every quantity the engine manipulates symbolically is a finite sum of
//! power-law monomials or a quotient of two such sums. That class is closed
//! under addition, multiplication and partial differentiation, which is all
//! the curvature pipeline needs.

mod exponent;
mod parse;
mod poly;
mod rational;

pub use exponent::{Exponent, EXPONENT_TOLERANCE};
pub use parse::parse_poly;
pub use poly::{EvalPoint, GenPoly, Monomial, VarId, VarList, COEFF_DROP};
pub use rational::RationalExpr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymbolicError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` missing from evaluation point")]
    MissingVariable(String),
    #[error("variable `{name}` has non-positive value {value}")]
    NonPositiveBase { name: String, value: f64 },
    #[error("division by an expression that is identically zero")]
    DivisionByZeroExpression,
    #[error("invalid variable list: {0}")]
    InvalidVariables(String),
}
