//! Exact sparse multivariate polynomials over the rationals, with point and
//! interval evaluation, gradients and Hessians.

mod parse;
mod polynomial;

pub use parse::{parse_polynomial, parse_rational};
pub use polynomial::{rational_enclosure, CompiledPoly, Exponents, Polynomial, MAX_VARS};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("undeclared variable '{name}' at offset {offset}")]
    UndeclaredVariable { name: String, offset: usize },
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{0} variables requested, at most {MAX_VARS} are supported")]
    TooManyVariables(usize),
    #[error("non-finite coordinate")]
    NonFinite,
}
