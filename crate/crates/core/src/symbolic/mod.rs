//! Exact scalar computer algebra over rational functions in declared
//! symbols, extended by exponentials of polynomials.

mod ast;
mod eval;
mod expr;
mod gcd;
mod parse;
mod poly;
mod spec;

use thiserror::Error;

pub use ast::{render, Ast};
pub use eval::{
    cross_check_zero, evaluate_ast, evaluate_exact, evaluate_numeric, to_f64, Assignment, SurrogateEvaluator,
    DEFAULT_DIGITS,
};
pub use expr::{constant_sign, Expr};
pub use gcd::gcd;
pub use parse::{parse_ast, parse_expr, undeclared_symbols};
pub use poly::{Atom, Monomial, Poly, Rational};
pub use spec::{DerivationSpec, SymbolKind};

pub use dashu_float::DBig;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymbolicError {
    #[error("syntax error at column {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("invalid declaration: {0}")]
    InvalidDeclaration(String),
    #[error("direction index out of range for dimension {0}")]
    DirectionOutOfRange(usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("exponential argument must be a polynomial without exponentials, got `{0}`")]
    NonPolynomialExponent(String),
    #[error("no value assigned to `{0}`")]
    MissingAssignment(String),
}

/// Outcome of an exact zero test; a nonzero result carries its normal form.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroTest {
    pub zero: bool,
    pub witness: Option<Expr>,
}

/// Decide `e = 0` by its normal form.
pub fn is_zero(e: &Expr) -> ZeroTest {
    if e.is_zero() {
        ZeroTest {
            zero: true,
            witness: None,
        }
    } else {
        ZeroTest {
            zero: false,
            witness: Some(e.clone()),
        }
    }
}

/// Partial derivative along base direction `direction`.
pub fn differentiate(e: &Expr, direction: usize, spec: &DerivationSpec) -> Result<Expr, SymbolicError> {
    spec.differentiate(e, direction)
}
