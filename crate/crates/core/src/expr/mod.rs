//! A small expression language for coefficient series.
//!
//! Realization files and command-line constants are written in this grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' exponent)?
//! atom   := number | 'i' | 'd'<digits> | name | name '(' expr ')' | '(' expr ')'
//! ```
//!
//! Numbers are integers, fractions built with `/`, or decimal literals; all
//! become exact rationals.  `i` is the imaginary unit, `d1`, `d2`, ... are
//! the ring variables, and any other name must be a declared constant such as
//! `kappa`.  Exponents are rational constants folded at parse time.  The
//! function catalogue is `sqrt`, `exp`, `log`, `sin`, `cos`, `sinh`, `cosh`,
//! `tan`, `tanh` and `ucoth_sq` (the even generating function of
//! `v coth v` in the variable `w = v^2`).
//!
//! Division evaluates as exact series division, so quotients like
//! `(ucoth_sq(E) - 1)/(d1^2 + d2^2 + d3^2)` work whenever the numerator is
//! exactly divisible, at the cost of certified order.

mod ast;
mod eval;
mod lexer;
mod parser;
mod specfile;

pub use ast::{same_shape, ExprKind, ExprNode, FUNCTIONS};
pub use eval::{const_eval, eval_series, EvalContext};
pub use parser::{parse_expr, ParseContext};
pub use specfile::{fnv1a64, parse_spec_file, CEntry, PhiEntry, SpecError, SpecFile};

use crate::fps::FpsError;

/// Errors from parsing or evaluating expressions.  Positions are byte
/// offsets into the expression source.
#[derive(Debug, thiserror::Error)]
pub enum ExprError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown identifier {name:?} at byte {pos}")]
    UnknownIdentifier { pos: usize, name: String },
    #[error("unknown function {name:?} at byte {pos}")]
    UnknownFunction { pos: usize, name: String },
    #[error("{name} at byte {pos} is outside the declared dimension {dim}")]
    VarOutOfRange {
        pos: usize,
        name: String,
        dim: usize,
    },
    #[error("exponent at byte {pos} must be a rational constant")]
    NonConstantExponent { pos: usize },
    #[error("not a constant at byte {pos}: {msg}")]
    NotConstant { pos: usize, msg: String },
    #[error("division by zero at byte {pos}")]
    DivisionByZero { pos: usize },
    #[error("no value for constant {name:?}")]
    MissingParam { name: String },
    #[error("at byte {pos}: {source}")]
    EvalAt { pos: usize, source: FpsError },
}
