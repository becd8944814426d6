//! Syntax tree for coefficient expressions, with a printer whose output
//! parses back to a structurally identical tree.

use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use std::fmt;

/// Catalogue functions available inside expressions.
pub const FUNCTIONS: &[&str] = &[
    "sqrt", "exp", "log", "sin", "cos", "sinh", "cosh", "tan", "tanh", "ucoth_sq",
];

#[derive(Clone, Debug, PartialEq)]
pub struct ExprNode {
    /// Byte offset of the token this node started at, for error reporting.
    pub pos: usize,
    pub kind: ExprKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    /// Rational literal.  Negative values only arise from constant folding.
    Number(BigRational),
    ImaginaryUnit,
    /// Derivative variable `d<j+1>` (stored zero-based).
    Var(usize),
    /// Named constant: `kappa` or a declared parameter.
    Param(String),
    Add(Box<ExprNode>, Box<ExprNode>),
    Sub(Box<ExprNode>, Box<ExprNode>),
    Mul(Box<ExprNode>, Box<ExprNode>),
    Div(Box<ExprNode>, Box<ExprNode>),
    Neg(Box<ExprNode>),
    /// Power with an exponent pinned to a rational constant at parse time.
    Pow(Box<ExprNode>, BigRational),
    Call(&'static str, Box<ExprNode>),
}

impl ExprNode {
    pub fn new(pos: usize, kind: ExprKind) -> Self {
        ExprNode { pos, kind }
    }

    pub fn number(value: BigRational) -> Self {
        ExprNode::new(0, ExprKind::Number(value))
    }

    pub fn integer(value: i64) -> Self {
        Self::number(BigRational::from_integer(value.into()))
    }

    fn precedence(&self) -> u8 {
        match self.kind {
            ExprKind::Add(..) | ExprKind::Sub(..) => 1,
            ExprKind::Mul(..) | ExprKind::Div(..) => 2,
            ExprKind::Neg(..) => 3,
            ExprKind::Pow(..) => 4,
            ExprKind::Number(ref v) => {
                // a folded fraction prints with a '/' and binds like a
                // division; a folded negative integer prints with a leading
                // minus and binds like a negation
                if !v.denom().is_one() {
                    2
                } else if v.is_negative() {
                    3
                } else {
                    5
                }
            }
            _ => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let prec = self.precedence();
        let parens = prec < min_prec;
        if parens {
            write!(f, "(")?;
        }
        match &self.kind {
            ExprKind::Number(v) => {
                if v.denom().is_one() {
                    write!(f, "{}", v.numer())?;
                } else {
                    write!(f, "{}/{}", v.numer(), v.denom())?;
                }
            }
            ExprKind::ImaginaryUnit => write!(f, "i")?,
            ExprKind::Var(j) => write!(f, "d{}", j + 1)?,
            ExprKind::Param(name) => write!(f, "{name}")?,
            ExprKind::Add(l, r) => {
                l.fmt_prec(f, 1)?;
                write!(f, " + ")?;
                r.fmt_prec(f, 2)?;
            }
            ExprKind::Sub(l, r) => {
                l.fmt_prec(f, 1)?;
                write!(f, " - ")?;
                r.fmt_prec(f, 2)?;
            }
            ExprKind::Mul(l, r) => {
                l.fmt_prec(f, 2)?;
                write!(f, "*")?;
                r.fmt_prec(f, 3)?;
            }
            ExprKind::Div(l, r) => {
                l.fmt_prec(f, 2)?;
                write!(f, "/")?;
                r.fmt_prec(f, 3)?;
            }
            ExprKind::Neg(x) => {
                write!(f, "-")?;
                x.fmt_prec(f, 3)?;
            }
            ExprKind::Pow(base, exp) => {
                base.fmt_prec(f, 5)?;
                if exp.denom().is_one() && !exp.is_negative() {
                    write!(f, "^{}", exp.numer())?;
                } else if exp.denom().is_one() {
                    write!(f, "^-{}", exp.numer().magnitude())?;
                } else if exp.is_negative() {
                    write!(f, "^(-{}/{})", exp.numer().magnitude(), exp.denom())?;
                } else {
                    write!(f, "^({}/{})", exp.numer(), exp.denom())?;
                }
            }
            ExprKind::Call(name, arg) => {
                write!(f, "{name}(")?;
                arg.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for ExprNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Structural equality that ignores source positions; the printer discards
/// positions, so round-trip tests compare with this.
pub fn same_shape(a: &ExprNode, b: &ExprNode) -> bool {
    match (&a.kind, &b.kind) {
        (ExprKind::Number(x), ExprKind::Number(y)) => x == y,
        (ExprKind::ImaginaryUnit, ExprKind::ImaginaryUnit) => true,
        (ExprKind::Var(x), ExprKind::Var(y)) => x == y,
        (ExprKind::Param(x), ExprKind::Param(y)) => x == y,
        (ExprKind::Add(al, ar), ExprKind::Add(bl, br))
        | (ExprKind::Sub(al, ar), ExprKind::Sub(bl, br))
        | (ExprKind::Mul(al, ar), ExprKind::Mul(bl, br))
        | (ExprKind::Div(al, ar), ExprKind::Div(bl, br)) => {
            same_shape(al, bl) && same_shape(ar, br)
        }
        (ExprKind::Neg(x), ExprKind::Neg(y)) => same_shape(x, y),
        (ExprKind::Pow(xb, xe), ExprKind::Pow(yb, ye)) => xe == ye && same_shape(xb, yb),
        (ExprKind::Call(xn, xa), ExprKind::Call(yn, ya)) => xn == yn && same_shape(xa, ya),
        _ => false,
    }
}

impl ExprKind {
    /// Zero literal check used when filling defaulted grid entries.
    pub fn is_zero_literal(&self) -> bool {
        matches!(self, ExprKind::Number(v) if v.is_zero())
    }
}
