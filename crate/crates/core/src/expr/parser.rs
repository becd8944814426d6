//! Recursive-descent parser for coefficient expressions.
//!
//! Precedence, loosest to tightest: `+ -`, `* /`, unary `-`, `^`.  Exponents
//! are rational constants, folded at parse time, so `kappa^2*(d1^2 + d2^2)`
//! works but `d1^d2` is rejected.  Constant subtrees of the forms
//! `Number/Number`, `-Number` and `Number^integer` fold immediately, which
//! keeps printing and reparsing structurally stable.

use num::rational::BigRational;
use num::traits::{Signed, ToPrimitive, Zero};
use std::collections::BTreeSet;

use super::ast::{ExprKind, ExprNode, FUNCTIONS};
use super::lexer::{lex, Token, TokenKind};
use super::ExprError;

/// Names visible to the parser: the ring dimension fixes which `d<j>` exist,
/// and `params` lists declared constants (including `kappa` when available).
#[derive(Clone, Debug)]
pub struct ParseContext {
    pub dim: usize,
    pub params: BTreeSet<String>,
}

impl ParseContext {
    pub fn new(dim: usize) -> Self {
        ParseContext {
            dim,
            params: BTreeSet::new(),
        }
    }

    pub fn with_params<I: IntoIterator<Item = String>>(dim: usize, params: I) -> Self {
        ParseContext {
            dim,
            params: params.into_iter().collect(),
        }
    }
}

pub fn parse_expr(input: &str, ctx: &ParseContext) -> Result<ExprNode, ExprError> {
    let tokens = lex(input)?;
    let mut p = Parser {
        tokens,
        cursor: 0,
        end: input.len(),
        ctx,
    };
    let node = p.parse_sum()?;
    if let Some(tok) = p.peek() {
        return Err(ExprError::Parse {
            pos: tok.pos,
            msg: format!("unexpected trailing {}", describe(&tok.kind)),
        });
    }
    Ok(node)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    cursor: usize,
    end: usize,
    ctx: &'a ParseContext,
}

fn describe(kind: &TokenKind) -> String {
    match kind {
        TokenKind::Number(v) => format!("number {v}"),
        TokenKind::Ident(s) => format!("identifier {s:?}"),
        TokenKind::Plus => "'+'".into(),
        TokenKind::Minus => "'-'".into(),
        TokenKind::Star => "'*'".into(),
        TokenKind::Slash => "'/'".into(),
        TokenKind::Caret => "'^'".into(),
        TokenKind::LParen => "'('".into(),
        TokenKind::RParen => "')'".into(),
    }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.cursor)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.cursor).cloned();
        if t.is_some() {
            self.cursor += 1;
        }
        t
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek().map(|t| &t.kind) == Some(kind) {
            self.cursor += 1;
            true
        } else {
            false
        }
    }

    fn here(&self) -> usize {
        self.peek().map(|t| t.pos).unwrap_or(self.end)
    }

    fn parse_sum(&mut self) -> Result<ExprNode, ExprError> {
        let mut node = self.parse_product()?;
        loop {
            if self.eat(&TokenKind::Plus) {
                let rhs = self.parse_product()?;
                let pos = node.pos;
                node = ExprNode::new(pos, ExprKind::Add(Box::new(node), Box::new(rhs)));
            } else if self.eat(&TokenKind::Minus) {
                let rhs = self.parse_product()?;
                let pos = node.pos;
                node = ExprNode::new(pos, ExprKind::Sub(Box::new(node), Box::new(rhs)));
            } else {
                break;
            }
        }
        Ok(node)
    }

    fn parse_product(&mut self) -> Result<ExprNode, ExprError> {
        let mut node = self.parse_unary()?;
        loop {
            if self.eat(&TokenKind::Star) {
                let rhs = self.parse_unary()?;
                let pos = node.pos;
                node = ExprNode::new(pos, ExprKind::Mul(Box::new(node), Box::new(rhs)));
            } else if self.eat(&TokenKind::Slash) {
                let op_pos = self.tokens[self.cursor - 1].pos;
                let rhs = self.parse_unary()?;
                node = fold_div(node, rhs, op_pos)?;
            } else {
                break;
            }
        }
        Ok(node)
    }

    fn parse_unary(&mut self) -> Result<ExprNode, ExprError> {
        if let Some(tok) = self.peek() {
            if tok.kind == TokenKind::Minus {
                let pos = tok.pos;
                self.cursor += 1;
                let inner = self.parse_unary()?;
                return Ok(fold_neg(inner, pos));
            }
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<ExprNode, ExprError> {
        let base = self.parse_atom()?;
        if !self.eat(&TokenKind::Caret) {
            return Ok(base);
        }
        let exp_pos = self.here();
        let exp_node = self.parse_exponent_operand()?;
        let exp = fold_to_rational(&exp_node).ok_or(ExprError::NonConstantExponent {
            pos: exp_pos,
        })?;
        fold_pow(base, exp, exp_pos)
    }

    /// The operand of `^`: a number, a negated operand, or a parenthesised
    /// expression.  Chained `^` needs explicit parentheses.
    fn parse_exponent_operand(&mut self) -> Result<ExprNode, ExprError> {
        if let Some(tok) = self.peek() {
            if tok.kind == TokenKind::Minus {
                let pos = tok.pos;
                self.cursor += 1;
                let inner = self.parse_exponent_operand()?;
                return Ok(fold_neg(inner, pos));
            }
        }
        self.parse_atom()
    }

    fn parse_atom(&mut self) -> Result<ExprNode, ExprError> {
        let tok = self.bump().ok_or(ExprError::Parse {
            pos: self.end,
            msg: "unexpected end of expression".into(),
        })?;
        match tok.kind {
            TokenKind::Number(v) => Ok(ExprNode::new(tok.pos, ExprKind::Number(v))),
            TokenKind::LParen => {
                let inner = self.parse_sum()?;
                if !self.eat(&TokenKind::RParen) {
                    return Err(ExprError::Parse {
                        pos: self.here(),
                        msg: "expected ')'".into(),
                    });
                }
                Ok(inner)
            }
            TokenKind::Ident(name) => self.resolve_ident(tok.pos, name),
            other => Err(ExprError::Parse {
                pos: tok.pos,
                msg: format!("expected a value, found {}", describe(&other)),
            }),
        }
    }

    fn resolve_ident(&mut self, pos: usize, name: String) -> Result<ExprNode, ExprError> {
        if name == "i" {
            return Ok(ExprNode::new(pos, ExprKind::ImaginaryUnit));
        }
        if let Some(&canonical) = FUNCTIONS.iter().find(|&&f| f == name) {
            if !self.eat(&TokenKind::LParen) {
                return Err(ExprError::Parse {
                    pos,
                    msg: format!("function {name} must be followed by '('"),
                });
            }
            let arg = self.parse_sum()?;
            if !self.eat(&TokenKind::RParen) {
                return Err(ExprError::Parse {
                    pos: self.here(),
                    msg: format!("expected ')' to close {name}(...)"),
                });
            }
            return Ok(ExprNode::new(pos, ExprKind::Call(canonical, Box::new(arg))));
        }
        if let Some(rest) = name.strip_prefix('d') {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                let index: usize = rest.parse().map_err(|_| ExprError::Parse {
                    pos,
                    msg: format!("variable index in {name} is too large"),
                })?;
                if index == 0 || index > self.ctx.dim {
                    return Err(ExprError::VarOutOfRange {
                        pos,
                        name,
                        dim: self.ctx.dim,
                    });
                }
                return Ok(ExprNode::new(pos, ExprKind::Var(index - 1)));
            }
        }
        if self.ctx.params.contains(&name) {
            return Ok(ExprNode::new(pos, ExprKind::Param(name)));
        }
        if self.peek().map(|t| &t.kind) == Some(&TokenKind::LParen) {
            return Err(ExprError::UnknownFunction { pos, name });
        }
        Err(ExprError::UnknownIdentifier { pos, name })
    }
}

fn fold_neg(inner: ExprNode, pos: usize) -> ExprNode {
    match inner.kind {
        ExprKind::Number(v) => ExprNode::new(pos, ExprKind::Number(-v)),
        _ => ExprNode::new(pos, ExprKind::Neg(Box::new(inner))),
    }
}

fn fold_div(lhs: ExprNode, rhs: ExprNode, op_pos: usize) -> Result<ExprNode, ExprError> {
    if let (ExprKind::Number(a), ExprKind::Number(b)) = (&lhs.kind, &rhs.kind) {
        if b.is_zero() {
            return Err(ExprError::DivisionByZero { pos: op_pos });
        }
        let pos = lhs.pos;
        return Ok(ExprNode::new(pos, ExprKind::Number(a / b)));
    }
    let pos = lhs.pos;
    Ok(ExprNode::new(pos, ExprKind::Div(Box::new(lhs), Box::new(rhs))))
}

fn fold_pow(base: ExprNode, exp: BigRational, exp_pos: usize) -> Result<ExprNode, ExprError> {
    if exp.is_integer() {
        let e = exp.to_integer();
        if e.magnitude().to_u64().map_or(true, |m| m > 4096) {
            return Err(ExprError::Parse {
                pos: exp_pos,
                msg: format!("integer exponent {e} is out of the supported range"),
            });
        }
        if let ExprKind::Number(v) = &base.kind {
            let m = e.magnitude().to_u64().unwrap() as u32;
            if v.is_zero() && e.is_negative() {
                return Err(ExprError::DivisionByZero { pos: exp_pos });
            }
            let mut powed = num::pow::pow(v.clone(), m as usize);
            if e.is_negative() {
                powed = powed.recip();
            }
            let pos = base.pos;
            return Ok(ExprNode::new(pos, ExprKind::Number(powed)));
        }
    }
    let pos = base.pos;
    Ok(ExprNode::new(pos, ExprKind::Pow(Box::new(base), exp)))
}

/// Fold a pure-number subtree to its rational value; `None` when the subtree
/// mentions anything besides literals and arithmetic.
fn fold_to_rational(node: &ExprNode) -> Option<BigRational> {
    match &node.kind {
        ExprKind::Number(v) => Some(v.clone()),
        _ => None,
    }
}
