//! Tokeniser for the coefficient expression language.
//!
//! Tokens carry the byte offset they started at so parse errors can point
//! into the source line.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::One;

use super::ExprError;

#[derive(Clone, Debug, PartialEq)]
pub enum TokenKind {
    Number(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub pos: usize,
    pub kind: TokenKind,
}

pub fn lex(input: &str) -> Result<Vec<Token>, ExprError> {
    let bytes = input.as_bytes();
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let b = bytes[pos];
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                pos += 1;
            }
            b'+' => {
                tokens.push(Token { pos, kind: TokenKind::Plus });
                pos += 1;
            }
            b'-' => {
                tokens.push(Token { pos, kind: TokenKind::Minus });
                pos += 1;
            }
            b'*' => {
                tokens.push(Token { pos, kind: TokenKind::Star });
                pos += 1;
            }
            b'/' => {
                tokens.push(Token { pos, kind: TokenKind::Slash });
                pos += 1;
            }
            b'^' => {
                tokens.push(Token { pos, kind: TokenKind::Caret });
                pos += 1;
            }
            b'(' => {
                tokens.push(Token { pos, kind: TokenKind::LParen });
                pos += 1;
            }
            b')' => {
                tokens.push(Token { pos, kind: TokenKind::RParen });
                pos += 1;
            }
            b'0'..=b'9' => {
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                let mut value =
                    BigRational::from_integer(parse_digits(&input[start..pos]));
                if pos < bytes.len() && bytes[pos] == b'.' {
                    pos += 1;
                    let frac_start = pos;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    if pos == frac_start {
                        return Err(ExprError::Parse {
                            pos: start,
                            msg: "decimal point must be followed by digits".into(),
                        });
                    }
                    let frac = parse_digits(&input[frac_start..pos]);
                    let mut denom = BigInt::one();
                    for _ in frac_start..pos {
                        denom *= 10;
                    }
                    value += BigRational::new(frac, denom);
                }
                tokens.push(Token {
                    pos: start,
                    kind: TokenKind::Number(value),
                });
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = pos;
                while pos < bytes.len()
                    && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_')
                {
                    pos += 1;
                }
                tokens.push(Token {
                    pos: start,
                    kind: TokenKind::Ident(input[start..pos].to_string()),
                });
            }
            _ => {
                return Err(ExprError::Parse {
                    pos,
                    msg: format!("unexpected character {:?}", input[pos..].chars().next().unwrap()),
                });
            }
        }
    }
    Ok(tokens)
}

fn parse_digits(s: &str) -> BigInt {
    // only called on nonempty ASCII digit runs
    s.parse().unwrap()
}
