//! Line-oriented realization files.
//!
//! ```text
//! # su(2), flat-Laplacian form
//! dim 3
//! kappa = 1/2
//! param mu = 3/4
//! C 1 2 3 = 2*i*kappa
//! phi 1 1 = sqrt(1 + kappa^2*(d1^2 + d2^2 + d3^2))
//! phi 1 2 = i*kappa*d3
//! ```
//!
//! Sections must appear in the order `dim`, `kappa`, `param`, `C`, `phi`;
//! `#` starts a comment.  All indices are one-based.  `C i j k` is the
//! structure coefficient multiplying generator `k` in the bracket of
//! generators `i < j`; the antisymmetric partner is implied and writing it
//! is an error.  `phi r c` is the grid entry for coordinate row `r` and
//! generator column `c`; omitted entries default to the identity grid
//! (`1` on the diagonal, `0` elsewhere).

use std::collections::{BTreeMap, BTreeSet};

use super::ast::{same_shape, ExprNode, FUNCTIONS};
use super::eval::const_eval;
use super::parser::{parse_expr, ParseContext};
use super::ExprError;
use crate::fps::GaussRational;

/// One structure coefficient, indices zero-based with `i < j`.
#[derive(Clone, Debug, PartialEq)]
pub struct CEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: GaussRational,
}

/// One explicit grid entry, indices zero-based.
#[derive(Clone, Debug)]
pub struct PhiEntry {
    pub row: usize,
    pub col: usize,
    pub expr: ExprNode,
}

/// The parsed contents of a realization file.
#[derive(Clone, Debug)]
pub struct SpecFile {
    pub dim: usize,
    pub kappa: GaussRational,
    pub params: Vec<(String, GaussRational)>,
    pub c_entries: Vec<CEntry>,
    pub phi_entries: Vec<PhiEntry>,
}

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("{0}")]
    Structure(String),
}

const MAX_DIM: usize = 32;

fn default_entry(row: usize, col: usize) -> ExprNode {
    if row == col {
        ExprNode::integer(1)
    } else {
        ExprNode::integer(0)
    }
}

/// Human text for an expression error, with the position split out so the
/// caller can convert it to a line/column pair.
fn expr_err_parts(e: &ExprError) -> (Option<usize>, String) {
    match e {
        ExprError::Parse { pos, msg } => (Some(*pos), msg.clone()),
        ExprError::UnknownIdentifier { pos, name } => {
            (Some(*pos), format!("unknown identifier {name:?}"))
        }
        ExprError::UnknownFunction { pos, name } => {
            (Some(*pos), format!("unknown function {name:?}"))
        }
        ExprError::VarOutOfRange { pos, name, dim } => (
            Some(*pos),
            format!("{name} is outside the declared dimension {dim}"),
        ),
        ExprError::NonConstantExponent { pos } => {
            (Some(*pos), "exponent must be a rational constant".into())
        }
        ExprError::NotConstant { pos, msg } => (Some(*pos), msg.clone()),
        ExprError::DivisionByZero { pos } => (Some(*pos), "division by zero".into()),
        ExprError::MissingParam { name } => (None, format!("no value for constant {name:?}")),
        ExprError::EvalAt { pos, source } => (Some(*pos), source.to_string()),
    }
}

struct LineCtx {
    line: usize,
    rhs_offset: usize,
}

impl LineCtx {
    fn err(&self, msg: impl Into<String>) -> SpecError {
        SpecError::Line {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn expr_err(&self, e: &ExprError) -> SpecError {
        let (pos, msg) = expr_err_parts(e);
        match pos {
            Some(p) => SpecError::Line {
                line: self.line,
                msg: format!("column {}: {msg}", self.rhs_offset + p + 1),
            },
            None => SpecError::Line {
                line: self.line,
                msg,
            },
        }
    }
}

pub fn parse_spec_file(
    text: &str,
    kappa_override: Option<GaussRational>,
) -> Result<SpecFile, SpecError> {
    if let Some(k) = &kappa_override {
        if !k.is_real() {
            return Err(SpecError::Structure(format!(
                "kappa must be real, got {k}"
            )));
        }
    }
    let mut dim: Option<usize> = None;
    let mut kappa = GaussRational::one();
    let mut saw_kappa = false;
    let mut params: Vec<(String, GaussRational)> = Vec::new();
    let mut c_entries: Vec<CEntry> = Vec::new();
    let mut c_seen: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
    let mut phi_entries: Vec<PhiEntry> = Vec::new();
    let mut phi_seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    // section ranks enforce the declaration order
    let mut rank = 0u8;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let uncommented = match raw.find('#') {
            Some(h) => &raw[..h],
            None => raw,
        };
        if uncommented.trim().is_empty() {
            continue;
        }
        let (header, rhs, rhs_offset) = match uncommented.find('=') {
            Some(eq) => (&uncommented[..eq], &uncommented[eq + 1..], eq + 1),
            None => (uncommented, "", uncommented.len()),
        };
        let ctx = LineCtx {
            line: line_no,
            rhs_offset,
        };
        let words: Vec<&str> = header.split_whitespace().collect();
        let directive = *words
            .first()
            .ok_or_else(|| ctx.err("expected a directive before '='"))?;
        let this_rank = match directive {
            "dim" => 0,
            "kappa" => 1,
            "param" => 2,
            "C" => 3,
            "phi" => 4,
            other => {
                return Err(ctx.err(format!(
                    "unknown directive {other:?}; expected dim, kappa, param, C or phi"
                )))
            }
        };
        if this_rank < rank {
            return Err(ctx.err(
                "sections must appear in the order dim, kappa, param, C, phi",
            ));
        }
        rank = this_rank;

        match directive {
            "dim" => {
                if dim.is_some() {
                    return Err(ctx.err("duplicate dim line"));
                }
                if words.len() != 2 || !rhs.trim().is_empty() {
                    return Err(ctx.err("expected: dim <n>"));
                }
                let n: usize = words[1]
                    .parse()
                    .map_err(|_| ctx.err(format!("bad dimension {:?}", words[1])))?;
                if n == 0 || n > MAX_DIM {
                    return Err(ctx.err(format!("dimension must be in 1..={MAX_DIM}")));
                }
                dim = Some(n);
            }
            "kappa" => {
                let n = dim.ok_or_else(|| ctx.err("dim must come first"))?;
                if saw_kappa {
                    return Err(ctx.err("duplicate kappa line"));
                }
                saw_kappa = true;
                if words.len() != 1 {
                    return Err(ctx.err("expected: kappa = <constant>"));
                }
                let pctx = ParseContext::new(n);
                let node = parse_expr(rhs, &pctx).map_err(|e| ctx.expr_err(&e))?;
                let value = const_eval(&node, &BTreeMap::new())
                    .map_err(|e| ctx.expr_err(&e))?;
                if !value.is_real() {
                    return Err(ctx.err(format!("kappa must be real, got {value}")));
                }
                kappa = value;
            }
            "param" => {
                let n = dim.ok_or_else(|| ctx.err("dim must come first"))?;
                if words.len() != 2 {
                    return Err(ctx.err("expected: param <name> = <constant>"));
                }
                let name = words[1];
                validate_param_name(name).map_err(|msg| ctx.err(msg))?;
                if params.iter().any(|(p, _)| p == name) {
                    return Err(ctx.err(format!("duplicate param {name:?}")));
                }
                let env = build_env(kappa_override.as_ref().unwrap_or(&kappa), &params);
                let pctx = ParseContext::with_params(
                    n,
                    env.keys().cloned().collect::<Vec<_>>(),
                );
                let node = parse_expr(rhs, &pctx).map_err(|e| ctx.expr_err(&e))?;
                let value = const_eval(&node, &env).map_err(|e| ctx.expr_err(&e))?;
                params.push((name.to_string(), value));
            }
            "C" => {
                let n = dim.ok_or_else(|| ctx.err("dim must come first"))?;
                if words.len() != 4 {
                    return Err(ctx.err("expected: C <i> <j> <k> = <constant>"));
                }
                let [i, j, k] = parse_indices::<3>(&words[1..], n, &ctx)?;
                if i == j {
                    return Err(ctx.err("bracket of a generator with itself is zero; i and j must differ"));
                }
                if i > j {
                    return Err(ctx.err(format!(
                        "store coefficients with i < j; C {} {} {} is implied by antisymmetry",
                        j + 1,
                        i + 1,
                        k + 1
                    )));
                }
                if !c_seen.insert((i, j, k)) {
                    return Err(ctx.err(format!(
                        "duplicate coefficient C {} {} {}",
                        i + 1,
                        j + 1,
                        k + 1
                    )));
                }
                let env = build_env(kappa_override.as_ref().unwrap_or(&kappa), &params);
                let pctx = ParseContext::with_params(
                    n,
                    env.keys().cloned().collect::<Vec<_>>(),
                );
                let node = parse_expr(rhs, &pctx).map_err(|e| ctx.expr_err(&e))?;
                let value = const_eval(&node, &env).map_err(|e| ctx.expr_err(&e))?;
                if !value.is_zero() {
                    c_entries.push(CEntry { i, j, k, value });
                }
            }
            "phi" => {
                let n = dim.ok_or_else(|| ctx.err("dim must come first"))?;
                if words.len() != 3 {
                    return Err(ctx.err("expected: phi <row> <col> = <expression>"));
                }
                let [row, col] = parse_indices::<2>(&words[1..], n, &ctx)?;
                if !phi_seen.insert((row, col)) {
                    return Err(ctx.err(format!(
                        "duplicate entry phi {} {}",
                        row + 1,
                        col + 1
                    )));
                }
                let env = build_env(kappa_override.as_ref().unwrap_or(&kappa), &params);
                let pctx = ParseContext::with_params(
                    n,
                    env.keys().cloned().collect::<Vec<_>>(),
                );
                let expr = parse_expr(rhs, &pctx).map_err(|e| ctx.expr_err(&e))?;
                phi_entries.push(PhiEntry { row, col, expr });
            }
            _ => unreachable!(),
        }
    }

    let dim = dim.ok_or_else(|| SpecError::Structure("missing dim line".into()))?;
    if let Some(k) = kappa_override {
        kappa = k;
    }
    c_entries.sort_by_key(|e| (e.i, e.j, e.k));
    phi_entries.sort_by_key(|e| (e.row, e.col));
    Ok(SpecFile {
        dim,
        kappa,
        params,
        c_entries,
        phi_entries,
    })
}

fn parse_indices<const N: usize>(
    words: &[&str],
    dim: usize,
    ctx: &LineCtx,
) -> Result<[usize; N], SpecError> {
    let mut out = [0usize; N];
    for (slot, w) in out.iter_mut().zip(words) {
        let v: usize = w
            .parse()
            .map_err(|_| ctx.err(format!("bad index {w:?}")))?;
        if v == 0 || v > dim {
            return Err(ctx.err(format!("index {v} is outside 1..={dim}")));
        }
        *slot = v - 1;
    }
    Ok(out)
}

fn validate_param_name(name: &str) -> Result<(), String> {
    let mut chars = name.chars();
    let head_ok = chars
        .next()
        .map(|c| c.is_ascii_alphabetic() || c == '_')
        .unwrap_or(false);
    if !head_ok || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(format!("param name {name:?} is not a valid identifier"));
    }
    if name == "i" || name == "kappa" {
        return Err(format!("param name {name:?} is reserved"));
    }
    if FUNCTIONS.contains(&name) {
        return Err(format!("param name {name:?} collides with a catalogue function"));
    }
    if let Some(rest) = name.strip_prefix('d') {
        if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!(
                "param name {name:?} collides with the variable naming scheme"
            ));
        }
    }
    Ok(())
}

fn build_env(
    kappa: &GaussRational,
    params: &[(String, GaussRational)],
) -> BTreeMap<String, GaussRational> {
    let mut env = BTreeMap::new();
    env.insert("kappa".to_string(), kappa.clone());
    for (name, value) in params {
        env.insert(name.clone(), value.clone());
    }
    env
}

impl SpecFile {
    /// Constant environment for evaluating grid entries.
    pub fn env(&self) -> BTreeMap<String, GaussRational> {
        build_env(&self.kappa, &self.params)
    }

    /// Dense grid with the identity defaults filled in.
    pub fn phi_grid(&self) -> Vec<Vec<ExprNode>> {
        let mut grid: Vec<Vec<ExprNode>> = (0..self.dim)
            .map(|r| (0..self.dim).map(|c| default_entry(r, c)).collect())
            .collect();
        for e in &self.phi_entries {
            grid[e.row][e.col] = e.expr.clone();
        }
        grid
    }

    /// Deterministic re-rendering: values for constants, expression text for
    /// grid entries, defaulted entries omitted, fixed ordering throughout.
    /// Two files with the same canonical text define the same realization.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("dim {}\n", self.dim));
        out.push_str(&format!("kappa = {}\n", self.kappa));
        let mut params = self.params.clone();
        params.sort_by(|a, b| a.0.cmp(&b.0));
        for (name, value) in &params {
            out.push_str(&format!("param {name} = {value}\n"));
        }
        for e in &self.c_entries {
            out.push_str(&format!(
                "C {} {} {} = {}\n",
                e.i + 1,
                e.j + 1,
                e.k + 1,
                e.value
            ));
        }
        for e in &self.phi_entries {
            if same_shape(&e.expr, &default_entry(e.row, e.col)) {
                continue;
            }
            out.push_str(&format!(
                "phi {} {} = {}\n",
                e.row + 1,
                e.col + 1,
                e.expr
            ));
        }
        out
    }
}

/// 64-bit FNV-1a over a byte string; used to fingerprint canonical spec text
/// in output metadata.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
