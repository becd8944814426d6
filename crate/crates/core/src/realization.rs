//! Structure constants and first-order realizations.
//!
//! A realization presents each generator of a Lie algebra as a first-order
//! differential operator `x_1 g_1(d) + ... + x_n g_n(d)`, collected into an
//! `n x n` grid `phi[row][col]` with rows indexing coordinates and columns
//! indexing generators.  The grid must reduce to the identity at `d = 0` and
//! reproduce the declared bracket, which for first-order operators is the
//! closed identity
//!
//! ```text
//! sum_m phi[m][j] * del_m(phi[k][i]) - sum_m phi[m][i] * del_m(phi[k][j])
//!     = sum_s C(i, j, s) * phi[k][s]      for all k,
//! ```
//!
//! checked here exactly, jet against jet.

use std::collections::BTreeMap;

use crate::expr::{
    eval_series, fnv1a64, parse_spec_file, EvalContext, ExprError, ExprNode, SpecError,
    SpecFile,
};
use crate::fps::{FpsError, GaussRational, SeriesVector, TruncatedSeries};

const SU2_FL_TEXT: &str = include_str!("../specs/su2_fl.spec");
const SU2_SYM_TEXT: &str = include_str!("../specs/su2_sym.spec");

/// How far beyond a requested order grid entries are evaluated before
/// truncation, to absorb the certification cost of exact division.
const EVAL_MARGIN: usize = 4;

/// Order used for the self-check run on built-in realizations.
const BUILTIN_CHECK_ORDER: usize = 4;

#[derive(Debug, thiserror::Error)]
pub enum RealizationError {
    #[error("{0}")]
    Spec(#[from] SpecError),
    #[error("grid entry ({row}, {col}): {source}")]
    Entry {
        row: usize,
        col: usize,
        source: ExprError,
    },
    #[error(
        "grid entry ({row}, {col}) only certifies order {got}, needed {needed}; \
         deepen the evaluation margin or simplify the entry"
    )]
    OrderShortfall {
        row: usize,
        col: usize,
        needed: usize,
        got: usize,
    },
    #[error("Jacobi identity fails on generators ({i}, {j}, {k}) at output {s}: residual {residual}")]
    Jacobi {
        i: usize,
        j: usize,
        k: usize,
        s: usize,
        residual: GaussRational,
    },
    #[error("grid entry ({row}, {col}) has constant term {got}, expected {expected}")]
    NotIdentityAtZero {
        row: usize,
        col: usize,
        got: GaussRational,
        expected: GaussRational,
    },
    #[error(
        "bracket of generators {i} and {j} is not reproduced: coordinate {k} residual \
         starts with {leading} at degree {degree}"
    )]
    BracketMismatch {
        i: usize,
        j: usize,
        k: usize,
        leading: String,
        degree: u32,
    },
    #[error("unknown built-in realization {0:?}; available: abelian, su2_fl, su2_sym")]
    UnknownBuiltin(String),
    #[error("realization {name} needs an explicit dimension")]
    DimensionRequired { name: String },
    #[error("realization {name} has fixed dimension {expected}, got {got}")]
    DimensionFixed {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Series(#[from] FpsError),
}

/// Antisymmetric structure coefficients, stored once per `i < j` pair.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    n: usize,
    entries: BTreeMap<(usize, usize, usize), GaussRational>,
}

impl StructureConstants {
    /// Build from `(i, j, k, value)` tuples with `i < j`; zero values are
    /// dropped.  Indices are zero-based here.
    pub fn new(
        n: usize,
        entries: impl IntoIterator<Item = (usize, usize, usize, GaussRational)>,
    ) -> Self {
        let mut map = BTreeMap::new();
        for (i, j, k, value) in entries {
            assert!(i < j && j < n && k < n, "structure constant index out of range");
            if !value.is_zero() {
                map.insert((i, j, k), value);
            }
        }
        StructureConstants { n, entries: map }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `C(i, j, k)`: coefficient of generator `k` in the bracket of `i` and
    /// `j`, antisymmetrised on demand.
    pub fn get(&self, i: usize, j: usize, k: usize) -> GaussRational {
        use std::cmp::Ordering;
        match i.cmp(&j) {
            Ordering::Equal => GaussRational::zero(),
            Ordering::Less => self
                .entries
                .get(&(i, j, k))
                .cloned()
                .unwrap_or_else(GaussRational::zero),
            Ordering::Greater => self
                .entries
                .get(&(j, i, k))
                .map(|v| -v)
                .unwrap_or_else(GaussRational::zero),
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.entries.is_empty()
    }

    /// Stored `(i, j, k, value)` tuples, `i < j`, in index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, usize, &GaussRational)> {
        self.entries.iter().map(|(&(i, j, k), v)| (i, j, k, v))
    }

    /// Verify the Jacobi identity on all index triples.
    pub fn check_jacobi(&self) -> Result<(), RealizationError> {
        let n = self.n;
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    for s in 0..n {
                        let mut acc = GaussRational::zero();
                        for m in 0..n {
                            acc += &(&self.get(i, j, m) * &self.get(m, k, s));
                            acc += &(&self.get(j, k, m) * &self.get(m, i, s));
                            acc += &(&self.get(k, i, m) * &self.get(m, j, s));
                        }
                        if !acc.is_zero() {
                            return Err(RealizationError::Jacobi {
                                i: i + 1,
                                j: j + 1,
                                k: k + 1,
                                s: s + 1,
                                residual: acc,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Outcome of an exact grid validation.
#[derive(Clone, Debug)]
pub struct PhiValidationReport {
    /// The identity involves one derivative, so a grid certified at order
    /// `N` is checked through order `N - 1`.
    pub order_checked: usize,
    /// Number of `(i, j)` bracket pairs verified.
    pub pairs_checked: usize,
}

/// A named realization: structure constants, the expression grid, and the
/// constants needed to evaluate it.
#[derive(Clone, Debug)]
pub struct Realization {
    name: String,
    spec: SpecFile,
    constants: StructureConstants,
    grid: Vec<Vec<ExprNode>>,
    canonical_text: String,
    hash: u64,
}

impl Realization {
    /// Parse a realization file.  Structure constants are checked for the
    /// Jacobi identity immediately; the grid itself is validated separately
    /// through [`Realization::validate`], since that costs series arithmetic.
    pub fn from_spec_text(
        name: &str,
        text: &str,
        kappa_override: Option<GaussRational>,
    ) -> Result<Self, RealizationError> {
        let spec = parse_spec_file(text, kappa_override)?;
        let constants = StructureConstants::new(
            spec.dim,
            spec.c_entries
                .iter()
                .map(|e| (e.i, e.j, e.k, e.value.clone())),
        );
        constants.check_jacobi()?;
        let grid = spec.phi_grid();
        let canonical_text = spec.canonical_text();
        let hash = fnv1a64(canonical_text.as_bytes());
        Ok(Realization {
            name: name.to_string(),
            spec,
            constants,
            grid,
            canonical_text,
            hash,
        })
    }

    /// The built-in catalogue: `abelian` (any dimension, identity grid),
    /// `su2_fl` and `su2_sym` (dimension 3).  Built-ins are self-checked by
    /// running the exact grid validation at a modest order.
    pub fn builtin(
        name: &str,
        dim: Option<usize>,
        kappa: GaussRational,
    ) -> Result<Self, RealizationError> {
        let r = match name {
            "abelian" => {
                let n = dim.ok_or_else(|| RealizationError::DimensionRequired {
                    name: name.to_string(),
                })?;
                let text = format!("# abelian, identity grid\ndim {n}\n");
                Self::from_spec_text(name, &text, Some(kappa))?
            }
            "su2_fl" | "su2_sym" => {
                if let Some(d) = dim {
                    if d != 3 {
                        return Err(RealizationError::DimensionFixed {
                            name: name.to_string(),
                            expected: 3,
                            got: d,
                        });
                    }
                }
                let text = if name == "su2_fl" {
                    SU2_FL_TEXT
                } else {
                    SU2_SYM_TEXT
                };
                Self::from_spec_text(name, text, Some(kappa))?
            }
            other => return Err(RealizationError::UnknownBuiltin(other.to_string())),
        };
        r.validate(BUILTIN_CHECK_ORDER)?;
        Ok(r)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.spec.dim
    }

    pub fn kappa(&self) -> &GaussRational {
        &self.spec.kappa
    }

    pub fn constants(&self) -> &StructureConstants {
        &self.constants
    }

    pub fn spec(&self) -> &SpecFile {
        &self.spec
    }

    pub fn canonical_text(&self) -> &str {
        &self.canonical_text
    }

    /// FNV-1a 64 fingerprint of the canonical text, as fixed-width hex.
    pub fn hash_hex(&self) -> String {
        format!("{:016x}", self.hash)
    }

    /// Evaluate the grid in the `n`-variable derivative ring, every entry
    /// certified exactly at `order`.  Entries are computed with headroom and
    /// truncated, since exact division inside an entry lowers certification.
    pub fn phi_matrix(&self, order: usize) -> Result<Vec<Vec<TruncatedSeries>>, RealizationError> {
        let ctx = EvalContext {
            dim: self.spec.dim,
            order: order + EVAL_MARGIN,
            params: self.spec.env(),
        };
        let mut rows = Vec::with_capacity(self.spec.dim);
        for (r, row) in self.grid.iter().enumerate() {
            let mut out = Vec::with_capacity(self.spec.dim);
            for (c, entry) in row.iter().enumerate() {
                let s = eval_series(entry, &ctx).map_err(|source| RealizationError::Entry {
                    row: r + 1,
                    col: c + 1,
                    source,
                })?;
                if s.order() < order {
                    return Err(RealizationError::OrderShortfall {
                        row: r + 1,
                        col: c + 1,
                        needed: order,
                        got: s.order(),
                    });
                }
                out.push(s.truncated(order));
            }
            rows.push(out);
        }
        Ok(rows)
    }

    /// The grid under the momentum substitution `d_c -> i q_c`, which maps a
    /// term of degree `m` to itself times `i^m`.
    pub fn psi_matrix(&self, order: usize) -> Result<Vec<Vec<TruncatedSeries>>, RealizationError> {
        let phi = self.phi_matrix(order)?;
        Ok(phi
            .into_iter()
            .map(|row| row.into_iter().map(|s| rotate_to_momentum(&s)).collect())
            .collect())
    }

    /// The generating flow in the doubled ring: variables `0..n` are the
    /// momentum parameters `k`, variables `n..2n` the coordinates `q`, and
    /// component `b` is `sum_a k_a psi[b][a](q)`.
    pub fn flow_series(&self, order: usize) -> Result<SeriesVector, RealizationError> {
        let n = self.spec.dim;
        let psi = self.psi_matrix(order.saturating_sub(1))?;
        let slot_map: Vec<usize> = (n..2 * n).collect();
        let mut components = Vec::with_capacity(n);
        for psi_row in psi.iter().take(n) {
            let mut acc = TruncatedSeries::zero(2 * n, order);
            for (a, entry) in psi_row.iter().enumerate() {
                let lifted = entry.embed(2 * n, &slot_map)?;
                let k_a = TruncatedSeries::var(2 * n, order, a)?;
                // k_a has degree one, so degree-(order-1) certification of
                // psi covers the product through the full order
                acc = acc.add(&k_a.mul_to_order(&lifted, order))?;
            }
            components.push(acc);
        }
        Ok(SeriesVector::new(components)?)
    }

    /// Exact validation: the grid is the identity at `d = 0` and satisfies
    /// the bracket identity through `order - 1`.
    pub fn validate(&self, order: usize) -> Result<PhiValidationReport, RealizationError> {
        let n = self.spec.dim;
        let phi = self.phi_matrix(order)?;
        for (r, row) in phi.iter().enumerate() {
            for (c, entry) in row.iter().enumerate() {
                let expected = if r == c {
                    GaussRational::one()
                } else {
                    GaussRational::zero()
                };
                if entry.constant_term() != expected {
                    return Err(RealizationError::NotIdentityAtZero {
                        row: r + 1,
                        col: c + 1,
                        got: entry.constant_term(),
                        expected,
                    });
                }
            }
        }
        // d phi[k][i] / d d_m, precomputed
        let mut partials: Vec<Vec<Vec<TruncatedSeries>>> = Vec::with_capacity(n);
        for row in &phi {
            let mut per_entry = Vec::with_capacity(n);
            for entry in row {
                let mut per_dir = Vec::with_capacity(n);
                for m in 0..n {
                    per_dir.push(entry.partial(m)?);
                }
                per_entry.push(per_dir);
            }
            partials.push(per_entry);
        }
        let check_order = order.saturating_sub(1);
        let mut pairs = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                pairs += 1;
                for k in 0..n {
                    let mut lhs = TruncatedSeries::zero(n, check_order);
                    for m in 0..n {
                        lhs = lhs.add(&phi[m][j].truncated(check_order).mul(&partials[k][i][m])?)?;
                        lhs = lhs.sub(&phi[m][i].truncated(check_order).mul(&partials[k][j][m])?)?;
                    }
                    let mut rhs = TruncatedSeries::zero(n, check_order);
                    for s in 0..n {
                        let c = self.constants.get(i, j, s);
                        if !c.is_zero() {
                            rhs = rhs.add(&phi[k][s].truncated(check_order).scale(&c))?;
                        }
                    }
                    let residual = lhs.sub(&rhs)?;
                    if !residual.is_zero() {
                        let (mi, coeff) = residual.terms().next().unwrap();
                        return Err(RealizationError::BracketMismatch {
                            i: i + 1,
                            j: j + 1,
                            k: k + 1,
                            leading: format!("{coeff} * d^{:?}", mi.exponents()),
                            degree: mi.degree(),
                        });
                    }
                }
            }
        }
        Ok(PhiValidationReport {
            order_checked: check_order,
            pairs_checked: pairs,
        })
    }
}

/// Apply `d_c -> i q_c` termwise: coefficient times `i^degree`.
fn rotate_to_momentum(s: &TruncatedSeries) -> TruncatedSeries {
    let mut out = TruncatedSeries::zero(s.n_vars(), s.order());
    let i_powers = [
        GaussRational::one(),
        GaussRational::i(),
        -&GaussRational::one(),
        -&GaussRational::i(),
    ];
    for (mi, c) in s.terms() {
        let rot = &i_powers[(mi.degree() % 4) as usize];
        out.insert_add(mi.clone(), &(c * rot));
    }
    out
}
