//! The double sequence behind normal-ordered exponentials.
//!
//! For a flow `F = (F_1, ..., F_n)` of jets in the derivative symbols and
//! the formal partials `delta_i` with respect to those symbols, the table
//! `A[s, l]` (multi-index `s`, weight `l`) is defined by `A[0, 0] = 1`,
//! `A[s, 0] = 0` otherwise, and
//!
//! ```text
//! A[s, l+1] = sum_i F_i * (delta_i(A[s, l]) + A[s - e_i, l]).
//! ```
//!
//! `A[s, l]` collects the `x^s`-part of the normally ordered `l`-th power of
//! `sum_i x_i F_i`; in particular `A[s, l] = 0` unless `|s| <= l`, and the
//! whole table is determined by finitely many rows.

use num::rational::BigRational;
use num::BigInt;

use super::{multi_indices_up_to, KcalcError};
use crate::fps::{binomial, factorial, GaussRational, MultiIndex, SeriesVector, TruncatedSeries};
use std::collections::BTreeMap;

pub struct ASequence {
    n: usize,
    max_weight: usize,
    flow: SeriesVector,
    table: BTreeMap<(usize, MultiIndex), TruncatedSeries>,
}

impl ASequence {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_weight(&self) -> usize {
        self.max_weight
    }

    pub fn flow(&self) -> &SeriesVector {
        &self.flow
    }

    /// The order certified for weight-`l` entries: one order is consumed per
    /// recursion step after the first.
    pub fn certified_order(&self, l: usize) -> usize {
        self.flow.order() + 1 - l.max(1)
    }

    /// The stored entry, if nonzero.
    pub fn get(&self, s: &MultiIndex, l: usize) -> Option<&TruncatedSeries> {
        self.table.get(&(l, s.clone()))
    }

    /// The entry `A[s, l]` as a series, materialising zeros at the order
    /// certified for that weight.
    pub fn entry(&self, s: &MultiIndex, l: usize) -> TruncatedSeries {
        self.get(s, l)
            .cloned()
            .unwrap_or_else(|| TruncatedSeries::zero(self.flow.n_vars(), self.certified_order(l)))
    }

    /// All nonzero entries of weight `l`.
    pub fn row(&self, l: usize) -> impl Iterator<Item = (&MultiIndex, &TruncatedSeries)> {
        self.table
            .range((l, MultiIndex::zeros(self.n))..(l + 1, MultiIndex::zeros(self.n)))
            .map(|((_, s), v)| (s, v))
    }
}

/// Build the table for all weights `l <= max_weight`.
///
/// The flow components live in a common ring whose first `n` slots are the
/// derivative symbols; further slots are untouched parameters.  Each weight
/// step consumes one certified order, so the flow must carry order at least
/// `max_weight`.
pub fn a_sequence(flow: &SeriesVector, max_weight: usize) -> Result<ASequence, KcalcError> {
    let n = flow.len();
    if flow.n_vars() < n {
        return Err(KcalcError::Fps(crate::fps::FpsError::DimensionMismatch {
            expected: n,
            got: flow.n_vars(),
        }));
    }
    if flow.order() < max_weight {
        return Err(KcalcError::OrderBudget {
            requested: max_weight,
            have: flow.order(),
            needed: max_weight,
        });
    }
    let mut table = BTreeMap::new();
    table.insert(
        (0usize, MultiIndex::zeros(n)),
        TruncatedSeries::one(flow.n_vars(), flow.order()),
    );
    for l in 0..max_weight {
        // candidate multi-indices at weight l+1: anything reachable from a
        // nonzero weight-l entry by keeping s or adding one unit
        let mut candidates: Vec<MultiIndex> = Vec::new();
        let prev: Vec<MultiIndex> = table
            .range((l, MultiIndex::zeros(n))..(l + 1, MultiIndex::zeros(n)))
            .map(|((_, s), _)| s.clone())
            .collect();
        for s in &prev {
            candidates.push(s.clone());
            for i in 0..n {
                candidates.push(s.add(&MultiIndex::unit(n, i)));
            }
        }
        candidates.sort();
        candidates.dedup();
        for s in candidates {
            let mut acc: Option<TruncatedSeries> = None;
            for i in 0..n {
                let mut inner: Option<TruncatedSeries> = None;
                if let Some(a) = table.get(&(l, s.clone())) {
                    let da = a.partial(i)?;
                    if !da.is_zero() {
                        inner = Some(da);
                    }
                }
                if s.get(i) > 0 {
                    let sm = s.checked_sub(&MultiIndex::unit(n, i)).unwrap();
                    if let Some(a) = table.get(&(l, sm)) {
                        inner = Some(match inner {
                            None => a.clone(),
                            Some(g) => g.add(a)?,
                        });
                    }
                }
                if let Some(g) = inner {
                    let term = flow.component(i).mul(&g)?;
                    acc = Some(match acc {
                        None => term,
                        Some(a) => a.add(&term)?,
                    });
                }
            }
            if let Some(a) = acc {
                if !a.is_zero() {
                    table.insert((l + 1, s), a);
                }
            }
        }
    }
    Ok(ASequence {
        n,
        max_weight,
        flow: flow.clone(),
        table,
    })
}

#[derive(Clone, Debug)]
pub struct RecursionViolation {
    pub s: Vec<u32>,
    pub l: usize,
    pub detail: String,
}

/// Outcome of checking the integral recursion and its multinomial
/// refinement on a computed table.  Both identities are theorems, so any
/// violation indicates an implementation bug.
#[derive(Clone, Debug)]
pub struct RecursionReport {
    pub componentwise_checked: usize,
    pub multinomial_checked: usize,
    pub violations: Vec<RecursionViolation>,
}

impl RecursionReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn rat_int(v: BigInt) -> GaussRational {
    GaussRational::from_rational(BigRational::from_integer(v))
}

/// Ordered splittings of `s` into `k` nonzero multi-index parts.
fn compositions(s: &MultiIndex, k: usize) -> Vec<Vec<MultiIndex>> {
    if k == 1 {
        return if s.is_zero() { vec![] } else { vec![vec![s.clone()]] };
    }
    let mut out = Vec::new();
    for first in s.sub_indices() {
        if first.is_zero() || first == *s {
            continue;
        }
        let rest = s.checked_sub(&first).unwrap();
        for mut tail in compositions(&rest, k - 1) {
            let mut v = vec![first.clone()];
            v.append(&mut tail);
            out.push(v);
        }
    }
    out
}

/// Ordered splittings of `l` into `k` positive integer parts.
fn int_compositions(l: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return if l >= 1 { vec![vec![l]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..l {
        for mut tail in int_compositions(l - first, k - 1) {
            let mut v = vec![first];
            v.append(&mut tail);
            out.push(v);
        }
    }
    out
}

fn series_agree(lhs: &TruncatedSeries, rhs: &TruncatedSeries) -> bool {
    let t = lhs.order().min(rhs.order());
    lhs.truncated(t) == rhs.truncated(t)
}

/// Check, exactly and through the common certified orders:
///
/// * componentwise, for every stored `A[s, l]` with `2 <= |s| <= l` and
///   every `i` with `s_i >= 1`:
///   `s_i * A[s, l] = sum_r C(l, r) A[e_i, r] A[s - e_i, l - r]`;
/// * the multinomial refinement, for every ordered composition of `s` into
///   `k` in `{2, 3}` nonzero parts:
///   `(prod_i s_i!) / (prod parts!) * A[s, l] =
///    sum over positive weight splittings of the weight multinomial times
///    the product of part entries`.
pub fn verify_integral_recursion(a: &ASequence) -> Result<RecursionReport, KcalcError> {
    verify_integral_recursion_capped(a, a.max_weight)
}

/// The same check restricted to `|s| <= max_s`.  The number of ordered
/// compositions grows steeply with `|s|`, so bounding the band keeps the
/// verification affordable on tables with a deep weight range.
pub fn verify_integral_recursion_capped(
    a: &ASequence,
    max_s: usize,
) -> Result<RecursionReport, KcalcError> {
    let n = a.n;
    let mut report = RecursionReport {
        componentwise_checked: 0,
        multinomial_checked: 0,
        violations: Vec::new(),
    };
    for l in 2..=a.max_weight {
        for s in multi_indices_up_to(n, l.min(max_s)) {
            let deg = s.degree() as usize;
            if deg < 2 || deg > l {
                continue;
            }
            // both sides are only certified at the weight-l order, so work
            // there: high weights then cost almost nothing
            let target = a.certified_order(l);
            let a_sl = a.entry(&s, l).truncated(target);
            // componentwise integral recursion
            for i in 0..n {
                let si = s.get(i);
                if si == 0 {
                    continue;
                }
                let lhs = a_sl.scale(&GaussRational::from_ratio(si as i64, 1));
                let e_i = MultiIndex::unit(n, i);
                let s_minus = s.checked_sub(&e_i).unwrap();
                let mut rhs = TruncatedSeries::zero(a.flow.n_vars(), target);
                // A[s - e_i, l - r] vanishes once l - r < |s| - 1
                for r in 1..=(l + 1 - deg) {
                    let prod = a
                        .entry(&e_i, r)
                        .truncated(target)
                        .mul(&a.entry(&s_minus, l - r).truncated(target))?;
                    rhs = rhs.add(&prod.scale(&rat_int(binomial(l, r))))?;
                }
                report.componentwise_checked += 1;
                if !series_agree(&lhs, &rhs) {
                    report.violations.push(RecursionViolation {
                        s: s.exponents().to_vec(),
                        l,
                        detail: format!("componentwise recursion fails at i = {}", i + 1),
                    });
                }
            }
            // multinomial refinement for two and three blocks
            for k in 2..=3usize {
                for parts in compositions(&s, k) {
                    let mut coeff = BigInt::from(1);
                    for i in 0..n {
                        coeff *= factorial(s.get(i) as usize);
                    }
                    let mut denom = BigInt::from(1);
                    for p in &parts {
                        for i in 0..n {
                            denom *= factorial(p.get(i) as usize);
                        }
                    }
                    let lhs = a_sl.scale(&GaussRational::from_rational(BigRational::new(
                        coeff, denom,
                    )));
                    let mut rhs = TruncatedSeries::zero(a.flow.n_vars(), target);
                    for ls in int_compositions(l, k) {
                        let mut weight_coeff = factorial(l);
                        for &li in &ls {
                            weight_coeff /= factorial(li);
                        }
                        let mut prod = a.entry(&parts[0], ls[0]).truncated(target);
                        for j in 1..k {
                            prod = prod.mul(&a.entry(&parts[j], ls[j]).truncated(target))?;
                        }
                        rhs = rhs.add(&prod.scale(&rat_int(weight_coeff)))?;
                    }
                    report.multinomial_checked += 1;
                    if !series_agree(&lhs, &rhs) {
                        report.violations.push(RecursionViolation {
                            s: s.exponents().to_vec(),
                            l,
                            detail: format!("multinomial refinement fails for parts {parts:?}"),
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}
