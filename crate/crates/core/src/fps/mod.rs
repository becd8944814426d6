//! Truncated multivariate formal power series over the Gaussian rationals.
//!
//! A [`TruncatedSeries`] is the jet of a formal power series in `n_vars`
//! commuting variables, exact through total degree `order` (inclusive).  The
//! representation is sparse: a graded-lexicographically ordered map from
//! exponent multi-indices to nonzero [`GaussRational`] coefficients.
//!
//! Invariants maintained by every operation:
//!
//! * no stored coefficient is zero;
//! * every stored multi-index has total degree `<= order` and length `n_vars`;
//! * arithmetic results carry `order = min` of the operand orders, so a jet
//!   never claims more precision than its inputs certify;
//! * a partial derivative lowers the certified order by one (floored at 0).
//!
//! Truncation is by *total* degree: the degree-`d` coefficients of a product
//! of jets certified through `d` are exact, which is what makes the min rule
//! sound.

mod analytic;
mod compose;
mod export;
mod gauss;

pub use analytic::{
    bernoulli_numbers, cos_sqrt, sinc_sqrt, ucoth_sq, ucoth_sq_rem, AnalyticFn,
};
pub(crate) use analytic::{binomial, factorial, pow_integer};
pub use compose::{compose, compose_exact_poly, div_exact, invert_formal_map, recip};
pub use export::{records_to_series, series_to_records, weyl_to_records, TermRecord, WeylTermRecord};
pub use gauss::{rational_to_f64, GaussRational};

use num::rational::BigRational;
use num::traits::{Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Complex double used by the numeric evaluation paths.
pub type Complex64 = num::complex::Complex<f64>;

/// Errors from the series kernel.
#[derive(Debug, thiserror::Error)]
pub enum FpsError {
    #[error("dimension mismatch: expected {expected} variables, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("variable index {index} out of range for {n_vars} variables")]
    IndexOutOfRange { index: usize, n_vars: usize },
    #[error("analytic argument violates domain: {0}")]
    AnalyticDomain(String),
    #[error("composition diverges: argument {arg} has a nonzero constant term")]
    CompositionDivergence { arg: usize },
    #[error("map is not tangent to the identity: {0}")]
    NotTangentToIdentity(String),
    #[error("series division is not exact: {0}")]
    NotDivisible(String),
    #[error("division by the zero series")]
    DivisionByZero,
    #[error("rational power needs an integer or a unit constant term: {0}")]
    InvalidPower(String),
    #[error("epsilon for the weighted norm must be positive")]
    InvalidEpsilon,
    #[error("malformed term record: {0}")]
    BadRecord(String),
    #[error("evaluation point has {got} coordinates, series has {expected} variables")]
    BadEvalPoint { expected: usize, got: usize },
}

/// Exponent multi-index, ordered graded-lexicographically: first by total
/// degree, ties broken by lexicographic comparison of the exponent tuple.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exps: Vec<u32>) -> Self {
        MultiIndex(exps)
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The unit index `e_j`.
    pub fn unit(n: usize, j: usize) -> Self {
        let mut v = vec![0; n];
        v[j] = 1;
        MultiIndex(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn get(&self, j: usize) -> u32 {
        self.0[j]
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn add(&self, rhs: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.len(), rhs.len());
        MultiIndex(
            self.0
                .iter()
                .zip(&rhs.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Componentwise subtraction; `None` if any component would go negative.
    pub fn checked_sub(&self, rhs: &MultiIndex) -> Option<MultiIndex> {
        debug_assert_eq!(self.len(), rhs.len());
        let mut out = Vec::with_capacity(self.len());
        for (a, b) in self.0.iter().zip(&rhs.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(MultiIndex(out))
    }

    /// `true` when `rhs <= self` componentwise.
    pub fn contains(&self, rhs: &MultiIndex) -> bool {
        self.0.iter().zip(&rhs.0).all(|(a, b)| a >= b)
    }

    /// Iterate all `gamma` with `gamma <= self` componentwise (including zero
    /// and `self`), in no particular order.
    pub fn sub_indices(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex(vec![])];
        for &e in &self.0 {
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            for base in &out {
                for k in 0..=e {
                    let mut v = base.0.clone();
                    v.push(k);
                    next.push(MultiIndex(v));
                }
            }
            out = next;
        }
        out
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.len().cmp(&other.0.len()))
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// A formal power series jet, exact through total degree `order`.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    n_vars: usize,
    order: usize,
    terms: BTreeMap<MultiIndex, GaussRational>,
}

impl TruncatedSeries {
    pub fn zero(n_vars: usize, order: usize) -> Self {
        assert!(n_vars > 0, "series need at least one variable");
        TruncatedSeries {
            n_vars,
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_vars: usize, order: usize, c: GaussRational) -> Self {
        let mut s = Self::zero(n_vars, order);
        if !c.is_zero() {
            s.terms.insert(MultiIndex::zeros(n_vars), c);
        }
        s
    }

    pub fn one(n_vars: usize, order: usize) -> Self {
        Self::constant(n_vars, order, GaussRational::one())
    }

    /// The variable `x_j` as a series.
    pub fn var(n_vars: usize, order: usize, j: usize) -> Result<Self, FpsError> {
        if j >= n_vars {
            return Err(FpsError::IndexOutOfRange { index: j, n_vars });
        }
        let mut s = Self::zero(n_vars, order);
        if order >= 1 {
            s.terms
                .insert(MultiIndex::unit(n_vars, j), GaussRational::one());
        }
        Ok(s)
    }

    pub fn monomial(
        n_vars: usize,
        order: usize,
        mi: MultiIndex,
        c: GaussRational,
    ) -> Result<Self, FpsError> {
        if mi.len() != n_vars {
            return Err(FpsError::DimensionMismatch {
                expected: n_vars,
                got: mi.len(),
            });
        }
        let mut s = Self::zero(n_vars, order);
        if !c.is_zero() && mi.degree() as usize <= order {
            s.terms.insert(mi, c);
        }
        Ok(s)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of `mi` (zero when absent).
    pub fn coeff(&self, mi: &MultiIndex) -> GaussRational {
        self.terms.get(mi).cloned().unwrap_or_else(GaussRational::zero)
    }

    pub fn constant_term(&self) -> GaussRational {
        self.coeff(&MultiIndex::zeros(self.n_vars))
    }

    /// Iterate `(multi-index, coefficient)` in graded-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &GaussRational)> {
        self.terms.iter()
    }

    /// Smallest total degree with a nonzero coefficient, `None` for zero.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(|mi| mi.degree())
    }

    /// Largest total degree with a nonzero coefficient, `None` for zero.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|mi| mi.degree())
    }

    pub(crate) fn insert_add(&mut self, mi: MultiIndex, c: &GaussRational) {
        if c.is_zero() || mi.degree() as usize > self.order {
            return;
        }
        match self.terms.entry(mi) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Drop terms above `order` and lower the certification to `order`.
    pub fn truncated(&self, order: usize) -> Self {
        let mut out = TruncatedSeries {
            n_vars: self.n_vars,
            order,
            terms: BTreeMap::new(),
        };
        for (mi, c) in &self.terms {
            if mi.degree() as usize > order {
                break;
            }
            out.terms.insert(mi.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -&*c;
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, FpsError> {
        self.check_ring(rhs)?;
        let order = self.order.min(rhs.order);
        let mut out = self.truncated(order);
        for (mi, c) in &rhs.terms {
            if mi.degree() as usize > order {
                break;
            }
            out.insert_add(mi.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, FpsError> {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.n_vars, self.order);
        }
        let mut out = TruncatedSeries {
            n_vars: self.n_vars,
            order: self.order,
            terms: BTreeMap::new(),
        };
        for (mi, v) in &self.terms {
            let p = v * c;
            if !p.is_zero() {
                out.terms.insert(mi.clone(), p);
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, FpsError> {
        self.check_ring(rhs)?;
        Ok(self.mul_to_order(rhs, self.order.min(rhs.order)))
    }

    /// Product keeping terms through `order` regardless of the operand labels.
    /// Only sound when the caller can certify the inputs through the degrees
    /// that actually contribute below `order`; the graded transport chains in
    /// `kcalc` rely on this.
    pub(crate) fn mul_to_order(&self, rhs: &Self, order: usize) -> Self {
        let mut out = TruncatedSeries {
            n_vars: self.n_vars,
            order,
            terms: BTreeMap::new(),
        };
        if self.terms.is_empty() || rhs.terms.is_empty() {
            return out;
        }
        for (mi_a, ca) in &self.terms {
            let da = mi_a.degree() as usize;
            if da > order {
                break;
            }
            let budget = order - da;
            for (mi_b, cb) in &rhs.terms {
                // Graded order makes degree a monotone prefix property.
                if mi_b.degree() as usize > budget {
                    break;
                }
                out.insert_add(mi_a.add(mi_b), &(ca * cb));
            }
        }
        out
    }

    /// Partial derivative in variable `j`; lowers the certified order by one.
    pub fn partial(&self, j: usize) -> Result<Self, FpsError> {
        if j >= self.n_vars {
            return Err(FpsError::IndexOutOfRange {
                index: j,
                n_vars: self.n_vars,
            });
        }
        let order = self.order.saturating_sub(1);
        let mut out = TruncatedSeries {
            n_vars: self.n_vars,
            order,
            terms: BTreeMap::new(),
        };
        for (mi, c) in &self.terms {
            let e = mi.get(j);
            if e == 0 {
                continue;
            }
            let mut v = mi.exponents().to_vec();
            v[j] -= 1;
            let factor = GaussRational::from_int(e as i64);
            out.insert_add(MultiIndex::new(v), &(c * &factor));
        }
        Ok(out)
    }

    /// Iterated partial derivative `d^gamma`; lowers the order by `|gamma|`.
    pub fn partial_multi(&self, gamma: &MultiIndex) -> Result<Self, FpsError> {
        if gamma.len() != self.n_vars {
            return Err(FpsError::DimensionMismatch {
                expected: self.n_vars,
                got: gamma.len(),
            });
        }
        let gdeg = gamma.degree() as usize;
        let order = self.order.saturating_sub(gdeg);
        let mut out = TruncatedSeries {
            n_vars: self.n_vars,
            order,
            terms: BTreeMap::new(),
        };
        'terms: for (mi, c) in &self.terms {
            let mut v = Vec::with_capacity(self.n_vars);
            let mut factor = GaussRational::one();
            for j in 0..self.n_vars {
                let e = mi.get(j);
                let g = gamma.get(j);
                if e < g {
                    continue 'terms;
                }
                // falling factorial e (e-1) ... (e-g+1)
                for t in 0..g {
                    factor = &factor * &GaussRational::from_int((e - t) as i64);
                }
                v.push(e - g);
            }
            out.insert_add(MultiIndex::new(v), &(c * &factor));
        }
        Ok(out)
    }

    /// Map this series into a larger ring: variable `j` becomes variable
    /// `slot_map[j]` of a ring with `new_n_vars` variables.
    pub fn embed(&self, new_n_vars: usize, slot_map: &[usize]) -> Result<Self, FpsError> {
        if slot_map.len() != self.n_vars {
            return Err(FpsError::DimensionMismatch {
                expected: self.n_vars,
                got: slot_map.len(),
            });
        }
        for &s in slot_map {
            if s >= new_n_vars {
                return Err(FpsError::IndexOutOfRange {
                    index: s,
                    n_vars: new_n_vars,
                });
            }
        }
        let mut out = TruncatedSeries {
            n_vars: new_n_vars,
            order: self.order,
            terms: BTreeMap::new(),
        };
        for (mi, c) in &self.terms {
            let mut v = vec![0u32; new_n_vars];
            for j in 0..self.n_vars {
                v[slot_map[j]] += mi.get(j);
            }
            out.terms.insert(MultiIndex::new(v), c.clone());
        }
        Ok(out)
    }

    /// Substitute exact values for a subset of the variables.  `assignments`
    /// has one entry per variable: `Some(value)` replaces the variable,
    /// `None` keeps it.  The surviving variables are renumbered in order.
    /// At least one variable must survive.
    pub fn substitute(
        &self,
        assignments: &[Option<GaussRational>],
    ) -> Result<Self, FpsError> {
        if assignments.len() != self.n_vars {
            return Err(FpsError::DimensionMismatch {
                expected: self.n_vars,
                got: assignments.len(),
            });
        }
        let kept: Vec<usize> = (0..self.n_vars)
            .filter(|&j| assignments[j].is_none())
            .collect();
        assert!(!kept.is_empty(), "substitution must keep at least one variable");
        let mut out = TruncatedSeries {
            n_vars: kept.len(),
            order: self.order,
            terms: BTreeMap::new(),
        };
        for (mi, c) in &self.terms {
            let mut factor = c.clone();
            for (j, assignment) in assignments.iter().enumerate() {
                if let Some(val) = assignment {
                    let e = mi.get(j);
                    if e > 0 {
                        if val.is_zero() {
                            factor = GaussRational::zero();
                            break;
                        }
                        factor = &factor * &val.checked_pow(e as i64).unwrap();
                    }
                }
            }
            if factor.is_zero() {
                continue;
            }
            let v: Vec<u32> = kept.iter().map(|&j| mi.get(j)).collect();
            out.insert_add(MultiIndex::new(v), &factor);
        }
        Ok(out)
    }

    /// Evaluate at a complex point.  Exact rational coefficients are converted
    /// to floating point only at this step; terms are accumulated in graded
    /// order with per-variable power caches.
    pub fn eval_complex(&self, point: &[Complex64]) -> Result<Complex64, FpsError> {
        if point.len() != self.n_vars {
            return Err(FpsError::BadEvalPoint {
                expected: self.n_vars,
                got: point.len(),
            });
        }
        let max_exp: Vec<u32> = (0..self.n_vars)
            .map(|j| self.terms.keys().map(|mi| mi.get(j)).max().unwrap_or(0))
            .collect();
        let powers: Vec<Vec<Complex64>> = (0..self.n_vars)
            .map(|j| {
                let mut v = Vec::with_capacity(max_exp[j] as usize + 1);
                v.push(Complex64::new(1.0, 0.0));
                for e in 1..=max_exp[j] as usize {
                    let prev = v[e - 1];
                    v.push(prev * point[j]);
                }
                v
            })
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (mi, c) in &self.terms {
            let mut term = c.to_complex_f64();
            for j in 0..self.n_vars {
                let e = mi.get(j) as usize;
                if e > 0 {
                    term *= powers[j][e];
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Squared weighted sup-norm `max_s eps^(-2|s|) |c_s|^2`, exact.
    ///
    /// Working with the square keeps the value inside the rationals; callers
    /// comparing against a plain norm bound should square the bound.
    pub fn weighted_norm_sq(&self, eps: &BigRational) -> Result<BigRational, FpsError> {
        if !eps.is_positive() {
            return Err(FpsError::InvalidEpsilon);
        }
        let inv_sq = {
            let e2 = eps * eps;
            BigRational::from_integer(1.into()) / e2
        };
        let mut best = BigRational::zero();
        let mut weight_cache: Vec<BigRational> = vec![BigRational::from_integer(1.into())];
        for (mi, c) in &self.terms {
            let d = mi.degree() as usize;
            while weight_cache.len() <= d {
                let next = weight_cache.last().unwrap() * &inv_sq;
                weight_cache.push(next);
            }
            let v = c.abs_sq() * &weight_cache[d];
            if v > best {
                best = v;
            }
        }
        Ok(best)
    }

    /// Human-readable rendering with caller-supplied variable names.
    pub fn format_with(&self, names: &[&str]) -> String {
        assert_eq!(names.len(), self.n_vars);
        if self.terms.is_empty() {
            return format!("0 + O(^{})", self.order + 1);
        }
        let mut parts = Vec::new();
        for (mi, c) in &self.terms {
            let mut mono = String::new();
            for j in 0..self.n_vars {
                let e = mi.get(j);
                if e == 1 {
                    mono.push_str(&format!("*{}", names[j]));
                } else if e > 1 {
                    mono.push_str(&format!("*{}^{}", names[j], e));
                }
            }
            let cs = format!("{c}");
            let needs_parens = cs.contains(' ') || (cs.contains('/') && !mono.is_empty());
            if needs_parens {
                parts.push(format!("({cs}){mono}"));
            } else {
                parts.push(format!("{cs}{mono}"));
            }
        }
        format!("{} + O(^{})", parts.join(" + "), self.order + 1)
    }

    fn check_ring(&self, rhs: &Self) -> Result<(), FpsError> {
        if self.n_vars != rhs.n_vars {
            return Err(FpsError::DimensionMismatch {
                expected: self.n_vars,
                got: rhs.n_vars,
            });
        }
        Ok(())
    }

    /// Internal consistency check used by tests.
    #[cfg(test)]
    pub(crate) fn check_invariants(&self) {
        for (mi, c) in &self.terms {
            assert_eq!(mi.len(), self.n_vars);
            assert!(!c.is_zero(), "stored zero coefficient");
            assert!(mi.degree() as usize <= self.order, "term above order");
        }
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.n_vars).map(|j| format!("x{j}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        write!(f, "{}", self.format_with(&refs))
    }
}

/// A vector of series sharing one ring (`n_vars`) and one certified order.
#[derive(Clone, PartialEq, Debug)]
pub struct SeriesVector {
    components: Vec<TruncatedSeries>,
}

impl SeriesVector {
    pub fn new(components: Vec<TruncatedSeries>) -> Result<Self, FpsError> {
        assert!(!components.is_empty(), "empty series vector");
        let n = components[0].n_vars();
        let order = components[0].order();
        for c in &components {
            if c.n_vars() != n {
                return Err(FpsError::DimensionMismatch {
                    expected: n,
                    got: c.n_vars(),
                });
            }
            if c.order() != order {
                return Err(FpsError::DimensionMismatch {
                    expected: order,
                    got: c.order(),
                });
            }
        }
        Ok(SeriesVector { components })
    }

    /// The identity map `x_j -> x_j` on an `n`-variable ring.
    pub fn identity(n: usize, order: usize) -> Self {
        SeriesVector {
            components: (0..n)
                .map(|j| TruncatedSeries::var(n, order, j).unwrap())
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn n_vars(&self) -> usize {
        self.components[0].n_vars()
    }

    pub fn order(&self) -> usize {
        self.components[0].order()
    }

    pub fn component(&self, j: usize) -> &TruncatedSeries {
        &self.components[j]
    }

    pub fn components(&self) -> &[TruncatedSeries] {
        &self.components
    }

    pub fn into_components(self) -> Vec<TruncatedSeries> {
        self.components
    }

    pub fn truncated(&self, order: usize) -> Self {
        SeriesVector {
            components: self.components.iter().map(|c| c.truncated(order)).collect(),
        }
    }

    pub fn map<F: FnMut(&TruncatedSeries) -> TruncatedSeries>(&self, mut f: F) -> Self {
        SeriesVector {
            components: self.components.iter().map(|c| f(c)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gr(n: i64) -> GaussRational {
        GaussRational::from_int(n)
    }

    fn k(order: usize) -> TruncatedSeries {
        TruncatedSeries::var(1, order, 0).unwrap()
    }

    #[test]
    fn grlex_ordering() {
        let a = MultiIndex::new(vec![1, 0]);
        let b = MultiIndex::new(vec![0, 1]);
        let c = MultiIndex::new(vec![0, 2]);
        assert!(b < a, "within a degree the comparison is lexicographic");
        assert!(a < c, "degree dominates");
        let mut v = vec![c.clone(), a.clone(), b.clone(), MultiIndex::zeros(2)];
        v.sort();
        assert_eq!(v, vec![MultiIndex::zeros(2), b, a, c]);
    }

    #[test]
    fn add_same_variable() {
        let s = k(4).add(&k(4)).unwrap();
        assert_eq!(s.coeff(&MultiIndex::new(vec![1])), gr(2));
        assert_eq!(s.num_terms(), 1);
        s.check_invariants();
    }

    #[test]
    fn mul_truncates_at_min_order() {
        // (1+k)(1-k) at order 2 -> 1 - k^2
        let one = TruncatedSeries::one(1, 2);
        let a = one.add(&k(2)).unwrap();
        let b = one.sub(&k(2)).unwrap();
        let p = a.mul(&b).unwrap();
        assert_eq!(p.coeff(&MultiIndex::zeros(1)), gr(1));
        assert_eq!(p.coeff(&MultiIndex::new(vec![1])), gr(0));
        assert_eq!(p.coeff(&MultiIndex::new(vec![2])), gr(-1));

        // (1+k)^2 * (1+k) at order 2 -> 1 + 3k + 3k^2 (k^3 dropped)
        let a2 = a.mul(&a).unwrap();
        let p3 = a2.mul(&a).unwrap();
        assert_eq!(p3.order(), 2);
        assert_eq!(p3.coeff(&MultiIndex::zeros(1)), gr(1));
        assert_eq!(p3.coeff(&MultiIndex::new(vec![1])), gr(3));
        assert_eq!(p3.coeff(&MultiIndex::new(vec![2])), gr(3));
        assert_eq!(p3.num_terms(), 3);
    }

    #[test]
    fn partial_lowers_order() {
        // d/dk of k^3 at order 5 -> 3k^2 at order 4
        let k3 = TruncatedSeries::monomial(
            1,
            5,
            MultiIndex::new(vec![3]),
            GaussRational::one(),
        )
        .unwrap();
        let d = k3.partial(0).unwrap();
        assert_eq!(d.order(), 4);
        assert_eq!(d.coeff(&MultiIndex::new(vec![2])), gr(3));

        // two-variable examples
        let k1k2 = TruncatedSeries::monomial(
            2,
            3,
            MultiIndex::new(vec![1, 1]),
            GaussRational::one(),
        )
        .unwrap();
        let d1 = k1k2.partial(0).unwrap();
        assert_eq!(d1.coeff(&MultiIndex::new(vec![0, 1])), gr(1));
        assert_eq!(d1.num_terms(), 1);

        let s = TruncatedSeries::one(2, 3)
            .add(
                &TruncatedSeries::monomial(2, 3, MultiIndex::new(vec![2, 0]), gr(1)).unwrap(),
            )
            .unwrap();
        let d2 = s.partial(1).unwrap();
        assert!(d2.is_zero());
    }

    #[test]
    fn partial_multi_matches_iterated() {
        let mut s = TruncatedSeries::zero(2, 6);
        s.insert_add(MultiIndex::new(vec![3, 2]), &gr(7));
        s.insert_add(MultiIndex::new(vec![1, 4]), &gr(-2));
        let gamma = MultiIndex::new(vec![2, 1]);
        let direct = s.partial_multi(&gamma).unwrap();
        let iterated = s
            .partial(0)
            .unwrap()
            .partial(0)
            .unwrap()
            .partial(1)
            .unwrap();
        assert_eq!(direct, iterated);
    }

    #[test]
    fn mixed_partials_commute() {
        let mut s = TruncatedSeries::zero(3, 5);
        s.insert_add(MultiIndex::new(vec![2, 1, 1]), &gr(3));
        s.insert_add(MultiIndex::new(vec![0, 3, 2]), &gr(5));
        let ab = s.partial(0).unwrap().partial(1).unwrap();
        let ba = s.partial(1).unwrap().partial(0).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn eval_examples() {
        // constant + k + k^2 at k = 0 -> 1
        let s = TruncatedSeries::one(1, 2)
            .add(&k(2))
            .unwrap()
            .add(
                &TruncatedSeries::monomial(1, 2, MultiIndex::new(vec![2]), gr(1)).unwrap(),
            )
            .unwrap();
        let v = s.eval_complex(&[Complex64::new(0.0, 0.0)]).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));

        // k1*k2 at (2,3) -> 6
        let p = TruncatedSeries::monomial(2, 2, MultiIndex::new(vec![1, 1]), gr(1)).unwrap();
        let v = p
            .eval_complex(&[Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)])
            .unwrap();
        assert!((v.re - 6.0).abs() < 1e-15 && v.im == 0.0);
    }

    #[test]
    fn weighted_norm_examples() {
        let one = TruncatedSeries::one(1, 3);
        assert_eq!(
            one.weighted_norm_sq(&BigRational::from_integer(1.into())).unwrap(),
            BigRational::from_integer(1.into())
        );

        // f = x with eps = 1/2: squared norm (1/2)^-2 = 4
        let x = k(3);
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(
            x.weighted_norm_sq(&half).unwrap(),
            BigRational::from_integer(4.into())
        );

        // f = 1 + 2x^2 at eps = 1: max(1, 4) = 4
        let f = TruncatedSeries::one(1, 3)
            .add(&TruncatedSeries::monomial(1, 3, MultiIndex::new(vec![2]), gr(2)).unwrap())
            .unwrap();
        assert_eq!(
            f.weighted_norm_sq(&BigRational::from_integer(1.into())).unwrap(),
            BigRational::from_integer(4.into())
        );

        assert!(f.weighted_norm_sq(&BigRational::zero()).is_err());
    }

    #[test]
    fn substitute_and_embed() {
        // s = k1^2 k2 + k2^3 ; substitute k1 = 2 -> 4 k + k^3
        let mut s = TruncatedSeries::zero(2, 4);
        s.insert_add(MultiIndex::new(vec![2, 1]), &gr(1));
        s.insert_add(MultiIndex::new(vec![0, 3]), &gr(1));
        let sub = s.substitute(&[Some(gr(2)), None]).unwrap();
        assert_eq!(sub.n_vars(), 1);
        assert_eq!(sub.coeff(&MultiIndex::new(vec![1])), gr(4));
        assert_eq!(sub.coeff(&MultiIndex::new(vec![3])), gr(1));

        let e = sub.embed(3, &[2]).unwrap();
        assert_eq!(e.coeff(&MultiIndex::new(vec![0, 0, 1])), gr(4));
    }

    #[test]
    fn dimension_errors_are_reported() {
        let a = TruncatedSeries::one(1, 2);
        let b = TruncatedSeries::one(2, 2);
        assert!(matches!(
            a.add(&b),
            Err(FpsError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            a.partial(1),
            Err(FpsError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            TruncatedSeries::var(2, 3, 5),
            Err(FpsError::IndexOutOfRange { .. })
        ));
    }
}
