//! Normal-ordered differential operators with series coefficients.
//!
//! An element is a finite sum `sum_beta x^beta G_beta(d)` with every
//! polynomial factor moved to the left of every derivative; the coefficient
//! jets `G_beta` all share one ring and one certified order.  Multiplication
//! restores normal order through the higher Leibniz rule
//!
//! ```text
//! G(d) x^beta = sum_{gamma <= beta} C(beta, gamma) x^(beta-gamma) G^(gamma)(d),
//! ```
//!
//! where `G^(gamma)` is the `gamma`-fold derivative of the coefficient jet.
//! Since that consumes certified orders, the product of elements with
//! coefficient order `N` and right-factor polynomial degree `p` carries
//! coefficient order `N - p`.  The polynomial degree itself is never
//! truncated — it is finite and moving `x` factors across derivatives is
//! exact — so the only budget to manage is the coefficient order.

use num::rational::BigRational;

use crate::fps::{binomial, factorial, FpsError, GaussRational, MultiIndex, TruncatedSeries};
use crate::realization::{Realization, RealizationError, StructureConstants};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, thiserror::Error)]
pub enum WeylError {
    #[error("operators live on different rings ({0} vs {1} x-variables)")]
    RingMismatch(usize, usize),
    #[error("coefficient orders differ ({0} vs {1}); truncate explicitly first")]
    OrderMismatch(usize, usize),
    #[error(
        "coefficient order {have} cannot absorb a polynomial degree of {cost}; \
         rebuild the operands with at least order {needed}"
    )]
    OrderExhausted {
        have: usize,
        cost: usize,
        needed: usize,
    },
    #[error("operator has polynomial degree {got}, this operation allows {max}")]
    XDegreeTooHigh { max: u32, got: u32 },
    #[error("result only certifies order {got}, needed {needed}; rebuild the input with more headroom")]
    ApplyShortfall { needed: usize, got: usize },
    #[error(transparent)]
    Fps(#[from] FpsError),
    #[error(transparent)]
    Realization(#[from] RealizationError),
}

/// A normal-ordered operator.  `n` counts the `x`/derivative pairs; the
/// coefficient ring may carry further central parameter slots beyond the
/// first `n` derivative slots.
#[derive(Clone, PartialEq)]
pub struct WeylElement {
    n: usize,
    coeff_vars: usize,
    d_order: usize,
    terms: BTreeMap<MultiIndex, TruncatedSeries>,
}

impl WeylElement {
    pub fn zero(n: usize, coeff_vars: usize, d_order: usize) -> Self {
        assert!(coeff_vars >= n, "coefficient ring must contain the derivative slots");
        WeylElement {
            n,
            coeff_vars,
            d_order,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize, coeff_vars: usize, d_order: usize) -> Self {
        let mut w = Self::zero(n, coeff_vars, d_order);
        w.accumulate(
            MultiIndex::zeros(n),
            TruncatedSeries::one(coeff_vars, d_order),
        );
        w
    }

    /// `sum_b x_b * coeffs[b]`: the first-order operator built from a row of
    /// coefficient jets.
    pub fn from_linear(coeffs: &[TruncatedSeries]) -> Result<Self, WeylError> {
        assert!(!coeffs.is_empty());
        let n = coeffs.len();
        let coeff_vars = coeffs[0].n_vars();
        if coeff_vars < n {
            return Err(WeylError::RingMismatch(n, coeff_vars));
        }
        let d_order = coeffs[0].order();
        let mut w = Self::zero(n, coeff_vars, d_order);
        for (b, c) in coeffs.iter().enumerate() {
            if c.n_vars() != coeff_vars {
                return Err(WeylError::RingMismatch(coeff_vars, c.n_vars()));
            }
            if c.order() != d_order {
                return Err(WeylError::OrderMismatch(d_order, c.order()));
            }
            w.accumulate(MultiIndex::unit(n, b), c.clone());
        }
        Ok(w)
    }

    /// A single normal-ordered term `x^x_exps * coeff`.
    pub fn from_term(
        n: usize,
        x_exps: MultiIndex,
        coeff: TruncatedSeries,
    ) -> Result<Self, WeylError> {
        if x_exps.len() != n || coeff.n_vars() < n {
            return Err(WeylError::RingMismatch(n, coeff.n_vars()));
        }
        let mut w = Self::zero(n, coeff.n_vars(), coeff.order());
        w.accumulate(x_exps, coeff);
        Ok(w)
    }

    /// Add `x^x_exps * coeff` into this element in place.  The coefficient
    /// must certify at least the element's order; it is truncated to it.
    pub fn insert_term(
        &mut self,
        x_exps: MultiIndex,
        coeff: TruncatedSeries,
    ) -> Result<(), WeylError> {
        if x_exps.len() != self.n || coeff.n_vars() != self.coeff_vars {
            return Err(WeylError::RingMismatch(self.coeff_vars, coeff.n_vars()));
        }
        if coeff.order() < self.d_order {
            return Err(WeylError::OrderMismatch(self.d_order, coeff.order()));
        }
        self.accumulate(x_exps, coeff.truncated(self.d_order));
        Ok(())
    }

    fn accumulate(&mut self, x_mi: MultiIndex, coeff: TruncatedSeries) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(x_mi) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let merged = e.get().add(&coeff).unwrap();
                if merged.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = merged;
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeff_vars(&self) -> usize {
        self.coeff_vars
    }

    pub fn d_order(&self) -> usize {
        self.d_order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest polynomial degree present.  This is exact, not a truncation
    /// bound: polynomial degrees never get cut.
    pub fn x_degree(&self) -> u32 {
        self.terms.keys().map(|mi| mi.degree()).max().unwrap_or(0)
    }

    pub fn coefficient(&self, x_mi: &MultiIndex) -> Option<&TruncatedSeries> {
        self.terms.get(x_mi)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &TruncatedSeries)> {
        self.terms.iter()
    }

    /// Flat `(x-exponents, derivative exponents, coefficient)` triples in
    /// deterministic order, for export.
    pub fn term_triples(
        &self,
    ) -> impl Iterator<Item = (&MultiIndex, &MultiIndex, &GaussRational)> {
        self.terms
            .iter()
            .flat_map(|(x_mi, s)| s.terms().map(move |(d_mi, c)| (x_mi, d_mi, c)))
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        let mut out = WeylElement::zero(self.n, self.coeff_vars, self.d_order);
        if c.is_zero() {
            return out;
        }
        for (mi, s) in &self.terms {
            out.accumulate(mi.clone(), s.scale(c));
        }
        out
    }

    fn check_compatible(&self, rhs: &Self) -> Result<(), WeylError> {
        if self.n != rhs.n || self.coeff_vars != rhs.coeff_vars {
            return Err(WeylError::RingMismatch(self.coeff_vars, rhs.coeff_vars));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, WeylError> {
        self.check_compatible(rhs)?;
        let d_order = self.d_order.min(rhs.d_order);
        let mut out = self.truncated(d_order);
        for (mi, s) in &rhs.terms {
            out.accumulate(mi.clone(), s.truncated(d_order));
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, WeylError> {
        self.add(&rhs.neg())
    }

    /// Drop coefficient terms above `order` and lower the certification.
    pub fn truncated(&self, order: usize) -> Self {
        let mut out = WeylElement::zero(self.n, self.coeff_vars, order.min(self.d_order));
        for (mi, s) in &self.terms {
            out.accumulate(mi.clone(), s.truncated(out.d_order));
        }
        out
    }

    /// Normal-ordered product.  The result's coefficient order is
    /// `min(orders) - x_degree(rhs)`.
    pub fn mul(&self, rhs: &Self) -> Result<Self, WeylError> {
        self.check_compatible(rhs)?;
        let have = self.d_order.min(rhs.d_order);
        let cost = rhs.x_degree() as usize;
        let d_out = have.checked_sub(cost).ok_or(WeylError::OrderExhausted {
            have,
            cost,
            needed: cost,
        })?;
        let mut out = WeylElement::zero(self.n, self.coeff_vars, d_out);
        for (alpha, g) in &self.terms {
            for (beta, h) in &rhs.terms {
                for gamma in beta.sub_indices() {
                    // gamma differentiates the first n coefficient slots
                    let gamma_coeff = pad_to(&gamma, self.coeff_vars);
                    let dg = g.partial_multi(&gamma_coeff)?;
                    if dg.is_zero() {
                        continue;
                    }
                    let prod = dg.mul_to_order(h, d_out);
                    if prod.is_zero() {
                        continue;
                    }
                    let c = multinomial(beta, &gamma);
                    let x_mi = alpha.add(&beta.checked_sub(&gamma).unwrap());
                    out.accumulate(x_mi, prod.scale(&c));
                }
            }
        }
        Ok(out)
    }

    /// `self * rhs - rhs * self`, at the common certified order of the two
    /// products.
    pub fn commutator(&self, rhs: &Self) -> Result<Self, WeylError> {
        let ab = self.mul(rhs)?;
        let ba = rhs.mul(self)?;
        ab.sub(&ba)
    }

    /// Collapse into one commutative jet on the combined
    /// `(x, derivative-and-parameter)` ring, keeping total degree up to
    /// `order`.  Useful for comparisons; `order` may not exceed the
    /// coefficient certification.
    pub fn flatten_truncated(&self, order: usize) -> Result<TruncatedSeries, WeylError> {
        if order > self.d_order {
            return Err(WeylError::ApplyShortfall {
                needed: order,
                got: self.d_order,
            });
        }
        let total = self.n + self.coeff_vars;
        let slot_map: Vec<usize> = (self.n..total).collect();
        let mut acc = TruncatedSeries::zero(total, order);
        for (x_mi, s) in &self.terms {
            let xdeg = x_mi.degree() as usize;
            if xdeg > order {
                continue;
            }
            let lifted = s.embed(total, &slot_map)?;
            let mono = TruncatedSeries::monomial(
                total,
                order,
                pad_to(x_mi, total),
                GaussRational::one(),
            )?;
            acc = acc.add(&mono.mul_to_order(&lifted, order))?;
        }
        Ok(acc)
    }
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeylElement(n={}, d_order={})", self.n, self.d_order)?;
        for (x_mi, d_mi, c) in self.term_triples() {
            write!(
                f,
                "\n  x^{:?} d^{:?}: {}",
                x_mi.exponents(),
                d_mi.exponents(),
                c
            )?;
        }
        Ok(())
    }
}

/// Pad a multi-index with zeros on the right.
fn pad_to(mi: &MultiIndex, len: usize) -> MultiIndex {
    let mut v = mi.exponents().to_vec();
    v.resize(len, 0);
    MultiIndex::new(v)
}

fn multinomial(beta: &MultiIndex, gamma: &MultiIndex) -> GaussRational {
    let mut acc = BigRational::from_integer(1.into());
    for j in 0..beta.len() {
        acc *= BigRational::from_integer(binomial(beta.get(j) as usize, gamma.get(j) as usize));
    }
    GaussRational::from_rational(acc)
}

fn inv_gamma_factorial(gamma: &MultiIndex) -> GaussRational {
    let mut acc = BigRational::from_integer(1.into());
    for j in 0..gamma.len() {
        acc *= BigRational::from_integer(factorial(gamma.get(j) as usize));
    }
    GaussRational::from_rational(BigRational::from_integer(1.into()) / acc)
}

/// The generators of a realization as first-order operators: generator `a`
/// is `sum_b x_b * phi[b][a](d)`, coefficients certified at `d_order`.
pub fn realize_generators(
    realization: &Realization,
    d_order: usize,
) -> Result<Vec<WeylElement>, WeylError> {
    let n = realization.n();
    let phi = realization.phi_matrix(d_order)?;
    let mut gens = Vec::with_capacity(n);
    for a in 0..n {
        let column: Vec<TruncatedSeries> = (0..n).map(|b| phi[b][a].clone()).collect();
        gens.push(WeylElement::from_linear(&column)?);
    }
    Ok(gens)
}

/// Location and size of a nonzero bracket residual.
#[derive(Clone, Debug)]
pub struct ResidualSample {
    /// One-based generator pair.
    pub i: usize,
    pub j: usize,
    pub x_exponents: Vec<u32>,
    pub d_exponents: Vec<u32>,
    pub coefficient: String,
    pub magnitude: f64,
}

/// Outcome of the operator-level bracket check.
#[derive(Clone, Debug)]
pub struct HomomorphismReport {
    pub ok: bool,
    pub pairs_checked: usize,
    /// Commutators consume one coefficient order, so the check certifies one
    /// less than the generators carry.
    pub order_checked: usize,
    /// The largest-magnitude residual coefficient over all pairs, when any.
    pub worst: Option<ResidualSample>,
}

/// Verify `[g_i, g_j] = sum_s C(i, j, s) g_s` as operators, exactly.
pub fn check_lie_homomorphism(
    generators: &[WeylElement],
    constants: &StructureConstants,
) -> Result<HomomorphismReport, WeylError> {
    let n = constants.n();
    assert_eq!(generators.len(), n, "one generator per structure index");
    let mut worst: Option<ResidualSample> = None;
    let mut order_checked = usize::MAX;
    let mut pairs = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            pairs += 1;
            let mut residual = generators[i].commutator(&generators[j])?;
            let order = residual.d_order();
            for s in 0..n {
                let c = constants.get(i, j, s);
                if !c.is_zero() {
                    residual = residual.sub(&generators[s].truncated(order).scale(&c))?;
                }
            }
            order_checked = order_checked.min(residual.d_order());
            for (x_mi, d_mi, coeff) in residual.term_triples() {
                let magnitude = coeff.l1_norm_f64();
                if worst.as_ref().map_or(true, |w| magnitude > w.magnitude) {
                    worst = Some(ResidualSample {
                        i: i + 1,
                        j: j + 1,
                        x_exponents: x_mi.exponents().to_vec(),
                        d_exponents: d_mi.exponents().to_vec(),
                        coefficient: format!("{coeff}"),
                        magnitude,
                    });
                }
            }
        }
    }
    Ok(HomomorphismReport {
        ok: worst.is_none(),
        pairs_checked: pairs,
        order_checked: if pairs == 0 { 0 } else { order_checked },
        worst,
    })
}

/// Brute-force operator exponential of a first-order element.
///
/// The exponent is graded by an adjoined central parameter (the last
/// coefficient slot of the result), so the series terminates at
/// `target_order`.  Powers consume coefficient orders — each factor has
/// polynomial degree one — hence the input must carry order at least
/// `2 * target_order` to certify the result at `target_order`.
pub fn weyl_exp_bruteforce(
    a: &WeylElement,
    target_order: usize,
) -> Result<WeylElement, WeylError> {
    if a.x_degree() > 1 {
        return Err(WeylError::XDegreeTooHigh {
            max: 1,
            got: a.x_degree(),
        });
    }
    let needed = 2 * target_order;
    if a.d_order < needed {
        return Err(WeylError::OrderExhausted {
            have: a.d_order,
            cost: target_order,
            needed,
        });
    }
    let coeff_vars = a.coeff_vars + 1;
    let lambda_slot = a.coeff_vars;
    let slot_map: Vec<usize> = (0..a.coeff_vars).collect();
    let lambda = TruncatedSeries::var(coeff_vars, a.d_order, lambda_slot)?;
    // b = lambda * a in the extended ring
    let mut b = WeylElement::zero(a.n, coeff_vars, a.d_order);
    for (x_mi, s) in &a.terms {
        let lifted = s.embed(coeff_vars, &slot_map)?;
        b.accumulate(x_mi.clone(), lambda.mul_to_order(&lifted, a.d_order));
    }
    let mut acc = WeylElement::identity(a.n, coeff_vars, a.d_order);
    let mut power = WeylElement::identity(a.n, coeff_vars, a.d_order);
    for m in 1..=target_order {
        power = power.mul(&b)?;
        power = power.scale(&GaussRational::from_ratio(1, m as i64));
        acc = acc.add(&power)?;
    }
    if acc.d_order < target_order {
        return Err(WeylError::ApplyShortfall {
            needed: target_order,
            got: acc.d_order,
        });
    }
    Ok(acc.truncated(target_order))
}

/// Apply `exp(w)` to the formal exponential state: the result is the
/// polynomial prefactor `h` with `exp(w) e^(<x, q>) = h(x, q, ...) e^(<x, q>)`.
///
/// The ring of `h` is `[x (n) | q and parameters (coeff_vars) | grading
/// parameter (1)]`; each application of `w` raises the final slot's degree
/// by one, which both terminates the series and grades it.  Derivative slots
/// of the coefficients turn into `q` plus an `x`-derivative acting on the
/// prefactor built so far.  Certified orders are tracked honestly through
/// every step, so the input needs generous coefficient headroom; the result
/// is checked against `target_order` and truncated to it.
pub fn fock_apply_exp_formal(
    w: &WeylElement,
    target_order: usize,
) -> Result<TruncatedSeries, WeylError> {
    let n = w.n;
    let total = n + w.coeff_vars + 1;
    let lambda_slot = n + w.coeff_vars;
    let coeff_slot_map: Vec<usize> = (n..n + w.coeff_vars).collect();
    let ring_order = w.d_order;
    let mut acc = TruncatedSeries::one(total, ring_order);
    let mut term = acc.clone();
    let mut m = 0usize;
    while !term.is_zero() {
        m += 1;
        if m > ring_order + 1 {
            // unreachable thanks to the grading slot; kept as a hard stop
            return Err(WeylError::ApplyShortfall {
                needed: target_order,
                got: 0,
            });
        }
        let max_x = (0..n)
            .map(|j| {
                term.terms()
                    .map(|(mi, _)| mi.get(j))
                    .max()
                    .unwrap_or(0)
            })
            .collect::<Vec<u32>>();
        let gamma_bound = MultiIndex::new(max_x);
        let mut next = TruncatedSeries::zero(total, term.order());
        for (beta, g) in &w.terms {
            for gamma in gamma_bound.sub_indices() {
                let dg = g.partial_multi(&pad_to(&gamma, w.coeff_vars))?;
                if dg.is_zero() {
                    continue;
                }
                let dh = term.partial_multi(&pad_to(&gamma, total))?;
                if dh.is_zero() {
                    continue;
                }
                let lifted = dg.embed(total, &coeff_slot_map)?;
                let mut x_exps = pad_to(beta, total);
                x_exps = x_exps.add(&MultiIndex::unit(total, lambda_slot));
                let mono = TruncatedSeries::monomial(
                    total,
                    dh.order(),
                    x_exps,
                    inv_gamma_factorial(&gamma),
                )?;
                let piece = mono.mul(&lifted.mul(&dh)?)?;
                next = next.add(&piece)?;
            }
        }
        term = next.scale(&GaussRational::from_ratio(1, m as i64));
        acc = acc.add(&term)?;
    }
    if acc.order() < target_order {
        return Err(WeylError::ApplyShortfall {
            needed: target_order,
            got: acc.order(),
        });
    }
    Ok(acc.truncated(target_order))
}
