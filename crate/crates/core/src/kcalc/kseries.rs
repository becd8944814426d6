//! The momentum flow series `K`: the exponent produced when a star
//! exponential hits a plane wave.
//!
//! Three closely related solutions of `dK/dlambda = F(K)`, `K(0, q) = q`
//! share the Lie-series engine `K_i = q_i + sum_m lambda^m O^(m-1)(F_i)/m!`
//! with the orbit derivation `O(g) = sum_i F_i dg/dq_i`:
//!
//! * `Formal`: lambda is a ring variable, the flow is a caller-supplied jet;
//! * `LambdaOne`: lambda is resummed at 1, legal only when the orbit
//!   terminates degree by degree;
//! * `Realization`: the flow is `F_a = sum_j k_j psi_aj(q)`, linear in the
//!   adjoined `k` block, which makes the `m`-th orbit term homogeneous of
//!   `k`-degree `m` — lambda = 1 is then free (recover it by `k -> lambda k`)
//!   and the computation stays sharp at the requested order.

use super::{orbit_apply, orbit_apply_graded, KcalcError};
use crate::fps::{GaussRational, SeriesVector, TruncatedSeries};
use crate::realization::Realization;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KSeriesKind {
    /// Ring `[q (n) | lambda]`.
    Formal,
    /// Ring `[q (n)]`.
    LambdaOne,
    /// Ring `[k (n) | q (n)]`.
    Realization,
}

#[derive(Clone, Debug)]
pub struct KSeries {
    kind: KSeriesKind,
    n: usize,
    order: usize,
    components: Vec<TruncatedSeries>,
}

impl KSeries {
    pub fn kind(&self) -> KSeriesKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn component(&self, i: usize) -> &TruncatedSeries {
        &self.components[i]
    }

    pub fn components(&self) -> &[TruncatedSeries] {
        &self.components
    }

    /// The `lambda -> 0` (formal mode) or `k -> 0` (realization mode) slice,
    /// which must be the identity map on `q`.
    pub fn boundary_slice(&self) -> Result<Vec<TruncatedSeries>, KcalcError> {
        let assignments: Vec<Option<GaussRational>> = match self.kind {
            KSeriesKind::Formal => (0..self.n)
                .map(|_| None)
                .chain(std::iter::once(Some(GaussRational::zero())))
                .collect(),
            KSeriesKind::Realization => (0..self.n)
                .map(|_| Some(GaussRational::zero()))
                .chain((0..self.n).map(|_| None))
                .collect(),
            KSeriesKind::LambdaOne => {
                return Err(KcalcError::WrongMode {
                    expected: KSeriesKind::Formal,
                    got: self.kind,
                })
            }
        };
        let mut out = Vec::with_capacity(self.n);
        for c in &self.components {
            out.push(c.substitute(&assignments)?);
        }
        Ok(out)
    }
}

/// Generic flow, explicit lambda.  The flow components are jets in the `n`
/// momentum slots and must carry order at least `2 * order - 1`; the result
/// lives in the `[q | lambda]` ring, exact through joint order `order`.
pub fn k_series_formal_solution(
    flow: &SeriesVector,
    order: usize,
) -> Result<KSeries, KcalcError> {
    let n = flow.len();
    if flow.n_vars() != n {
        return Err(KcalcError::Fps(crate::fps::FpsError::DimensionMismatch {
            expected: n,
            got: flow.n_vars(),
        }));
    }
    let needed = (2 * order).saturating_sub(1);
    if flow.order() < needed {
        return Err(KcalcError::OrderBudget {
            requested: order,
            have: flow.order(),
            needed,
        });
    }
    let slot_map: Vec<usize> = (0..n).collect();
    let lambda_slot = n;
    let mut components = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = TruncatedSeries::var(n + 1, order, i)?;
        let mut g = flow.component(i).clone();
        let mut inv_fact = GaussRational::one();
        for m in 1..=order {
            inv_fact = &inv_fact * &GaussRational::from_ratio(1, m as i64);
            if g.is_zero() {
                break;
            }
            let mut lam = vec![0u32; n + 1];
            lam[lambda_slot] = m as u32;
            let mono = TruncatedSeries::monomial(
                n + 1,
                g.order(),
                crate::fps::MultiIndex::new(lam),
                inv_fact.clone(),
            )?;
            let term = mono.mul(&g.embed(n + 1, &slot_map)?)?;
            acc = acc.add(&term.truncated(order))?;
            if m < order {
                g = orbit_apply(flow.components(), &g, 0)?;
            }
        }
        components.push(acc.truncated(order));
    }
    Ok(KSeries {
        kind: KSeriesKind::Formal,
        n,
        order,
        components,
    })
}

/// Generic flow with lambda resummed at 1.  Sound only when the orbit
/// terminates: either every flow component vanishes to second order (each
/// orbit step then raises the valuation) or the iterated orbit dies out on
/// its own.  The flow must carry order at least `2 * order`.
pub fn k_series_at_lambda_one(
    flow: &SeriesVector,
    order: usize,
) -> Result<KSeries, KcalcError> {
    let n = flow.len();
    if flow.n_vars() != n {
        return Err(KcalcError::Fps(crate::fps::FpsError::DimensionMismatch {
            expected: n,
            got: flow.n_vars(),
        }));
    }
    let needed = 2 * order;
    if flow.order() < needed {
        return Err(KcalcError::OrderBudget {
            requested: order,
            have: flow.order(),
            needed,
        });
    }
    let tame = flow
        .components()
        .iter()
        .all(|f| f.min_degree().map_or(true, |d| d >= 2));
    let mut components = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = TruncatedSeries::var(n, order, i)?;
        let mut g = flow.component(i).clone();
        let mut inv_fact = GaussRational::one();
        let mut m = 1usize;
        loop {
            inv_fact = &inv_fact * &GaussRational::from_ratio(1, m as i64);
            if g.truncated(order).is_zero() {
                break;
            }
            acc = acc.add(&g.scale(&inv_fact).truncated(order))?;
            m += 1;
            if m > order + 1 {
                // a tame flow's m-th orbit term has valuation > order by
                // now, so reaching this point means the flow is not tame
                debug_assert!(!tame);
                return Err(KcalcError::LambdaOneDivergence);
            }
            g = orbit_apply(flow.components(), &g, 0)?;
        }
        components.push(acc.truncated(order));
    }
    Ok(KSeries {
        kind: KSeriesKind::LambdaOne,
        n,
        order,
        components,
    })
}

/// The momentum flow of a realization: `K` in the doubled `[k | q]` ring,
/// exact through total order `order`, with lambda fixed to 1.
///
/// Linearity of the flow in `k` grades the Lie series by `k`-degree, so no
/// order over-allocation is needed; a test cross-checks this sharp path
/// against the budgeted generic one.
pub fn k_series_realization(r: &Realization, order: usize) -> Result<KSeries, KcalcError> {
    let n = r.n();
    let flow = r.flow_series(order)?;
    for f in flow.components() {
        debug_assert!(f.min_degree().map_or(true, |d| d >= 1));
    }
    let mut components = Vec::with_capacity(n);
    for a in 0..n {
        let mut acc = TruncatedSeries::var(2 * n, order, n + a)?;
        let mut g = flow.component(a).clone();
        let mut inv_fact = GaussRational::one();
        for m in 1..=order {
            inv_fact = &inv_fact * &GaussRational::from_ratio(1, m as i64);
            if g.is_zero() {
                break;
            }
            acc = acc.add(&g.scale(&inv_fact))?;
            if m < order {
                g = orbit_apply_graded(flow.components(), &g, n, order)?;
            }
        }
        components.push(acc);
    }
    Ok(KSeries {
        kind: KSeriesKind::Realization,
        n,
        order,
        components,
    })
}

/// Exact check of the defining system `sum_i F_i(q) dK_j/dq_i = dK_j/dlambda`
/// through order `order - 1`, for formal-mode series.
pub fn verify_flow_pde(k: &KSeries, flow: &SeriesVector) -> Result<bool, KcalcError> {
    if k.kind != KSeriesKind::Formal {
        return Err(KcalcError::WrongMode {
            expected: KSeriesKind::Formal,
            got: k.kind,
        });
    }
    let n = k.n;
    let slot_map: Vec<usize> = (0..n).collect();
    for j in 0..n {
        let kj = k.component(j);
        let mut lhs = TruncatedSeries::zero(n + 1, k.order.saturating_sub(1));
        for i in 0..n {
            let dk = kj.partial(i)?;
            if dk.is_zero() {
                continue;
            }
            lhs = lhs.add(&flow.component(i).embed(n + 1, &slot_map)?.mul(&dk)?)?;
        }
        let rhs = kj.partial(n)?;
        let t = lhs.order().min(rhs.order());
        if lhs.truncated(t) != rhs.truncated(t) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fps::MultiIndex;

    fn rat(p: i64, q: i64) -> GaussRational {
        GaussRational::from_ratio(p, q)
    }

    fn mono1(order: usize, exp: u32, c: GaussRational) -> TruncatedSeries {
        TruncatedSeries::monomial(1, order, MultiIndex::new(vec![exp]), c).unwrap()
    }

    #[test]
    fn exponential_growth_flow() {
        // F = q: K = q e^lambda
        let flow = SeriesVector::new(vec![mono1(11, 1, rat(1, 1))]).unwrap();
        let k = k_series_formal_solution(&flow, 6).unwrap();
        let kq = k.component(0);
        let mut fact = 1i64;
        for m in 0..=5usize {
            if m > 0 {
                fact *= m as i64;
            }
            assert_eq!(
                kq.coeff(&MultiIndex::new(vec![1, m as u32])),
                rat(1, fact),
                "q lambda^{m} / {m}!"
            );
        }
        assert_eq!(kq.coeff(&MultiIndex::new(vec![2, 1])), rat(0, 1));
        assert!(verify_flow_pde(&k, &flow).unwrap());
        // boundary slice is the identity
        let slice = k.boundary_slice().unwrap();
        assert_eq!(slice[0], TruncatedSeries::var(1, 6, 0).unwrap());
    }

    #[test]
    fn square_flow_resums_to_geometric() {
        // F = q^2 at lambda = 1: jet of q / (1 - q)
        let flow = SeriesVector::new(vec![mono1(16, 2, rat(1, 1))]).unwrap();
        let k = k_series_at_lambda_one(&flow, 8).unwrap();
        let kq = k.component(0);
        for e in 1..=8u32 {
            assert_eq!(kq.coeff(&MultiIndex::new(vec![e])), rat(1, 1));
        }
    }

    #[test]
    fn cube_flow_resums_to_binomial() {
        // F = q^3 at lambda = 1: jet of q (1 - 2 q^2)^(-1/2)
        let flow = SeriesVector::new(vec![mono1(10, 3, rat(1, 1))]).unwrap();
        let k = k_series_at_lambda_one(&flow, 5).unwrap();
        let kq = k.component(0);
        assert_eq!(kq.coeff(&MultiIndex::new(vec![1])), rat(1, 1));
        assert_eq!(kq.coeff(&MultiIndex::new(vec![2])), rat(0, 1));
        assert_eq!(kq.coeff(&MultiIndex::new(vec![3])), rat(1, 1));
        assert_eq!(kq.coeff(&MultiIndex::new(vec![4])), rat(0, 1));
        assert_eq!(kq.coeff(&MultiIndex::new(vec![5])), rat(3, 2));
    }

    #[test]
    fn constant_flow_terminates() {
        // F = c is not tame but its orbit dies immediately: K = q + c
        let flow = SeriesVector::new(vec![TruncatedSeries::constant(1, 12, rat(3, 1))]).unwrap();
        let k = k_series_at_lambda_one(&flow, 6).unwrap();
        let want = TruncatedSeries::var(1, 6, 0)
            .unwrap()
            .add(&TruncatedSeries::constant(1, 6, rat(3, 1)))
            .unwrap();
        assert_eq!(k.component(0), &want);
    }

    #[test]
    fn linear_flow_diverges_at_lambda_one() {
        // F = q: K(1, q) = e q has an irrational coefficient; the orbit
        // never terminates and the resummation must refuse
        let flow = SeriesVector::new(vec![mono1(12, 1, rat(1, 1))]).unwrap();
        assert!(matches!(
            k_series_at_lambda_one(&flow, 6),
            Err(KcalcError::LambdaOneDivergence)
        ));
    }

    #[test]
    fn two_variable_pde() {
        let q1 = TruncatedSeries::var(2, 9, 0).unwrap();
        let q2 = TruncatedSeries::var(2, 9, 1).unwrap();
        let f1 = q1.mul(&q2).unwrap().sub(&q2).unwrap();
        let f2 = q1.add(&q2.mul(&q2).unwrap().scale(&rat(-2, 1))).unwrap();
        let flow = SeriesVector::new(vec![f1, f2]).unwrap();
        let k = k_series_formal_solution(&flow, 5).unwrap();
        assert!(verify_flow_pde(&k, &flow).unwrap());
        let slice = k.boundary_slice().unwrap();
        assert_eq!(slice[0], TruncatedSeries::var(2, 5, 0).unwrap());
        assert_eq!(slice[1], TruncatedSeries::var(2, 5, 1).unwrap());
    }

    #[test]
    fn abelian_realization_is_additive() {
        let r = Realization::builtin("abelian", Some(3), GaussRational::one()).unwrap();
        let k = k_series_realization(&r, 5).unwrap();
        for a in 0..3 {
            let want = TruncatedSeries::var(6, 5, a)
                .unwrap()
                .add(&TruncatedSeries::var(6, 5, 3 + a).unwrap())
                .unwrap();
            assert_eq!(k.component(a), &want, "component {a}");
        }
    }

    #[test]
    fn symmetric_k0_is_identity() {
        let r = Realization::builtin("su2_sym", None, GaussRational::one()).unwrap();
        let k = k_series_realization(&r, 5).unwrap();
        let slice: Vec<TruncatedSeries> = {
            // k-block slice at q = 0
            let assignments: Vec<Option<GaussRational>> = (0..3)
                .map(|_| None)
                .chain((0..3).map(|_| Some(GaussRational::zero())))
                .collect();
            k.components()
                .iter()
                .map(|c| c.substitute(&assignments).unwrap())
                .collect()
        };
        for (a, s) in slice.iter().enumerate() {
            assert_eq!(s, &TruncatedSeries::var(3, 5, a).unwrap(), "K0 component {a}");
        }
    }

    #[test]
    fn realization_boundary_slice() {
        let r = Realization::builtin("su2_fl", None, rat(1, 2)).unwrap();
        let k = k_series_realization(&r, 4).unwrap();
        let slice = k.boundary_slice().unwrap();
        for (a, s) in slice.iter().enumerate() {
            assert_eq!(s, &TruncatedSeries::var(3, 4, a).unwrap());
        }
    }

    #[test]
    fn sharp_path_matches_budgeted_path() {
        // run the realization flow through the generic machinery with the
        // full 2M-1 budget and lambda tracking, then set k -> lambda k by
        // grading: the coefficient of lambda^m collects exactly the
        // k-degree-m terms, so dropping lambda must reproduce the sharp K
        let order = 4;
        let r = Realization::builtin("su2_fl", None, GaussRational::one()).unwrap();
        let sharp = k_series_realization(&r, order).unwrap();
        let wide = r.flow_series(2 * order - 1).unwrap();
        let n = 3usize;
        for a in 0..n {
            let mut acc = TruncatedSeries::var(2 * n, order, n + a).unwrap();
            let mut g = wide.component(a).clone();
            let mut inv_fact = rat(1, 1);
            for m in 1..=order {
                inv_fact = &inv_fact * &rat(1, m as i64);
                if g.is_zero() {
                    break;
                }
                acc = acc.add(&g.scale(&inv_fact).truncated(order)).unwrap();
                if m < order {
                    // honest min-rule orbit step, no grading shortcut
                    g = orbit_apply(wide.components(), &g, n).unwrap();
                }
            }
            assert_eq!(&acc.truncated(order), sharp.component(a), "component {a}");
        }
    }

    #[test]
    fn formal_budget_is_enforced() {
        let flow = SeriesVector::new(vec![mono1(6, 2, rat(1, 1))]).unwrap();
        assert!(matches!(
            k_series_formal_solution(&flow, 4),
            Err(KcalcError::OrderBudget { needed: 7, .. })
        ));
        assert!(matches!(
            k_series_at_lambda_one(&flow, 4),
            Err(KcalcError::OrderBudget { needed: 8, .. })
        ));
    }
}
