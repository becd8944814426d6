//! Composition of jets, formal map inversion, and exact series division.

use std::collections::BTreeMap;

use super::{FpsError, GaussRational, MultiIndex, SeriesVector, TruncatedSeries};

/// Substitute `args[j]` for variable `j` of `f`.  Every argument must have
/// zero constant term, otherwise infinitely many terms of `f` would feed a
/// single output coefficient.  The result lives in the arguments' ring and is
/// certified through `min(f.order, args order)`.
pub fn compose(
    f: &TruncatedSeries,
    args: &[TruncatedSeries],
) -> Result<TruncatedSeries, FpsError> {
    for (idx, a) in args.iter().enumerate() {
        if !a.constant_term().is_zero() {
            return Err(FpsError::CompositionDivergence { arg: idx });
        }
    }
    let order = args
        .iter()
        .map(|a| a.order())
        .min()
        .unwrap_or(usize::MAX)
        .min(f.order());
    compose_inner(f, args, order, true)
}

/// Substitute into `f` treated as an exact polynomial: arguments may carry
/// nonzero constant terms.  The caller is responsible for `f` really being
/// polynomial (all coefficients beyond its stored terms zero), otherwise the
/// result is meaningless; the certified order is the arguments' order alone.
pub fn compose_exact_poly(
    f: &TruncatedSeries,
    args: &[TruncatedSeries],
) -> Result<TruncatedSeries, FpsError> {
    let order = args.iter().map(|a| a.order()).min().unwrap_or(0);
    compose_inner(f, args, order, false)
}

fn compose_inner(
    f: &TruncatedSeries,
    args: &[TruncatedSeries],
    order: usize,
    degree_break: bool,
) -> Result<TruncatedSeries, FpsError> {
    if args.len() != f.n_vars() {
        return Err(FpsError::DimensionMismatch {
            expected: f.n_vars(),
            got: args.len(),
        });
    }
    let n = args[0].n_vars();
    for a in args {
        if a.n_vars() != n {
            return Err(FpsError::DimensionMismatch {
                expected: n,
                got: a.n_vars(),
            });
        }
    }
    // powers[j][e] = args[j]^e, filled on demand
    let mut powers: Vec<Vec<TruncatedSeries>> = (0..args.len())
        .map(|_| vec![TruncatedSeries::one(n, order)])
        .collect();
    let mut acc = TruncatedSeries::zero(n, order);
    for (mi, c) in f.terms() {
        if degree_break && mi.degree() as usize > order {
            break;
        }
        let mut term = TruncatedSeries::constant(n, order, c.clone());
        for (j, cache) in powers.iter_mut().enumerate() {
            let e = mi.get(j) as usize;
            while cache.len() <= e {
                let next = cache.last().unwrap().mul_to_order(&args[j], order);
                cache.push(next);
            }
            if e > 0 {
                term = term.mul_to_order(&cache[e], order);
            }
        }
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// Compositional inverse of a formal map tangent to the identity
/// (`f_j = x_j + higher order`).  Fixed-point iteration `g <- id - (f - id) o g`
/// gains at least one exact degree per pass.
pub fn invert_formal_map(f: &SeriesVector) -> Result<SeriesVector, FpsError> {
    let n = f.len();
    if f.n_vars() != n {
        return Err(FpsError::NotTangentToIdentity(format!(
            "map has {} components but {} variables",
            n,
            f.n_vars()
        )));
    }
    let order = f.order();
    for j in 0..n {
        let fj = f.component(j);
        if !fj.constant_term().is_zero() {
            return Err(FpsError::NotTangentToIdentity(format!(
                "component {} has constant term {}",
                j + 1,
                fj.constant_term()
            )));
        }
        for i in 0..n {
            let c = fj.coeff(&MultiIndex::unit(n, i));
            let expected = if i == j {
                GaussRational::one()
            } else {
                GaussRational::zero()
            };
            if c != expected {
                return Err(FpsError::NotTangentToIdentity(format!(
                    "linear part entry ({}, {}) is {}, expected {}",
                    j + 1,
                    i + 1,
                    c,
                    expected
                )));
            }
        }
    }
    let id = SeriesVector::identity(n, order);
    let h: Vec<TruncatedSeries> = (0..n)
        .map(|j| f.component(j).sub(id.component(j)).unwrap())
        .collect();
    let mut g = id.clone();
    for _ in 0..order.max(1) {
        let mut next = Vec::with_capacity(n);
        for j in 0..n {
            let corr = compose(&h[j], g.components())?;
            next.push(id.component(j).sub(&corr)?);
        }
        let next = SeriesVector::new(next)?;
        if next == g {
            break;
        }
        g = next;
    }
    Ok(g)
}

/// Multiplicative inverse of a jet with invertible constant term, via the
/// geometric series for `1 / (c (1 - w))`.
pub fn recip(u: &TruncatedSeries) -> Result<TruncatedSeries, FpsError> {
    if u.is_zero() {
        return Err(FpsError::DivisionByZero);
    }
    let c = u.constant_term();
    if c.is_zero() {
        return Err(FpsError::NotDivisible(
            "reciprocal needs a nonzero constant term; use exact division for \
             arguments of positive valuation"
                .into(),
        ));
    }
    let n = u.n_vars();
    let order = u.order();
    let c_inv = c.checked_recip().unwrap();
    // w = 1 - u/c has zero constant term
    let w = TruncatedSeries::one(n, order).sub(&u.scale(&c_inv))?;
    let mut acc = TruncatedSeries::one(n, order);
    for _ in 0..order {
        acc = acc.mul_to_order(&w, order);
        acc.insert_add(MultiIndex::zeros(n), &GaussRational::one());
    }
    Ok(acc.scale(&c_inv))
}

/// Exact division `a / b`.
///
/// For a divisor with invertible constant term this is `a * recip(b)`.  For a
/// divisor of valuation `v >= 1` the quotient is found degree by degree: each
/// homogeneous slice of the numerator is reduced against the lowest
/// homogeneous part of the divisor under the graded-lexicographic term order,
/// and any irreducible remainder means the division is not exact.  The
/// quotient is certified through `min(a.order, b.order) - v`.
pub fn div_exact(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries, FpsError> {
    if a.n_vars() != b.n_vars() {
        return Err(FpsError::DimensionMismatch {
            expected: a.n_vars(),
            got: b.n_vars(),
        });
    }
    if b.is_zero() {
        return Err(FpsError::DivisionByZero);
    }
    if !b.constant_term().is_zero() {
        return a.mul(&recip(b)?);
    }
    let n = a.n_vars();
    let v = b.min_degree().unwrap() as usize;
    let joint = a.order().min(b.order());
    let q_order = joint.checked_sub(v).ok_or_else(|| {
        FpsError::NotDivisible(format!(
            "divisor valuation {v} exceeds the certified order {joint}; no quotient \
             coefficient can be pinned down"
        ))
    })?;
    if let Some(d) = a.min_degree() {
        if (d as usize) < v {
            return Err(FpsError::NotDivisible(format!(
                "numerator has valuation {d}, divisor has valuation {v}"
            )));
        }
    }

    // lowest homogeneous part of the divisor and its leading monomial
    let b_low: Vec<(MultiIndex, GaussRational)> = b
        .terms()
        .take_while(|(mi, _)| mi.degree() as usize == v)
        .map(|(mi, c)| (mi.clone(), c.clone()))
        .collect();
    let (lt_mi, lt_c) = b_low.last().cloned().unwrap();

    let mut q = TruncatedSeries::zero(n, q_order);
    for d in v..=joint {
        // residual slice R_d = a_d - (q * b)_d using quotient degrees < d - v
        let mut residual: BTreeMap<MultiIndex, GaussRational> = a
            .terms()
            .skip_while(|(mi, _)| (mi.degree() as usize) < d)
            .take_while(|(mi, _)| mi.degree() as usize == d)
            .map(|(mi, c)| (mi.clone(), c.clone()))
            .collect();
        for (qmi, qc) in q.terms() {
            let qd = qmi.degree() as usize;
            if qd >= d - v {
                break;
            }
            let bd = d - qd;
            for (bmi, bc) in b
                .terms()
                .skip_while(|(mi, _)| (mi.degree() as usize) < bd)
                .take_while(|(mi, _)| mi.degree() as usize == bd)
            {
                let key = qmi.add(bmi);
                let delta = qc * bc;
                match residual.entry(key) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(-&delta);
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        *e.get_mut() -= &delta;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                }
            }
        }
        // reduce R_d against the divisor's lowest part
        let mut q_slice: Vec<(MultiIndex, GaussRational)> = Vec::new();
        while let Some((mi, c)) = residual.iter().next_back().map(|(k, v)| (k.clone(), v.clone()))
        {
            let diff = mi.checked_sub(&lt_mi).ok_or_else(|| {
                FpsError::NotDivisible(format!(
                    "degree-{d} remainder term with exponents {:?} is not reducible by \
                     the divisor's leading term",
                    mi.exponents()
                ))
            })?;
            let qc = &c / &lt_c;
            for (bmi, bc) in &b_low {
                let key = diff.add(bmi);
                let delta = &qc * bc;
                match residual.entry(key) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(-&delta);
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        *e.get_mut() -= &delta;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                }
            }
            q_slice.push((diff, qc));
        }
        for (mi, c) in q_slice {
            q.insert_add(mi, &c);
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fps::{AnalyticFn, Complex64};
    use num::rational::BigRational;

    fn rat(n: i64, d: i64) -> GaussRational {
        GaussRational::from_ratio(n, d)
    }

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    fn var(n: usize, order: usize, j: usize) -> TruncatedSeries {
        TruncatedSeries::var(n, order, j).unwrap()
    }

    #[test]
    fn compose_sqrt_with_perfect_square_argument() {
        // sqrt(1 + u) composed with u = 2k + k^2 gives exactly 1 + k
        let u = var(1, 2, 0);
        let sqrt_arg = TruncatedSeries::one(1, 2).add(&u).unwrap();
        let f = AnalyticFn::PowRational(BigRational::new(1.into(), 2.into()))
            .apply(&sqrt_arg)
            .unwrap();
        let arg = u.scale(&rat(2, 1)).add(&u.mul(&u).unwrap()).unwrap();
        let got = compose(&f, &[arg]).unwrap();
        let want = TruncatedSeries::one(1, 2).add(&var(1, 2, 0)).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn compose_rejects_constant_terms() {
        let f = var(1, 3, 0);
        let bad = TruncatedSeries::one(1, 3);
        assert!(matches!(
            compose(&f, &[bad.clone()]),
            Err(FpsError::CompositionDivergence { arg: 0 })
        ));
        // the polynomial variant accepts them
        let got = compose_exact_poly(&f, &[bad]).unwrap();
        assert_eq!(got.constant_term(), rat(1, 1));
    }

    #[test]
    fn compose_into_larger_ring() {
        // f(a, b) = a*b composed with (k1 + k2, k1) in a 2-variable ring
        let f = TruncatedSeries::monomial(2, 3, mi(&[1, 1]), rat(1, 1)).unwrap();
        let a = var(2, 3, 0).add(&var(2, 3, 1)).unwrap();
        let b = var(2, 3, 0);
        let got = compose(&f, &[a, b]).unwrap();
        assert_eq!(got.coeff(&mi(&[2, 0])), rat(1, 1));
        assert_eq!(got.coeff(&mi(&[1, 1])), rat(1, 1));
        assert_eq!(got.num_terms(), 2);
    }

    #[test]
    fn invert_univariate() {
        // inverse of f = k + k^2 through order 3 is k - k^2 + 2k^3
        let f = var(1, 3, 0)
            .add(&TruncatedSeries::monomial(1, 3, mi(&[2]), rat(1, 1)).unwrap())
            .unwrap();
        let g = invert_formal_map(&SeriesVector::new(vec![f.clone()]).unwrap()).unwrap();
        let g0 = g.component(0);
        assert_eq!(g0.coeff(&mi(&[1])), rat(1, 1));
        assert_eq!(g0.coeff(&mi(&[2])), rat(-1, 1));
        assert_eq!(g0.coeff(&mi(&[3])), rat(2, 1));
        // f o g = id
        let round = compose(&f, g.components()).unwrap();
        assert_eq!(round, var(1, 3, 0));
    }

    #[test]
    fn invert_polynomial_automorphism() {
        // (x + y^2, y) inverts to exactly (x - y^2, y)
        let fx = var(2, 4, 0)
            .add(&TruncatedSeries::monomial(2, 4, mi(&[0, 2]), rat(1, 1)).unwrap())
            .unwrap();
        let fy = var(2, 4, 1);
        let f = SeriesVector::new(vec![fx, fy]).unwrap();
        let g = invert_formal_map(&f).unwrap();
        assert_eq!(g.component(0).coeff(&mi(&[0, 2])), rat(-1, 1));
        assert_eq!(g.component(0).num_terms(), 2);
        assert_eq!(g.component(1), &var(2, 4, 1));
        for j in 0..2 {
            let round = compose(f.component(j), g.components()).unwrap();
            assert_eq!(&round, SeriesVector::identity(2, 4).component(j));
        }
    }

    #[test]
    fn invert_rejects_non_tangent_maps() {
        let doubled = var(1, 3, 0).scale(&rat(2, 1));
        assert!(matches!(
            invert_formal_map(&SeriesVector::new(vec![doubled]).unwrap()),
            Err(FpsError::NotTangentToIdentity(_))
        ));
        let shifted = var(1, 3, 0).add(&TruncatedSeries::one(1, 3)).unwrap();
        assert!(matches!(
            invert_formal_map(&SeriesVector::new(vec![shifted]).unwrap()),
            Err(FpsError::NotTangentToIdentity(_))
        ));
    }

    #[test]
    fn recip_geometric() {
        let one_minus_k = TruncatedSeries::one(1, 4).sub(&var(1, 4, 0)).unwrap();
        let r = recip(&one_minus_k).unwrap();
        for m in 0..=4u32 {
            assert_eq!(r.coeff(&mi(&[m])), rat(1, 1));
        }
        // k / (1 - k) at k = 0.1 is 1/9
        let quot = var(1, 12, 0)
            .mul(&recip(&TruncatedSeries::one(1, 12).sub(&var(1, 12, 0)).unwrap()).unwrap())
            .unwrap();
        // truncation tail of the order-12 jet at 0.1 is 0.1^13 / 0.9, about 1.1e-13
        let got = quot.eval_complex(&[Complex64::new(0.1, 0.0)]).unwrap().re;
        assert!((got - 1.0 / 9.0).abs() < 1e-12);

        assert!(matches!(
            recip(&TruncatedSeries::zero(1, 3)),
            Err(FpsError::DivisionByZero)
        ));
        assert!(matches!(recip(&var(1, 3, 0)), Err(FpsError::NotDivisible(_))));
    }

    #[test]
    fn exact_division_by_positive_valuation() {
        // (x^2 + 2xy + y^2) / (x + y) = x + y
        let x = var(2, 4, 0);
        let y = var(2, 4, 1);
        let sum = x.add(&y).unwrap();
        let num = sum.mul(&sum).unwrap();
        let q = div_exact(&num, &sum).unwrap();
        assert_eq!(q.order(), 3);
        assert_eq!(q, sum.truncated(3));

        // sin(k)/k = 1 - k^2/6 + k^4/120
        let k = var(1, 5, 0);
        let s = AnalyticFn::Sin.apply(&k).unwrap();
        let q = div_exact(&s, &k).unwrap();
        assert_eq!(q.order(), 4);
        assert_eq!(q.coeff(&mi(&[0])), rat(1, 1));
        assert_eq!(q.coeff(&mi(&[2])), rat(-1, 6));
        assert_eq!(q.coeff(&mi(&[4])), rat(1, 120));
    }

    #[test]
    fn inexact_division_is_detected() {
        let x = var(2, 4, 0);
        let y = var(2, 4, 1);
        assert!(matches!(div_exact(&x, &y), Err(FpsError::NotDivisible(_))));
        let num = x.mul(&x).unwrap().add(&y).unwrap();
        assert!(matches!(div_exact(&num, &x), Err(FpsError::NotDivisible(_))));
        // valuation mismatch caught even when leading terms reduce
        let k = var(1, 4, 0);
        let one_plus = TruncatedSeries::one(1, 4).add(&k).unwrap();
        assert!(matches!(
            div_exact(&one_plus, &k),
            Err(FpsError::NotDivisible(_))
        ));
    }

    #[test]
    fn division_with_unit_divisor_keeps_order() {
        let k = var(1, 6, 0);
        let denom = TruncatedSeries::one(1, 6).add(&k).unwrap();
        let q = div_exact(&k, &denom).unwrap();
        assert_eq!(q.order(), 6);
        // k/(1+k) = k - k^2 + k^3 - ...
        assert_eq!(q.coeff(&mi(&[3])), rat(1, 1));
        assert_eq!(q.coeff(&mi(&[4])), rat(-1, 1));
        // round trip
        assert_eq!(q.mul(&denom).unwrap(), k);
    }

    #[test]
    fn division_transverse_combination() {
        // the kind of quotient the catalogue needs:
        // (d1^2 + d2^2)(ucoth - 1)-style ratios reduce exactly
        let d1 = var(2, 6, 0);
        let d2 = var(2, 6, 1);
        let sum_sq = d1.mul(&d1).unwrap().add(&d2.mul(&d2).unwrap()).unwrap();
        let u = crate::fps::ucoth_sq(&sum_sq).unwrap();
        let num = u.sub(&TruncatedSeries::one(2, 6)).unwrap();
        let q = div_exact(&num, &sum_sq).unwrap();
        assert_eq!(q.order(), 4);
        assert_eq!(q.constant_term(), rat(1, 3));
        // matches the dedicated remainder generator
        let rem = crate::fps::ucoth_sq_rem(&sum_sq.truncated(4)).unwrap();
        assert_eq!(q, rem);
    }
}
