//! Normal ordering of `exp(lambda sum_i x_i F_i)` in closed tabular form.
//!
//! With `alpha_i = sum_{l >= 1} lambda^l A[e_i, l] / l!` the exponential
//! equals `sum_s x^s alpha^s / s!` with every `x` to the left — the whole
//! point of the A-table.  The result is handed back as a normal-ordered
//! operator whose coefficient ring carries one extra slot for `lambda`.

use super::{a_sequence, multi_indices_up_to, KcalcError};
use crate::fps::{GaussRational, MultiIndex, SeriesVector, TruncatedSeries};
use crate::weyl::WeylElement;

/// The normal-ordered exponential, exact through joint
/// `(x, derivative, lambda)` degree `order`.
///
/// The flow components live on the derivative slots (plus optional trailing
/// parameter slots) and must carry order at least `2 * order - 1`: the
/// weight-`l` table entries lose `l - 1` orders and contribute at
/// `lambda`-degree `l`.
pub fn normal_ordered_exp(
    flow: &SeriesVector,
    order: usize,
) -> Result<WeylElement, KcalcError> {
    let n = flow.len();
    let needed = (2 * order).saturating_sub(1);
    if flow.order() < needed {
        return Err(KcalcError::OrderBudget {
            requested: order,
            have: flow.order(),
            needed,
        });
    }
    let a = a_sequence(flow, order)?;
    let v = flow.n_vars();
    let lambda_slot = v;
    let slot_map: Vec<usize> = (0..v).collect();

    // alpha_i in the (coefficients, lambda) ring, certified at `order`
    let mut alphas = Vec::with_capacity(n);
    for i in 0..n {
        let e_i = MultiIndex::unit(n, i);
        let mut acc = TruncatedSeries::zero(v + 1, flow.order());
        for l in 1..=order {
            let entry = a.entry(&e_i, l);
            if entry.is_zero() {
                continue;
            }
            let mut lam_exp = MultiIndex::zeros(v + 1).exponents().to_vec();
            lam_exp[lambda_slot] = l as u32;
            let mono = TruncatedSeries::monomial(
                v + 1,
                entry.order(),
                MultiIndex::new(lam_exp),
                inv_factorial(l),
            )?;
            acc = acc.add(&mono.mul(&entry.embed(v + 1, &slot_map)?)?)?;
        }
        alphas.push(acc.truncated(order));
    }

    let mut out = WeylElement::zero(n, v + 1, order);
    out.insert_term(MultiIndex::zeros(n), TruncatedSeries::one(v + 1, order))?;
    let mut indices = vec![MultiIndex::zeros(n)];
    indices.extend(multi_indices_up_to(n, order));
    for s in indices {
        if s.is_zero() {
            continue;
        }
        let mut coeff = TruncatedSeries::one(v + 1, order);
        for i in 0..n {
            for _ in 0..s.get(i) {
                coeff = coeff.mul(&alphas[i])?;
            }
            coeff = coeff.scale(&inv_factorial(s.get(i) as usize));
        }
        if !coeff.is_zero() {
            out.insert_term(s, coeff)?;
        }
    }
    Ok(out)
}

fn inv_factorial(m: usize) -> GaussRational {
    let mut c = GaussRational::one();
    for t in 1..=m {
        c = &c * &GaussRational::from_ratio(1, t as i64);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fps::AnalyticFn;
    use crate::weyl::{fock_apply_exp_formal, weyl_exp_bruteforce, WeylElement};

    fn rat(p: i64, q: i64) -> GaussRational {
        GaussRational::from_ratio(p, q)
    }

    fn mono1(order: usize, exp: u32, c: GaussRational) -> TruncatedSeries {
        TruncatedSeries::monomial(1, order, MultiIndex::new(vec![exp]), c).unwrap()
    }

    #[test]
    fn plain_derivative_flow() {
        // F = the derivative symbol itself: alpha = (e^lambda - 1) d
        let flow = SeriesVector::new(vec![mono1(9, 1, rat(1, 1))]).unwrap();
        let e = normal_ordered_exp(&flow, 5).unwrap();
        let d = TruncatedSeries::var(2, 5, 0).unwrap();
        let lam = TruncatedSeries::var(2, 5, 1).unwrap();
        let growth = AnalyticFn::Exp
            .apply(&lam)
            .unwrap()
            .sub(&TruncatedSeries::one(2, 5))
            .unwrap();
        let alpha = growth.mul(&d).unwrap();
        assert_eq!(
            e.coefficient(&MultiIndex::new(vec![1])).unwrap(),
            &alpha
        );
        let half_alpha_sq = alpha.mul(&alpha).unwrap().scale(&rat(1, 2));
        assert_eq!(
            e.coefficient(&MultiIndex::new(vec![2])).unwrap(),
            &half_alpha_sq
        );
    }

    #[test]
    fn square_flow_alpha_ladder() {
        // F = d^2: alpha = sum_l lambda^l d^(l+1)
        let flow = SeriesVector::new(vec![mono1(11, 2, rat(1, 1))]).unwrap();
        let e = normal_ordered_exp(&flow, 6).unwrap();
        let alpha = e.coefficient(&MultiIndex::new(vec![1])).unwrap();
        for l in 1..=2u32 {
            let mut exps = MultiIndex::new(vec![l + 1, l]);
            assert_eq!(alpha.coeff(&exps), rat(1, 1), "lambda^{l} rung");
            exps = MultiIndex::new(vec![l + 2, l]);
            assert_eq!(alpha.coeff(&exps), rat(0, 1));
        }
    }

    #[test]
    fn matches_bruteforce_exponential() {
        // the central normal-ordering claim, exercised on two-variable
        // polynomial flows with small integer coefficients
        let order = 4;
        let d1 = TruncatedSeries::var(2, 2 * order, 0).unwrap();
        let d2 = TruncatedSeries::var(2, 2 * order, 1).unwrap();
        let one = TruncatedSeries::one(2, 2 * order);
        let f1 = d1
            .mul(&d2)
            .unwrap()
            .scale(&rat(-2, 1))
            .add(&d2)
            .unwrap();
        let f2 = one
            .add(&d1.mul(&d1).unwrap().scale(&rat(2, 1)))
            .unwrap()
            .sub(&d2.mul(&d2).unwrap())
            .unwrap();
        let flow = SeriesVector::new(vec![f1.clone(), f2.clone()]).unwrap();
        let tabulated = normal_ordered_exp(&flow, order).unwrap();
        let brute = weyl_exp_bruteforce(
            &WeylElement::from_linear(&[f1, f2]).unwrap(),
            order,
        )
        .unwrap();
        assert_eq!(tabulated, brute);
    }

    #[test]
    fn agrees_with_fock_route() {
        // applying the exponential to e^(x.q) through the conjugation
        // machinery must reproduce the tabulated prefactor
        let flow = SeriesVector::new(vec![mono1(14, 2, rat(1, 1))]).unwrap();
        let e = normal_ordered_exp(&flow, 4).unwrap();
        let tabulated = e.flatten_truncated(4).unwrap();
        let w = WeylElement::from_linear(&[mono1(14, 2, rat(1, 1))]).unwrap();
        let fock = fock_apply_exp_formal(&w, 4).unwrap();
        assert_eq!(tabulated, fock);
    }

    #[test]
    fn budget_is_enforced() {
        let flow = SeriesVector::new(vec![mono1(4, 2, rat(1, 1))]).unwrap();
        assert!(matches!(
            normal_ordered_exp(&flow, 4),
            Err(KcalcError::OrderBudget { needed: 7, .. })
        ));
    }
}
