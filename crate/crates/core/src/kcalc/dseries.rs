//! The plane-wave product law: `exp(i k.x) * exp(i q.x) = exp(i D(k,q).x)`.
//!
//! `D(k, q) = K(K0_inv(k), q)` where `K0(k) = K(k, 0)` is the exponent of a
//! bare star exponential and `K0_inv` its compositional inverse — guaranteed
//! tangent to the identity because the realization grid is the identity
//! matrix at the origin.

use super::{k_series_realization, KcalcError, KSeries, KSeriesKind};
use crate::fps::{compose, invert_formal_map, GaussRational, SeriesVector, TruncatedSeries};
use crate::realization::Realization;

#[derive(Clone, Debug)]
pub struct DSeries {
    n: usize,
    order: usize,
    /// Components in the doubled `[k | q]` ring.
    d: Vec<TruncatedSeries>,
    /// `K(k, 0)` in the `n`-variable `k` ring.
    k0: Vec<TruncatedSeries>,
    /// Compositional inverse of `k0`.
    k0_inv: Vec<TruncatedSeries>,
}

impl DSeries {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn component(&self, a: usize) -> &TruncatedSeries {
        &self.d[a]
    }

    pub fn components(&self) -> &[TruncatedSeries] {
        &self.d
    }

    pub fn k0(&self) -> &[TruncatedSeries] {
        &self.k0
    }

    pub fn k0_inv(&self) -> &[TruncatedSeries] {
        &self.k0_inv
    }

    /// Check `D(k, 0) = k` and `D(0, q) = q` exactly.
    pub fn unit_laws_hold(&self) -> Result<bool, KcalcError> {
        let n = self.n;
        let at_q0: Vec<Option<GaussRational>> = (0..n)
            .map(|_| None)
            .chain((0..n).map(|_| Some(GaussRational::zero())))
            .collect();
        let at_k0: Vec<Option<GaussRational>> = (0..n)
            .map(|_| Some(GaussRational::zero()))
            .chain((0..n).map(|_| None))
            .collect();
        for a in 0..n {
            let ka = self.d[a].substitute(&at_q0)?;
            if ka != TruncatedSeries::var(n, self.order, a)? {
                return Ok(false);
            }
            let qa = self.d[a].substitute(&at_k0)?;
            if qa != TruncatedSeries::var(n, self.order, a)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The star-product law of a realization, with `K0` and its inverse as
/// byproducts.
pub fn d_series(r: &Realization, order: usize) -> Result<DSeries, KcalcError> {
    let ks = k_series_realization(r, order)?;
    d_series_from_k(&ks)
}

/// Same computation starting from an already built realization-mode `K`.
pub fn d_series_from_k(ks: &KSeries) -> Result<DSeries, KcalcError> {
    if ks.kind() != KSeriesKind::Realization {
        return Err(KcalcError::WrongMode {
            expected: KSeriesKind::Realization,
            got: ks.kind(),
        });
    }
    let n = ks.n();
    let order = ks.order();
    let at_q0: Vec<Option<GaussRational>> = (0..n)
        .map(|_| None)
        .chain((0..n).map(|_| Some(GaussRational::zero())))
        .collect();
    let mut k0 = Vec::with_capacity(n);
    for a in 0..n {
        k0.push(ks.component(a).substitute(&at_q0)?);
    }
    let k0_inv = invert_formal_map(&SeriesVector::new(k0.clone())?)?;
    // D_a = K_a with the k block composed with k0_inv and the q block kept
    let slot_map: Vec<usize> = (0..n).collect();
    let mut args = Vec::with_capacity(2 * n);
    for b in 0..n {
        args.push(k0_inv.component(b).embed(2 * n, &slot_map)?);
    }
    for c in 0..n {
        args.push(TruncatedSeries::var(2 * n, order, n + c)?);
    }
    let mut d = Vec::with_capacity(n);
    for a in 0..n {
        d.push(compose(ks.component(a), &args)?);
    }
    Ok(DSeries {
        n,
        order,
        d,
        k0: k0.clone(),
        k0_inv: k0_inv.components().to_vec(),
    })
}

/// CLI-facing alias: the star product of plane waves is the `D`-series.
pub fn star_exponentials(r: &Realization, order: usize) -> Result<DSeries, KcalcError> {
    d_series(r, order)
}

/// Check the group law `D(D(u, v), w) = D(u, D(v, w))` exactly through
/// total order `order` in the tripled ring.
pub fn check_associativity(d: &DSeries, order: usize) -> Result<bool, KcalcError> {
    let n = d.n;
    let order = order.min(d.order);
    let tripled = 3 * n;
    let uv_map: Vec<usize> = (0..2 * n).collect();
    let vw_map: Vec<usize> = (n..3 * n).collect();
    // inner products embedded into [u | v | w]
    let mut d_uv = Vec::with_capacity(n);
    let mut d_vw = Vec::with_capacity(n);
    for a in 0..n {
        d_uv.push(d.d[a].truncated(order).embed(tripled, &uv_map)?);
        d_vw.push(d.d[a].truncated(order).embed(tripled, &vw_map)?);
    }
    for a in 0..n {
        let da = d.d[a].truncated(order);
        let mut left_args = d_uv.clone();
        for c in 0..n {
            left_args.push(TruncatedSeries::var(tripled, order, 2 * n + c)?);
        }
        let left = compose(&da, &left_args)?;
        let mut right_args = Vec::with_capacity(2 * n);
        for b in 0..n {
            right_args.push(TruncatedSeries::var(tripled, order, b)?);
        }
        right_args.extend(d_vw.iter().cloned());
        let right = compose(&da, &right_args)?;
        if left != right {
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

    #[test]
    fn abelian_is_additive() {
        let r = Realization::builtin("abelian", Some(2), GaussRational::one()).unwrap();
        let d = d_series(&r, 5).unwrap();
        for a in 0..2 {
            let want = TruncatedSeries::var(4, 5, a)
                .unwrap()
                .add(&TruncatedSeries::var(4, 5, 2 + a).unwrap())
                .unwrap();
            assert_eq!(d.component(a), &want);
        }
        assert!(d.unit_laws_hold().unwrap());
        assert!(check_associativity(&d, 4).unwrap());
    }

    #[test]
    fn symmetric_lowest_order_is_half_cross() {
        // with [xhat_a, xhat_b] = i kappa eps_abc xhat_c at kappa = 1, the
        // Baker-Campbell-Hausdorff term fixes D = k + q - (1/2) k x q + ...
        let r = Realization::builtin("su2_sym", None, GaussRational::one()).unwrap();
        let d = d_series(&r, 2).unwrap();
        // K0 is the identity here, so D and K coincide
        for a in 0..3 {
            assert_eq!(
                d.k0()[a],
                TruncatedSeries::var(3, 2, a).unwrap(),
                "K0 component {a}"
            );
        }
        let eps = [(0usize, 1usize, 2usize, 1i64), (1, 2, 0, 1), (2, 0, 1, 1)];
        for (i, j, k, sign) in eps {
            // coefficient of k_i q_j in D_k is -(1/2) eps_kij ... spelled out:
            let mut exps = vec![0u32; 6];
            exps[i] = 1;
            exps[3 + j] = 1;
            assert_eq!(
                d.component(k).coeff(&MultiIndex::new(exps.clone())),
                rat(-sign, 2),
                "k_{i} q_{j} in D_{k}"
            );
            // and the transposed pair carries the opposite sign
            let mut exps_t = vec![0u32; 6];
            exps_t[j] = 1;
            exps_t[3 + i] = 1;
            assert_eq!(
                d.component(k).coeff(&MultiIndex::new(exps_t)),
                rat(sign, 2)
            );
        }
        assert!(d.unit_laws_hold().unwrap());
    }

    #[test]
    fn symmetric_group_law_is_associative() {
        let r = Realization::builtin("su2_sym", None, GaussRational::one()).unwrap();
        let d = d_series(&r, 4).unwrap();
        assert!(check_associativity(&d, 4).unwrap());
    }

    #[test]
    fn fl_units_reality_and_associativity() {
        let r = Realization::builtin("su2_fl", None, rat(1, 2)).unwrap();
        let d = d_series(&r, 4).unwrap();
        assert!(d.unit_laws_hold().unwrap());
        for a in 0..3 {
            for (_, c) in d.component(a).terms() {
                assert!(c.is_real(), "imaginary coefficient in D_{a}");
            }
        }
        assert!(check_associativity(&d, 4).unwrap());
    }

    #[test]
    fn kappa_scaling_of_symmetric_product() {
        // D at kappa = 1/2 equals (1/kappa) D^(1)(kappa k, kappa q)
        let d_half = d_series(
            &Realization::builtin("su2_sym", None, rat(1, 2)).unwrap(),
            3,
        )
        .unwrap();
        let d_one = d_series(
            &Realization::builtin("su2_sym", None, GaussRational::one()).unwrap(),
            3,
        )
        .unwrap();
        for a in 0..3 {
            let mut want = TruncatedSeries::zero(6, 3);
            for (mi, c) in d_one.component(a).terms() {
                // kappa^(deg - 1) rescaling of each momentum monomial
                let pow = GaussRational::from_ratio(1, 2)
                    .checked_pow(mi.degree() as i64 - 1)
                    .unwrap();
                let mono = TruncatedSeries::monomial(6, 3, mi.clone(), c * &pow).unwrap();
                want = want.add(&mono).unwrap();
            }
            assert_eq!(d_half.component(a), &want, "component {a}");
        }
    }
}
