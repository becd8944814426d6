//! The deformed coproduct of momenta, read off the plane-wave product law.
//!
//! Acting on a star product of plane waves, a momentum operator sees the
//! product exponent, so `Delta(d^j) = i D_j` under the dictionary
//! `k_a = -i (d^a x 1)`, `q_a = -i (1 x d^a)`.  Concretely each coefficient
//! of `D_j` at total degree `g` picks up the factor `i (-i)^g`, and the two
//! blocks of the doubled ring become the two tensor legs.

use super::{d_series, DSeries, KcalcError};
use crate::fps::{GaussRational, MultiIndex, TruncatedSeries};
use crate::realization::Realization;

/// One component of the coproduct, in the doubled ring whose first block is
/// the left tensor leg and second block the right leg.
#[derive(Clone, Debug)]
pub struct MomentumCoproduct {
    /// One-based component `j` of `Delta(d^j)`.
    pub component: usize,
    pub n: usize,
    pub order: usize,
    pub series: TruncatedSeries,
}

impl MomentumCoproduct {
    /// The variable dictionary relating ring slots to tensor legs.
    pub fn dictionary(&self) -> String {
        format!(
            "slot a in 0..{n} is d^(a+1) (x) 1; slot {n}+a is 1 (x) d^(a+1)",
            n = self.n
        )
    }

    /// Terms as (left-leg exponents, right-leg exponents, coefficient).
    pub fn tensor_terms(
        &self,
    ) -> impl Iterator<Item = (Vec<u32>, Vec<u32>, &GaussRational)> + '_ {
        let n = self.n;
        self.series.terms().map(move |(mi, c)| {
            let e = mi.exponents();
            (e[..n].to_vec(), e[n..].to_vec(), c)
        })
    }
}

/// `Delta(d^j)` for one-based component `j`, derived from an already
/// computed product law.
pub fn coproduct_from_d(d: &DSeries, j: usize) -> Result<MomentumCoproduct, KcalcError> {
    let n = d.n();
    if j == 0 || j > n {
        return Err(KcalcError::ComponentOutOfRange { got: j, n });
    }
    let src = d.component(j - 1);
    let mut series = TruncatedSeries::zero(src.n_vars(), src.order());
    for (mi, c) in src.terms() {
        series.insert_add(mi.clone(), &(c * &momentum_factor(mi)));
    }
    Ok(MomentumCoproduct {
        component: j,
        n,
        order: d.order(),
        series,
    })
}

/// `Delta(d^j)` for a realization, one-based `j`.
pub fn coproduct_momenta(
    r: &Realization,
    j: usize,
    order: usize,
) -> Result<MomentumCoproduct, KcalcError> {
    let d = d_series(r, order)?;
    coproduct_from_d(&d, j)
}

/// `i * (-i)^degree`: the overall `i` of the coproduct rule combined with
/// one `-i` per momentum factor from the dictionary.
fn momentum_factor(mi: &MultiIndex) -> GaussRational {
    match mi.degree() % 4 {
        0 => GaussRational::i(),
        1 => GaussRational::one(),
        2 => -GaussRational::i(),
        _ => -GaussRational::one(),
    }
}
