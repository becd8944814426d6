//! The star-exponential calculus: recursive normal-ordering data, the
//! momentum flow series `K`, the plane-wave product law `D`, and the deformed
//! momentum coproduct.
//!
//! Everything here is exact jet arithmetic.  Two order disciplines coexist:
//!
//! * generic flows are caller-supplied jets, so every operation demands an
//!   explicit order budget up front (typically twice the requested order,
//!   since each orbit step costs one certified order) and fails loudly when
//!   the budget is short;
//! * realization flows are built internally and are linear in the momentum
//!   block, which grades every orbit step and lets the computation run at
//!   the requested order with no over-allocation.  A test cross-checks the
//!   graded path against the budgeted one.

mod aseq;
mod coproduct;
mod dseries;
mod kseries;
mod noexp;

pub use aseq::{
    a_sequence, verify_integral_recursion, verify_integral_recursion_capped, ASequence,
    RecursionReport, RecursionViolation,
};
pub use coproduct::{coproduct_from_d, coproduct_momenta, MomentumCoproduct};
pub use dseries::{check_associativity, d_series, star_exponentials, DSeries};
pub use kseries::{
    k_series_at_lambda_one, k_series_formal_solution, k_series_realization, verify_flow_pde,
    KSeries, KSeriesKind,
};
pub use noexp::normal_ordered_exp;

use crate::fps::FpsError;
use crate::realization::RealizationError;
use crate::weyl::WeylError;

#[derive(Debug, thiserror::Error)]
pub enum KcalcError {
    #[error(
        "order budget exhausted: the flow carries order {have} but certifying \
         order {requested} here needs at least {needed}"
    )]
    OrderBudget {
        requested: usize,
        have: usize,
        needed: usize,
    },
    #[error(
        "the lambda = 1 resummation does not terminate for this flow; it needs \
         every component to vanish to second order, or a nilpotent orbit"
    )]
    LambdaOneDivergence,
    #[error("operation needs a {expected:?}-mode series, got {got:?}")]
    WrongMode { expected: KSeriesKind, got: KSeriesKind },
    #[error("component index {got} out of range 1..={n}")]
    ComponentOutOfRange { got: usize, n: usize },
    #[error(transparent)]
    Fps(#[from] FpsError),
    #[error(transparent)]
    Realization(#[from] RealizationError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
}

use crate::fps::TruncatedSeries;

/// `sum_i flow[i] * d(g)/d(var slot_base+i)` with honest order tracking:
/// the result certifies one order less than its inputs.
pub(crate) fn orbit_apply(
    flow: &[TruncatedSeries],
    g: &TruncatedSeries,
    slot_base: usize,
) -> Result<TruncatedSeries, FpsError> {
    let mut acc: Option<TruncatedSeries> = None;
    for (i, f) in flow.iter().enumerate() {
        let dg = g.partial(slot_base + i)?;
        if dg.is_zero() {
            continue;
        }
        let term = f.mul(&dg)?;
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    Ok(acc.unwrap_or_else(|| {
        TruncatedSeries::zero(g.n_vars(), g.order().saturating_sub(1))
    }))
}

/// The same orbit step at a pinned order, for flows whose every component
/// has zero constant term.  The tail a partial derivative loses lives at
/// degree >= order; multiplying by a flow component shifts it to degree
/// >= order + 1, outside the ring, so certifying `order` is sound.
pub(crate) fn orbit_apply_graded(
    flow: &[TruncatedSeries],
    g: &TruncatedSeries,
    slot_base: usize,
    order: usize,
) -> Result<TruncatedSeries, FpsError> {
    let mut acc = TruncatedSeries::zero(g.n_vars(), order);
    for (i, f) in flow.iter().enumerate() {
        debug_assert!(f.min_degree().map_or(true, |d| d >= 1));
        let dg = g.partial(slot_base + i)?;
        if dg.is_zero() {
            continue;
        }
        acc = acc.add(&f.mul_to_order(&dg, order))?;
    }
    Ok(acc)
}

/// All multi-indices on `n` slots with total degree in `1..=degree`,
/// graded-lex ordered.
pub(crate) fn multi_indices_up_to(n: usize, degree: usize) -> Vec<crate::fps::MultiIndex> {
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    fn rec(out: &mut Vec<crate::fps::MultiIndex>, current: &mut Vec<u32>, slot: usize, left: u32) {
        if slot + 1 == current.len() {
            current[slot] = left;
            out.push(crate::fps::MultiIndex::new(current.clone()));
            return;
        }
        for e in 0..=left {
            current[slot] = e;
            rec(out, current, slot + 1, left - e);
        }
        current[slot] = 0;
    }
    for d in 1..=degree as u32 {
        rec(&mut out, &mut current, 0, d);
    }
    out
}
