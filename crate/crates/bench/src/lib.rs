//! Shared helpers for the benchmark suite.

use liestar_core::{GaussRational, MultiIndex, Realization, SeriesVector, TruncatedSeries};

/// The workhorse grid at unit deformation.
pub fn su2_fl() -> Realization {
    Realization::builtin("su2_fl", None, GaussRational::one()).expect("catalogue grid")
}

/// A dense-ish two-variable cubic flow with small mixed coefficients, the
/// shape the weight recursion sees in practice.  Deterministic, no RNG.
pub fn cubic_flow(order: usize) -> SeriesVector {
    let n = 2;
    let mut components = Vec::with_capacity(n);
    for c in 0..n {
        let mut s = TruncatedSeries::zero(n, order);
        let mut toggle = 1i64;
        for e1 in 0..=3u32 {
            for e2 in 0..=(3 - e1) {
                let coeff = GaussRational::from_int(toggle * ((e1 + 2 * e2 + c as u32) % 3) as i64 - 1);
                toggle = -toggle;
                let mono =
                    TruncatedSeries::monomial(n, order, MultiIndex::new(vec![e1, e2]), coeff)
                        .expect("degree fits");
                s = s.add(&mono).expect("same ring");
            }
        }
        components.push(s);
    }
    SeriesVector::new(components).expect("square system")
}
