//! Floating-point cross-checks for the exact jets: a fixed-step integrator
//! for the transport system `dK/dlambda = F(K)`, closed forms for the two
//! su(2) grids, and a report that runs every available path on the same
//! sample points and compares.
//!
//! The integrator evaluates a truncated series, so an answer is only as good
//! as the truncation.  Every run therefore reports a tail bound estimated
//! geometrically from the last two populated degrees at the largest radius
//! the trajectory visited, and refuses to pretend precision it cannot have.

mod closed;
mod crosscheck;

pub use closed::{
    adjudicate_fl_d, fl_d_paper, fl_d_paper_jet, fl_d_symmetric_variant,
    fl_d_symmetric_variant_jet, fl_p, fl_p_conserved_pair, fl_p_jet, su2_closed_form, sym_d,
    sym_d_relations, FlDAdjudication, Su2Form,
};
pub use crosscheck::{
    cross_check, render_table, report_records, CrossCheckReport, CrossCheckTolerances, CrossRecord,
    DCheck, SampleCheck,
};

use num::rational::BigRational;

use crate::fps::{rational_to_f64, FpsError, GaussRational, SeriesVector};
use crate::kcalc::KcalcError;
use crate::realization::{Realization, RealizationError};

#[derive(Debug, thiserror::Error)]
pub enum NumericError {
    #[error("expected a length-{expected} vector, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error(
        "flow component {component} has coefficient {value} off the real line; \
         the momentum picture of this grid is not real, so the trajectory \
         would leave the reals"
    )]
    ImaginaryFlow { component: usize, value: String },
    #[error("the integrator needs at least one step")]
    ZeroSteps,
    #[error(
        "truncation tail bound {bound:.3e} exceeds the tolerance {tolerance:.3e}; \
         raise the flow order or shrink the inputs"
    )]
    PrecisionLoss { bound: f64, tolerance: f64 },
    #[error(
        "series terms still grow at ratio {ratio:.3} at radius {radius:.3}; \
         no geometric tail bound exists there"
    )]
    TailUnbounded { ratio: f64, radius: f64 },
    #[error("{what} = {value} is outside the principal branch")]
    Branch { what: &'static str, value: f64 },
    #[error("bad decimal literal {0:?}")]
    BadDecimal(String),
    #[error(transparent)]
    Fps(#[from] FpsError),
    #[error(transparent)]
    Realization(#[from] RealizationError),
    #[error(transparent)]
    Kcalc(#[from] KcalcError),
}

/// Parse a plain decimal literal (optional sign, optional fraction, optional
/// `e` exponent) into an exact rational.  This is the only door through which
/// command-line numbers reach the exact side, and it loses nothing.
pub fn parse_decimal(text: &str) -> Result<GaussRational, NumericError> {
    let bad = || NumericError::BadDecimal(text.to_string());
    let s = text.trim();
    let (s, negative) = match s.strip_prefix('-') {
        Some(rest) => (rest, true),
        None => (s.strip_prefix('+').unwrap_or(s), false),
    };
    let (mantissa, exp10) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: num::bigint::BigInt = digits.parse().map_err(|_| bad())?;
    let shift = exp10 as i64 - frac_part.len() as i64;
    let ten = num::bigint::BigInt::from(10);
    let value = if shift >= 0 {
        BigRational::from_integer(numer * ten.pow(shift as u32))
    } else {
        BigRational::new(numer, ten.pow((-shift) as u32))
    };
    let value = if negative { -value } else { value };
    Ok(GaussRational::from_rational(value))
}

/// An `f64` is a dyadic rational; recover it exactly.
pub(crate) fn gauss_from_f64(x: f64) -> Result<GaussRational, NumericError> {
    BigRational::from_float(x)
        .map(GaussRational::from_rational)
        .ok_or(NumericError::BadDecimal(format!("{x}")))
}

/// A flow compiled to plain floats for the integrator's inner loop: one term
/// list per component, plus the per-degree coefficient mass that the tail
/// estimate feeds on.
#[derive(Clone, Debug)]
struct CompiledFlow {
    n: usize,
    order: usize,
    /// Per component, `(exponents, coefficient)` with exponents dense.
    terms: Vec<Vec<(Vec<u32>, f64)>>,
    /// `degree_mass[g]` bounds the degree-`g` part of any component on the
    /// polydisc of radius `r` by `degree_mass[g] * r^g`.
    degree_mass: Vec<f64>,
    max_degree: usize,
}

impl CompiledFlow {
    fn from_series(components: &[&crate::fps::TruncatedSeries]) -> Result<Self, NumericError> {
        let n = components.len();
        let order = components.iter().map(|s| s.order()).min().unwrap_or(0);
        let mut terms = Vec::with_capacity(n);
        let mut degree_mass = vec![0.0_f64; order + 1];
        let mut max_degree = 0;
        for (c, s) in components.iter().enumerate() {
            let mut list = Vec::new();
            let mut mass = vec![0.0_f64; order + 1];
            for (mi, coeff) in s.terms() {
                if !coeff.is_real() {
                    return Err(NumericError::ImaginaryFlow {
                        component: c + 1,
                        value: format!("{coeff}"),
                    });
                }
                let g = mi.degree() as usize;
                mass[g] += coeff.l1_norm_f64();
                max_degree = max_degree.max(g);
                list.push((mi.exponents().to_vec(), rational_to_f64(coeff.re())));
            }
            for (slot, m) in degree_mass.iter_mut().zip(mass) {
                *slot = slot.max(m);
            }
            terms.push(list);
        }
        Ok(CompiledFlow {
            n,
            order,
            terms,
            degree_mass,
            max_degree,
        })
    }

    /// Evaluate every component at `p`, writing into `out`.
    fn eval(&self, p: &[f64], out: &mut [f64]) {
        // power table: pows[i * (max_degree + 1) + e] = p[i]^e
        let width = self.max_degree + 1;
        let mut pows = vec![1.0_f64; self.n * width];
        for i in 0..self.n {
            for e in 1..width {
                pows[i * width + e] = pows[i * width + e - 1] * p[i];
            }
        }
        for (c, list) in self.terms.iter().enumerate() {
            let mut acc = 0.0;
            for (exps, coeff) in list {
                let mut term = *coeff;
                for (i, &e) in exps.iter().enumerate() {
                    if e > 0 {
                        term *= pows[i * width + e as usize];
                    }
                }
                acc += term;
            }
            out[c] = acc;
        }
    }

    /// Geometric tail estimate at radius `r`: continue the last two populated
    /// degrees as a geometric series.  Zero when the truncation provably cut
    /// nothing (the series is a polynomial of lower degree) or when `r = 0`.
    fn tail_at(&self, r: f64) -> Result<f64, NumericError> {
        if r == 0.0 || self.max_degree < self.order {
            return Ok(0.0);
        }
        let g2 = self.max_degree;
        let t2 = self.degree_mass[g2] * r.powi(g2 as i32);
        let lower = (0..g2).rev().find(|&g| self.degree_mass[g] > 0.0);
        let ratio = match lower {
            Some(g1) => {
                let t1 = self.degree_mass[g1] * r.powi(g1 as i32);
                (t2 / t1).powf(1.0 / (g2 - g1) as f64)
            }
            // a single populated degree gives no decay ratio; fall back on
            // the radius itself (unit-coefficient continuation)
            None => r,
        };
        if ratio >= 1.0 {
            return Err(NumericError::TailUnbounded { ratio, radius: r });
        }
        Ok(t2 * ratio / (1.0 - ratio))
    }
}

/// The transport system `dK/dlambda = F(K)`, `K(0) = q`, prepared for fixed
/// floating-point integration.
#[derive(Clone, Debug)]
pub struct OdeProblem {
    n: usize,
    flow: CompiledFlow,
    k: Vec<f64>,
    q: Vec<f64>,
    kappa: f64,
    steps: usize,
    lambda_end: f64,
}

impl OdeProblem {
    /// The flow of a realization at momentum parameters `k`: component `b` is
    /// `sum_a k_a psi[b][a](P)`, folded exactly before compilation so the
    /// only rounding is the final rational-to-float conversion.  `order` is
    /// the truncation order of the evaluated grid.
    pub fn from_realization(
        r: &Realization,
        k: &[GaussRational],
        q: &[f64],
        steps: usize,
        lambda_end: f64,
        order: usize,
    ) -> Result<Self, NumericError> {
        let n = r.n();
        if k.len() != n {
            return Err(NumericError::Dimension {
                expected: n,
                got: k.len(),
            });
        }
        if q.len() != n {
            return Err(NumericError::Dimension {
                expected: n,
                got: q.len(),
            });
        }
        if steps == 0 {
            return Err(NumericError::ZeroSteps);
        }
        let psi = r.psi_matrix(order)?;
        let mut folded = Vec::with_capacity(n);
        for row in &psi {
            let mut acc = crate::fps::TruncatedSeries::zero(n, order);
            for (a, entry) in row.iter().enumerate() {
                acc = acc.add(&entry.scale(&k[a]))?;
            }
            folded.push(acc);
        }
        let flow = CompiledFlow::from_series(&folded.iter().collect::<Vec<_>>())?;
        let k_f64: Vec<f64> = k.iter().map(|c| rational_to_f64(c.re())).collect();
        let kappa = if r.kappa().is_real() {
            rational_to_f64(r.kappa().re())
        } else {
            f64::NAN
        };
        Ok(OdeProblem {
            n,
            flow,
            k: k_f64,
            q: q.to_vec(),
            kappa,
            steps,
            lambda_end,
        })
    }

    /// A bare flow in eigenvalue form: `n` series in the `n` trajectory
    /// variables, no momentum parameters.
    pub fn from_flow(
        flow: &SeriesVector,
        q: &[f64],
        steps: usize,
        lambda_end: f64,
    ) -> Result<Self, NumericError> {
        let n = flow.len();
        if flow.n_vars() != n {
            return Err(NumericError::Dimension {
                expected: n,
                got: flow.n_vars(),
            });
        }
        if q.len() != n {
            return Err(NumericError::Dimension {
                expected: n,
                got: q.len(),
            });
        }
        if steps == 0 {
            return Err(NumericError::ZeroSteps);
        }
        let compiled = CompiledFlow::from_series(&flow.components().iter().collect::<Vec<_>>())?;
        Ok(OdeProblem {
            n,
            flow: compiled,
            k: Vec::new(),
            q: q.to_vec(),
            kappa: 0.0,
            steps,
            lambda_end,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> &[f64] {
        &self.k
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn lambda_end(&self) -> f64 {
        self.lambda_end
    }

    pub fn flow_order(&self) -> usize {
        self.flow.order
    }
}

/// The integrator's answer plus its honesty certificate.
#[derive(Clone, Debug)]
pub struct OdeResult {
    pub value: Vec<f64>,
    /// First-order transport estimate of what the series truncation can have
    /// cost: the flow tail at the largest radius visited, times the
    /// integration length.  Step error (order `h^4`) is not included.
    pub tail_bound: f64,
    /// Largest coordinate magnitude the trajectory visited.
    pub radius: f64,
}

/// Classical fixed-step fourth-order Runge-Kutta for the transport system.
/// Fails rather than returning a value whose truncation-tail bound exceeds
/// `tail_tolerance`.
pub fn k_ode_integrate(p: &OdeProblem, tail_tolerance: f64) -> Result<OdeResult, NumericError> {
    let n = p.n;
    let h = p.lambda_end / p.steps as f64;
    let mut y = p.q.clone();
    let mut radius = inf_norm(&y);
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut stage = vec![0.0; n];
    for _ in 0..p.steps {
        p.flow.eval(&y, &mut k1);
        for i in 0..n {
            stage[i] = y[i] + 0.5 * h * k1[i];
        }
        radius = radius.max(inf_norm(&stage));
        p.flow.eval(&stage, &mut k2);
        for i in 0..n {
            stage[i] = y[i] + 0.5 * h * k2[i];
        }
        radius = radius.max(inf_norm(&stage));
        p.flow.eval(&stage, &mut k3);
        for i in 0..n {
            stage[i] = y[i] + h * k3[i];
        }
        radius = radius.max(inf_norm(&stage));
        p.flow.eval(&stage, &mut k4);
        for i in 0..n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        radius = radius.max(inf_norm(&y));
    }
    let tail_bound = p.flow.tail_at(radius)? * p.lambda_end.abs();
    if tail_bound > tail_tolerance {
        return Err(NumericError::PrecisionLoss {
            bound: tail_bound,
            tolerance: tail_tolerance,
        });
    }
    Ok(OdeResult {
        value: y,
        tail_bound,
        radius,
    })
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fps::{MultiIndex, TruncatedSeries};

    fn rat(n: i64, d: i64) -> GaussRational {
        GaussRational::from_ratio(n, d)
    }

    fn one_var_flow(coeffs: &[(u32, i64, i64)], order: usize) -> SeriesVector {
        let mut s = TruncatedSeries::zero(1, order);
        for &(e, n, d) in coeffs {
            s = s
                .add(
                    &TruncatedSeries::monomial(1, order, MultiIndex::new(vec![e]), rat(n, d))
                        .unwrap(),
                )
                .unwrap();
        }
        SeriesVector::new(vec![s]).unwrap()
    }

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(parse_decimal("0.05").unwrap(), rat(1, 20));
        assert_eq!(parse_decimal("-1.25e-2").unwrap(), rat(-1, 80));
        assert_eq!(parse_decimal("3").unwrap(), rat(3, 1));
        assert_eq!(parse_decimal("+.5").unwrap(), rat(1, 2));
        assert_eq!(parse_decimal("2e3").unwrap(), rat(2000, 1));
        for bad in ["", ".", "1.2.3", "0x1", "1e", "one"] {
            assert!(
                matches!(parse_decimal(bad), Err(NumericError::BadDecimal(_))),
                "{bad:?} should be rejected"
            );
        }
    }

    #[test]
    fn abelian_flow_is_linear_transport() {
        let r = Realization::builtin("abelian", Some(2), GaussRational::one()).unwrap();
        let k = vec![rat(3, 10), rat(-1, 5)];
        let p = OdeProblem::from_realization(&r, &k, &[0.1, 0.4], 50, 1.0, 6).unwrap();
        let sol = k_ode_integrate(&p, 1e-12).unwrap();
        assert!((sol.value[0] - 0.4).abs() < 1e-14);
        assert!((sol.value[1] - 0.2).abs() < 1e-14);
        // constant flow: the truncation cut nothing
        assert_eq!(sol.tail_bound, 0.0);
    }

    #[test]
    fn riccati_flow_matches_closed_form() {
        // dK/dlambda = K^2, K(0) = 1/10, so K(1) = 1/9
        let flow = one_var_flow(&[(2, 1, 1)], 6);
        let p = OdeProblem::from_flow(&flow, &[0.1], 1000, 1.0).unwrap();
        let sol = k_ode_integrate(&p, 1e-12).unwrap();
        assert!((sol.value[0] - 1.0 / 9.0).abs() < 1e-10, "{}", sol.value[0]);
        assert_eq!(sol.tail_bound, 0.0);
    }

    #[test]
    fn euler_flow_matches_exponential() {
        // dK/dlambda = K, K(0) = 1/2, so K(1) = e/2
        let flow = one_var_flow(&[(1, 1, 1)], 4);
        let p = OdeProblem::from_flow(&flow, &[0.5], 1000, 1.0).unwrap();
        let sol = k_ode_integrate(&p, 1e-12).unwrap();
        assert!((sol.value[0] - 0.5 * std::f64::consts::E).abs() < 1e-10);
    }

    #[test]
    fn step_halving_is_fourth_order() {
        let flow = one_var_flow(&[(2, 1, 1)], 4);
        let exact = 1.0; // K = 1/2 / (1 - lambda/2) at lambda = 1
        let run = |steps: usize| {
            let p = OdeProblem::from_flow(&flow, &[0.5], steps, 1.0).unwrap();
            (k_ode_integrate(&p, 1e-12).unwrap().value[0] - exact).abs()
        };
        let coarse = run(20);
        let fine = run(40);
        assert!(
            coarse / fine >= 12.0,
            "halving gained only {:.1}x (coarse {coarse:.3e}, fine {fine:.3e})",
            coarse / fine
        );
    }

    #[test]
    fn tail_bound_reports_truncation() {
        // dK/dlambda = 1/(1-K) truncated at order 8; the trajectory reaches
        // K ~ 0.46 from q = 0.3, where the cut tail is of order 1e-3
        let geometric = {
            let one_minus = TruncatedSeries::one(1, 8)
                .sub(&TruncatedSeries::var(1, 8, 0).unwrap())
                .unwrap();
            SeriesVector::new(vec![crate::fps::recip(&one_minus).unwrap()]).unwrap()
        };
        let p = OdeProblem::from_flow(&geometric, &[0.3], 400, 0.1).unwrap();
        let tight = k_ode_integrate(&p, 1e-6);
        assert!(matches!(tight, Err(NumericError::PrecisionLoss { .. })));
        let sol = k_ode_integrate(&p, 1e-2).unwrap();
        let exact = 1.0 - (0.49_f64 - 0.2).sqrt();
        assert!(sol.tail_bound > 0.0);
        assert!(
            (sol.value[0] - exact).abs() < sol.tail_bound,
            "deviation {:.3e} above the reported bound {:.3e}",
            (sol.value[0] - exact).abs(),
            sol.tail_bound
        );
    }

    #[test]
    fn problem_construction_is_checked() {
        let r = Realization::builtin("su2_fl", None, GaussRational::one()).unwrap();
        let short_k = vec![rat(1, 10)];
        assert!(matches!(
            OdeProblem::from_realization(&r, &short_k, &[0.0; 3], 10, 1.0, 6),
            Err(NumericError::Dimension { expected: 3, got: 1 })
        ));
        let k3 = vec![rat(1, 10), rat(0, 1), rat(0, 1)];
        assert!(matches!(
            OdeProblem::from_realization(&r, &k3, &[0.0; 3], 0, 1.0, 6),
            Err(NumericError::ZeroSteps)
        ));
        // an imaginary momentum parameter drives the folded flow off the reals
        let k_imag = vec![GaussRational::i(), rat(0, 1), rat(0, 1)];
        assert!(matches!(
            OdeProblem::from_realization(&r, &k_imag, &[0.0; 3], 10, 1.0, 6),
            Err(NumericError::ImaginaryFlow { .. })
        ));
    }

    #[test]
    fn su2_fl_momentum_flow_is_real_and_compiles() {
        let r = Realization::builtin("su2_fl", None, GaussRational::from_ratio(1, 2)).unwrap();
        let k = vec![rat(1, 20), rat(-1, 20), rat(1, 10)];
        let p = OdeProblem::from_realization(&r, &k, &[0.05, 0.05, -0.02], 100, 1.0, 10).unwrap();
        let sol = k_ode_integrate(&p, 1e-8).unwrap();
        // the trajectory stays near the inputs at these scales
        assert!(sol.radius < 0.3);
        assert!(sol.tail_bound < 1e-10);
    }
}
