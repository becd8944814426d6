//! Analytic functions applied to series jets.
//!
//! Every function here reduces to one pattern: a univariate Taylor
//! coefficient list `c_0..c_M` composed with a jet by Horner's scheme.  The
//! argument's constant term decides admissibility — exact arithmetic can only
//! represent values of the catalogue functions at rational points where those
//! values are again rational, so `exp`-like functions demand a zero constant
//! term and `log`-like functions demand constant term one.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, ToPrimitive, Zero};

use super::{FpsError, GaussRational, MultiIndex, TruncatedSeries};

/// `n!` as a big integer.
pub(crate) fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}

/// Binomial coefficient `C(n, k)`.
pub(crate) fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// The Bernoulli numbers `B_0 .. B_{count-1}` (convention `B_1 = -1/2`),
/// from the defining recurrence `sum_k C(n+1, k) B_k = 0`.
pub fn bernoulli_numbers(count: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(count);
    for n in 0..count {
        if n == 0 {
            b.push(BigRational::one());
            continue;
        }
        let mut acc = BigRational::zero();
        for (k, bk) in b.iter().enumerate() {
            acc += BigRational::from_integer(binomial(n + 1, k)) * bk;
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(n + 1)));
    }
    b
}

fn inv_factorial(m: usize) -> GaussRational {
    GaussRational::from_rational(BigRational::new(BigInt::one(), factorial(m)))
}

/// Catalogue of analytic functions usable on jets.
#[derive(Clone, Debug, PartialEq)]
pub enum AnalyticFn {
    Exp,
    Log,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tan,
    Tanh,
    /// `u^r` for rational `r`.  Integer exponents work for any base with an
    /// invertible (or, when `r >= 0`, arbitrary) constant term; fractional
    /// exponents need constant term exactly one.
    PowRational(BigRational),
    /// The even part of `v coth v` reparametrised by `w = v^2`:
    /// `ucoth_sq(w) = 1 + w/3 - w^2/45 + ...`.
    UCothSq,
}

impl AnalyticFn {
    pub fn apply(&self, u: &TruncatedSeries) -> Result<TruncatedSeries, FpsError> {
        let order = u.order();
        match self {
            AnalyticFn::Exp => apply_at_zero(u, "exp", &taylor_exp(order)),
            AnalyticFn::Sin => apply_at_zero(u, "sin", &taylor_sin(order)),
            AnalyticFn::Cos => apply_at_zero(u, "cos", &taylor_cos(order)),
            AnalyticFn::Sinh => apply_at_zero(u, "sinh", &taylor_sinh(order)),
            AnalyticFn::Cosh => apply_at_zero(u, "cosh", &taylor_cosh(order)),
            AnalyticFn::Tan => apply_at_zero(u, "tan", &taylor_tan(order, false)),
            AnalyticFn::Tanh => apply_at_zero(u, "tanh", &taylor_tan(order, true)),
            AnalyticFn::UCothSq => apply_at_zero(u, "ucoth_sq", &taylor_ucoth_sq(order)),
            AnalyticFn::Log => {
                let v = shift_to_zero(u, "log")?;
                let mut coeffs = vec![GaussRational::zero()];
                for m in 1..=order {
                    let sign = if m % 2 == 1 { 1 } else { -1 };
                    coeffs.push(GaussRational::from_ratio(sign, m as i64));
                }
                Ok(apply_univariate(&coeffs, &v))
            }
            AnalyticFn::PowRational(r) => pow_rational(u, r),
        }
    }
}

/// `cos(sqrt(w))` as a function of `w`; entire, so any zero-constant jet is
/// an admissible argument.
pub fn cos_sqrt(u: &TruncatedSeries) -> Result<TruncatedSeries, FpsError> {
    let order = u.order();
    let coeffs: Vec<GaussRational> = (0..=order)
        .map(|m| {
            let c = inv_factorial(2 * m);
            if m % 2 == 1 {
                -&c
            } else {
                c
            }
        })
        .collect();
    apply_at_zero(u, "cos_sqrt", &coeffs)
}

/// `sin(sqrt(w)) / sqrt(w)` as a function of `w`.
pub fn sinc_sqrt(u: &TruncatedSeries) -> Result<TruncatedSeries, FpsError> {
    let order = u.order();
    let coeffs: Vec<GaussRational> = (0..=order)
        .map(|m| {
            let c = inv_factorial(2 * m + 1);
            if m % 2 == 1 {
                -&c
            } else {
                c
            }
        })
        .collect();
    apply_at_zero(u, "sinc_sqrt", &coeffs)
}

/// `ucoth_sq` as a standalone function (also reachable through
/// [`AnalyticFn::UCothSq`]).
pub fn ucoth_sq(u: &TruncatedSeries) -> Result<TruncatedSeries, FpsError> {
    AnalyticFn::UCothSq.apply(u)
}

/// `(ucoth_sq(w) - 1) / w`, the remainder after the leading one.  Analytic at
/// zero with value `1/3`.
pub fn ucoth_sq_rem(u: &TruncatedSeries) -> Result<TruncatedSeries, FpsError> {
    let order = u.order();
    let full = taylor_ucoth_sq(order + 1);
    apply_at_zero(u, "ucoth_sq_rem", &full[1..])
}

fn taylor_exp(order: usize) -> Vec<GaussRational> {
    (0..=order).map(inv_factorial).collect()
}

fn taylor_sin(order: usize) -> Vec<GaussRational> {
    (0..=order)
        .map(|m| {
            if m % 2 == 0 {
                GaussRational::zero()
            } else if m % 4 == 1 {
                inv_factorial(m)
            } else {
                -&inv_factorial(m)
            }
        })
        .collect()
}

fn taylor_cos(order: usize) -> Vec<GaussRational> {
    (0..=order)
        .map(|m| {
            if m % 2 == 1 {
                GaussRational::zero()
            } else if m % 4 == 0 {
                inv_factorial(m)
            } else {
                -&inv_factorial(m)
            }
        })
        .collect()
}

fn taylor_sinh(order: usize) -> Vec<GaussRational> {
    (0..=order)
        .map(|m| {
            if m % 2 == 1 {
                inv_factorial(m)
            } else {
                GaussRational::zero()
            }
        })
        .collect()
}

fn taylor_cosh(order: usize) -> Vec<GaussRational> {
    (0..=order)
        .map(|m| {
            if m % 2 == 0 {
                inv_factorial(m)
            } else {
                GaussRational::zero()
            }
        })
        .collect()
}

/// Coefficients of `tan` (or `tanh`) from `tan' = 1 + tan^2`
/// (`tanh' = 1 - tanh^2`).
fn taylor_tan(order: usize, hyperbolic: bool) -> Vec<GaussRational> {
    let mut t = vec![GaussRational::zero()];
    for m in 1..=order {
        let mut acc = if m == 1 {
            GaussRational::one()
        } else {
            GaussRational::zero()
        };
        let mut square = GaussRational::zero();
        for a in 0..m {
            let b = m - 1 - a;
            if b < t.len() && a < t.len() {
                square += &(&t[a] * &t[b]);
            }
        }
        if hyperbolic {
            acc -= &square;
        } else {
            acc += &square;
        }
        t.push(&acc * &GaussRational::from_ratio(1, m as i64));
    }
    t
}

fn taylor_ucoth_sq(order: usize) -> Vec<GaussRational> {
    let bern = bernoulli_numbers(2 * order + 1);
    (0..=order)
        .map(|m| {
            let num = BigRational::from_integer(BigInt::from(4u32).pow(m as u32));
            let c = &bern[2 * m] * num / BigRational::from_integer(factorial(2 * m));
            GaussRational::from_rational(c)
        })
        .collect()
}

fn require_zero_constant(u: &TruncatedSeries, name: &str) -> Result<(), FpsError> {
    if !u.constant_term().is_zero() {
        return Err(FpsError::AnalyticDomain(format!(
            "{name} needs an argument with zero constant term, got {}",
            u.constant_term()
        )));
    }
    Ok(())
}

fn shift_to_zero(u: &TruncatedSeries, name: &str) -> Result<TruncatedSeries, FpsError> {
    if !u.constant_term().is_one() {
        return Err(FpsError::AnalyticDomain(format!(
            "{name} needs an argument with constant term 1, got {}",
            u.constant_term()
        )));
    }
    u.sub(&TruncatedSeries::one(u.n_vars(), u.order()))
}

fn apply_at_zero(
    u: &TruncatedSeries,
    name: &str,
    coeffs: &[GaussRational],
) -> Result<TruncatedSeries, FpsError> {
    require_zero_constant(u, name)?;
    Ok(apply_univariate(coeffs, u))
}

/// Horner evaluation of `sum_m coeffs[m] u^m`.  Assumes `u` has zero constant
/// term, so degrees beyond `u.order()` never feed back below the truncation.
fn apply_univariate(coeffs: &[GaussRational], u: &TruncatedSeries) -> TruncatedSeries {
    let n = u.n_vars();
    let order = u.order();
    let mut acc = TruncatedSeries::constant(
        n,
        order,
        coeffs.last().cloned().unwrap_or_else(GaussRational::zero),
    );
    for c in coeffs.iter().rev().skip(1) {
        acc = acc.mul_to_order(u, order);
        acc.insert_add(MultiIndex::zeros(n), c);
    }
    acc
}

/// Integer powers by repeated squaring; fractional powers through the
/// generalised binomial series around constant term one.
fn pow_rational(u: &TruncatedSeries, r: &BigRational) -> Result<TruncatedSeries, FpsError> {
    if r.is_integer() {
        let e = r.to_integer().to_i64().ok_or_else(|| {
            FpsError::InvalidPower(format!("exponent {r} does not fit in 64 bits"))
        })?;
        return pow_integer(u, e);
    }
    let v = shift_to_zero(u, &format!("fractional power {r}"))?;
    let order = u.order();
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut c = GaussRational::one();
    coeffs.push(c.clone());
    for m in 1..=order {
        // C(r, m) = C(r, m-1) * (r - m + 1) / m
        let step = GaussRational::from_rational(
            (r - BigRational::from_integer(BigInt::from(m as i64 - 1)))
                / BigRational::from_integer(BigInt::from(m as i64)),
        );
        c = &c * &step;
        coeffs.push(c.clone());
    }
    Ok(apply_univariate(&coeffs, &v))
}

pub(crate) fn pow_integer(u: &TruncatedSeries, e: i64) -> Result<TruncatedSeries, FpsError> {
    if e < 0 {
        let inv = super::compose::recip(u)?;
        return pow_integer(&inv, -e);
    }
    let order = u.order();
    let mut acc = TruncatedSeries::one(u.n_vars(), order);
    let mut base = u.clone();
    let mut e = e as u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul_to_order(&base, order);
        }
        e >>= 1;
        if e > 0 {
            base = base.mul_to_order(&base, order);
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fps::Complex64;

    fn var_k(order: usize) -> TruncatedSeries {
        TruncatedSeries::var(1, order, 0).unwrap()
    }

    fn rat(n: i64, d: i64) -> GaussRational {
        GaussRational::from_ratio(n, d)
    }

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    #[test]
    fn bernoulli_table() {
        let b = bernoulli_numbers(13);
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(b[0], q(1, 1));
        assert_eq!(b[1], q(-1, 2));
        assert_eq!(b[2], q(1, 6));
        assert_eq!(b[3], BigRational::zero());
        assert_eq!(b[4], q(-1, 30));
        assert_eq!(b[6], q(1, 42));
        assert_eq!(b[12], q(-691, 2730));
    }

    #[test]
    fn exp_coefficients() {
        let e = AnalyticFn::Exp.apply(&var_k(6)).unwrap();
        for m in 0..=6u32 {
            assert_eq!(
                e.coeff(&mi(&[m])),
                GaussRational::from_rational(BigRational::new(
                    1.into(),
                    factorial(m as usize)
                ))
            );
        }
    }

    #[test]
    fn log_and_exp_invert() {
        let one_plus_k = TruncatedSeries::one(1, 5).add(&var_k(5)).unwrap();
        let l = AnalyticFn::Log.apply(&one_plus_k).unwrap();
        assert_eq!(l.coeff(&mi(&[1])), rat(1, 1));
        assert_eq!(l.coeff(&mi(&[2])), rat(-1, 2));
        assert_eq!(l.coeff(&mi(&[3])), rat(1, 3));
        let back = AnalyticFn::Exp.apply(&l).unwrap();
        assert_eq!(back, one_plus_k);
    }

    #[test]
    fn inverse_sqrt_jet() {
        // (1 - 2k^2)^(-1/2) = 1 + k^2 + (3/2) k^4 + ...
        let u = TruncatedSeries::one(1, 5)
            .add(&TruncatedSeries::monomial(1, 5, mi(&[2]), rat(-2, 1)).unwrap())
            .unwrap();
        let s = AnalyticFn::PowRational(BigRational::new((-1).into(), 2.into()))
            .apply(&u)
            .unwrap();
        assert_eq!(s.coeff(&mi(&[0])), rat(1, 1));
        assert_eq!(s.coeff(&mi(&[2])), rat(1, 1));
        assert_eq!(s.coeff(&mi(&[4])), rat(3, 2));
        assert_eq!(s.coeff(&mi(&[1])), rat(0, 1));

        // square of the square root returns the argument
        let half = AnalyticFn::PowRational(BigRational::new(1.into(), 2.into()))
            .apply(&u)
            .unwrap();
        assert_eq!(half.mul(&half).unwrap(), u);
    }

    #[test]
    fn integer_powers() {
        let one_plus_k = TruncatedSeries::one(1, 4).add(&var_k(4)).unwrap();
        let cubed = AnalyticFn::PowRational(BigRational::from_integer(3.into()))
            .apply(&one_plus_k)
            .unwrap();
        assert_eq!(cubed.coeff(&mi(&[2])), rat(3, 1));
        assert_eq!(cubed.coeff(&mi(&[3])), rat(1, 1));

        let inv = AnalyticFn::PowRational(BigRational::from_integer((-1).into()))
            .apply(&one_plus_k)
            .unwrap();
        assert_eq!(inv.coeff(&mi(&[3])), rat(-1, 1));

        // (2 + k)^(-2) = 1/4 - k/4 + (3/16) k^2 - ...
        let two_plus_k = TruncatedSeries::constant(1, 4, rat(2, 1))
            .add(&var_k(4))
            .unwrap();
        let s = AnalyticFn::PowRational(BigRational::from_integer((-2).into()))
            .apply(&two_plus_k)
            .unwrap();
        assert_eq!(s.coeff(&mi(&[0])), rat(1, 4));
        assert_eq!(s.coeff(&mi(&[1])), rat(-1, 4));
        assert_eq!(s.coeff(&mi(&[2])), rat(3, 16));
    }

    #[test]
    fn pythagorean_identity() {
        // sin^2 + cos^2 = 1 for a two-variable argument
        let u = TruncatedSeries::var(2, 6, 0)
            .unwrap()
            .add(
                &TruncatedSeries::monomial(2, 6, mi(&[0, 2]), rat(1, 1)).unwrap(),
            )
            .unwrap();
        let s = AnalyticFn::Sin.apply(&u).unwrap();
        let c = AnalyticFn::Cos.apply(&u).unwrap();
        let total = s.mul(&s).unwrap().add(&c.mul(&c).unwrap()).unwrap();
        assert_eq!(total, TruncatedSeries::one(2, 6));

        // cosh^2 - sinh^2 = 1
        let sh = AnalyticFn::Sinh.apply(&u).unwrap();
        let ch = AnalyticFn::Cosh.apply(&u).unwrap();
        let total = ch.mul(&ch).unwrap().sub(&sh.mul(&sh).unwrap()).unwrap();
        assert_eq!(total, TruncatedSeries::one(2, 6));
    }

    #[test]
    fn tan_consistency() {
        let u = var_k(7);
        let t = AnalyticFn::Tan.apply(&u).unwrap();
        assert_eq!(t.coeff(&mi(&[1])), rat(1, 1));
        assert_eq!(t.coeff(&mi(&[3])), rat(1, 3));
        assert_eq!(t.coeff(&mi(&[5])), rat(2, 15));
        assert_eq!(t.coeff(&mi(&[7])), rat(17, 315));
        let s = AnalyticFn::Sin.apply(&u).unwrap();
        let c = AnalyticFn::Cos.apply(&u).unwrap();
        assert_eq!(t.mul(&c).unwrap(), s.truncated(7));

        let th = AnalyticFn::Tanh.apply(&u).unwrap();
        assert_eq!(th.coeff(&mi(&[3])), rat(-1, 3));
        assert_eq!(th.coeff(&mi(&[5])), rat(2, 15));
    }

    #[test]
    fn ucoth_sq_jet_and_value() {
        let w = var_k(3);
        let s = ucoth_sq(&w).unwrap();
        assert_eq!(s.coeff(&mi(&[0])), rat(1, 1));
        assert_eq!(s.coeff(&mi(&[1])), rat(1, 3));
        assert_eq!(s.coeff(&mi(&[2])), rat(-1, 45));
        assert_eq!(s.coeff(&mi(&[3])), rat(2, 945));

        // numeric spot check against v coth v at v = 0.1
        let deep = ucoth_sq(&var_k(12)).unwrap();
        let v: f64 = 0.1;
        let got = deep
            .eval_complex(&[Complex64::new(v * v, 0.0)])
            .unwrap()
            .re;
        let want = v * (v.exp() + (-v).exp()) / (v.exp() - (-v).exp());
        assert!((got - want).abs() < 1e-14, "got {got}, want {want}");

        // remainder satisfies 1 + w * rem = ucoth_sq
        let rem = ucoth_sq_rem(&w).unwrap();
        assert_eq!(rem.coeff(&mi(&[0])), rat(1, 3));
        let rebuilt = TruncatedSeries::one(1, 3)
            .add(&w.mul(&rem).unwrap())
            .unwrap();
        assert_eq!(rebuilt, s);
    }

    #[test]
    fn sqrt_trig_generators() {
        let w = var_k(4);
        let c = cos_sqrt(&w).unwrap();
        assert_eq!(c.coeff(&mi(&[0])), rat(1, 1));
        assert_eq!(c.coeff(&mi(&[1])), rat(-1, 2));
        assert_eq!(c.coeff(&mi(&[2])), rat(1, 24));
        let s = sinc_sqrt(&w).unwrap();
        assert_eq!(s.coeff(&mi(&[1])), rat(-1, 6));
        assert_eq!(s.coeff(&mi(&[2])), rat(1, 120));

        // sinc_sqrt^2 * w + cos_sqrt^2 = 1  (that is sin^2 + cos^2 at sqrt(w))
        let total = s
            .mul(&s)
            .unwrap()
            .mul(&w)
            .unwrap()
            .add(&c.mul(&c).unwrap())
            .unwrap();
        assert_eq!(total, TruncatedSeries::one(1, 4));
    }

    #[test]
    fn domain_violations() {
        let one_plus_k = TruncatedSeries::one(1, 3).add(&var_k(3)).unwrap();
        assert!(matches!(
            AnalyticFn::Exp.apply(&one_plus_k),
            Err(FpsError::AnalyticDomain(_))
        ));
        let two_plus_k = TruncatedSeries::constant(1, 3, rat(2, 1))
            .add(&var_k(3))
            .unwrap();
        assert!(matches!(
            AnalyticFn::Log.apply(&two_plus_k),
            Err(FpsError::AnalyticDomain(_))
        ));
        assert!(matches!(
            AnalyticFn::PowRational(BigRational::new(1.into(), 2.into())).apply(&var_k(3)),
            Err(FpsError::AnalyticDomain(_))
        ));
    }
}
