//! Exact Gaussian-rational scalars.
//!
//! [`GaussRational`] is a complex number `re + im*i` whose real and imaginary
//! parts are arbitrary-precision rationals.  All field operations are exact;
//! equality is structural (and meaningful, because `BigRational` keeps every
//! fraction reduced with a positive denominator).

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use super::Complex64;

/// A complex number with exact rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussRational {
    re: BigRational,
    im: BigRational,
}

impl GaussRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRational { re, im }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The imaginary unit `i`.
    pub fn i() -> Self {
        GaussRational {
            re: BigRational::zero(),
            im: BigRational::from_integer(BigInt::from(1)),
        }
    }

    pub fn from_int(n: i64) -> Self {
        GaussRational {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    /// Exact rational `p/q`.  Panics if `q == 0`.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        GaussRational {
            re: BigRational::new(BigInt::from(p), BigInt::from(q)),
            im: BigRational::zero(),
        }
    }

    pub fn from_rational(re: BigRational) -> Self {
        GaussRational {
            re,
            im: BigRational::zero(),
        }
    }

    /// `(p/q)*i`.  Panics if `q == 0`.
    pub fn imag_ratio(p: i64, q: i64) -> Self {
        GaussRational {
            re: BigRational::zero(),
            im: BigRational::new(BigInt::from(p), BigInt::from(q)),
        }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.im.is_zero() && self.re == BigRational::from_integer(BigInt::from(1))
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// `re^2 + im^2`, an exact non-negative rational.
    pub fn abs_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn checked_recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.abs_sq();
        Some(GaussRational {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }

    /// Integer power with negative exponents allowed (error only for `0^-n`).
    pub fn checked_pow(&self, exp: i64) -> Option<Self> {
        if exp < 0 {
            return self.checked_recip()?.checked_pow(-exp);
        }
        let mut acc = GaussRational::one();
        let mut base = self.clone();
        let mut e = exp as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Some(acc)
    }

    pub fn to_complex_f64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    /// `|re| + |im|`, a cheap magnitude proxy used by tail estimates.
    pub fn l1_norm_f64(&self) -> f64 {
        rational_to_f64(&self.re).abs() + rational_to_f64(&self.im).abs()
    }
}

/// Convert an exact rational to the nearest `f64`, scaling down first when the
/// raw parts overflow the double range.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back to a bit-length balanced quotient; only reachable for numbers
    // far outside any regime the engine produces in practice.
    let shift = (r.numer().bits() as i64 - r.denom().bits() as i64).max(0) as u64;
    let scaled = r / BigRational::from_integer(BigInt::from(1) << shift.min(1 << 20) as usize);
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift.min(1 << 20) as i32)
}

impl fmt::Debug for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Expression-grammar-compatible rendering: `0`, `3/4`, `-2*i`, `1/2 - 3*i`.
impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn rat(r: &BigRational) -> String {
            if r.denom() == &BigInt::from(1) {
                format!("{}", r.numer())
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        }
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        if !self.re.is_zero() {
            write!(f, "{}", rat(&self.re))?;
            first = false;
        }
        if !self.im.is_zero() {
            let mag = self.im.abs();
            let part = format!("{}*i", rat(&mag));
            if first {
                if self.im.is_negative() {
                    write!(f, "-{part}")?;
                } else {
                    write!(f, "{part}")?;
                }
            } else if self.im.is_negative() {
                write!(f, " - {part}")?;
            } else {
                write!(f, " + {part}")?;
            }
        }
        Ok(())
    }
}

impl Add for &GaussRational {
    type Output = GaussRational;
    fn add(self, rhs: &GaussRational) -> GaussRational {
        GaussRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &GaussRational {
    type Output = GaussRational;
    fn sub(self, rhs: &GaussRational) -> GaussRational {
        GaussRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &GaussRational {
    type Output = GaussRational;
    fn mul(self, rhs: &GaussRational) -> GaussRational {
        // Fast path for the common all-real case.
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussRational {
                re: &self.re * &rhs.re,
                im: BigRational::zero(),
            };
        }
        GaussRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

/// Division panics on a zero divisor; callers that can see user input check
/// with [`GaussRational::checked_recip`] first.
impl Div for &GaussRational {
    type Output = GaussRational;
    fn div(self, rhs: &GaussRational) -> GaussRational {
        let inv = rhs
            .checked_recip()
            .expect("GaussRational division by zero");
        self * &inv
    }
}

impl Neg for &GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl Neg for GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        -&self
    }
}

impl AddAssign<&GaussRational> for GaussRational {
    fn add_assign(&mut self, rhs: &GaussRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussRational> for GaussRational {
    fn sub_assign(&mut self, rhs: &GaussRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}
