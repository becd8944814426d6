//! Lossless record form of series for machine interchange.
//!
//! Coefficients are exact rationals, so numerators and denominators travel as
//! decimal strings rather than floats; records list terms in the same
//! graded-lexicographic order the series stores them in.

use num::bigint::BigInt;
use num::rational::BigRational;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

use super::{FpsError, GaussRational, MultiIndex, TruncatedSeries};

/// One term of a commutative series: exponents plus an exact coefficient,
/// real and imaginary parts each as `[numerator, denominator]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub exponents: Vec<u32>,
    pub re: [String; 2],
    pub im: [String; 2],
}

/// One term of a normal-ordered operator: polynomial exponents on the left,
/// derivative exponents on the right.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeylTermRecord {
    pub x_exponents: Vec<u32>,
    pub exponents: Vec<u32>,
    pub re: [String; 2],
    pub im: [String; 2],
}

fn encode_rational(r: &BigRational) -> [String; 2] {
    [r.numer().to_string(), r.denom().to_string()]
}

fn decode_rational(pair: &[String; 2]) -> Result<BigRational, FpsError> {
    let numer = BigInt::from_str(&pair[0])
        .map_err(|e| FpsError::BadRecord(format!("numerator {:?}: {e}", pair[0])))?;
    let denom = BigInt::from_str(&pair[1])
        .map_err(|e| FpsError::BadRecord(format!("denominator {:?}: {e}", pair[1])))?;
    if denom == BigInt::from(0) {
        return Err(FpsError::BadRecord("zero denominator".into()));
    }
    Ok(BigRational::new(numer, denom))
}

pub(crate) fn encode_coeff(c: &GaussRational) -> ([String; 2], [String; 2]) {
    (encode_rational(c.re()), encode_rational(c.im()))
}

pub(crate) fn decode_coeff(re: &[String; 2], im: &[String; 2]) -> Result<GaussRational, FpsError> {
    Ok(GaussRational::new(decode_rational(re)?, decode_rational(im)?))
}

/// Flatten a series into records, preserving term order.
pub fn series_to_records(s: &TruncatedSeries) -> Vec<TermRecord> {
    s.terms()
        .map(|(mi, c)| {
            let (re, im) = encode_coeff(c);
            TermRecord {
                exponents: mi.exponents().to_vec(),
                re,
                im,
            }
        })
        .collect()
}

/// Rebuild a series from records.  Duplicate exponent rows accumulate; rows
/// above `order` are rejected rather than silently dropped.
pub fn records_to_series(
    n_vars: usize,
    order: usize,
    records: &[TermRecord],
) -> Result<TruncatedSeries, FpsError> {
    let mut s = TruncatedSeries::zero(n_vars, order);
    for rec in records {
        if rec.exponents.len() != n_vars {
            return Err(FpsError::DimensionMismatch {
                expected: n_vars,
                got: rec.exponents.len(),
            });
        }
        let mi = MultiIndex::new(rec.exponents.clone());
        if mi.degree() as usize > order {
            return Err(FpsError::BadRecord(format!(
                "term of degree {} above the declared order {order}",
                mi.degree()
            )));
        }
        let c = decode_coeff(&rec.re, &rec.im)?;
        s.insert_add(mi, &c);
    }
    Ok(s)
}

/// Flatten normal-ordered operator terms `(x-exponents, derivative exponents,
/// coefficient)` into records.
pub fn weyl_to_records<'a, I>(terms: I) -> Vec<WeylTermRecord>
where
    I: Iterator<Item = (&'a MultiIndex, &'a MultiIndex, &'a GaussRational)>,
{
    terms
        .map(|(x_mi, d_mi, c)| {
            let (re, im) = encode_coeff(c);
            WeylTermRecord {
                x_exponents: x_mi.exponents().to_vec(),
                exponents: d_mi.exponents().to_vec(),
                re,
                im,
            }
        })
        .collect()
}
