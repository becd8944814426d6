//! Closed forms for the two su(2) grids, in two renditions each: plain
//! floating-point functions for sample evaluation, and exact jets in the
//! doubled `[k | q]` ring for coefficient-level comparison against the
//! series engine.
//!
//! The product-law closed form for the square-root grid circulates in two
//! versions that differ in which argument the first square root sees.  Both
//! are implemented verbatim and [`adjudicate_fl_d`] lets the exact series
//! decide; nothing here assumes a winner.

use num::bigint::BigInt;
use num::rational::BigRational;

use super::NumericError;
use crate::fps::{
    cos_sqrt, sinc_sqrt, AnalyticFn, Complex64, GaussRational, MultiIndex, SeriesVector,
    TruncatedSeries,
};
use crate::kcalc::d_series;
use crate::realization::Realization;

fn to3(v: &[f64]) -> Result<[f64; 3], NumericError> {
    v.try_into().map_err(|_| NumericError::Dimension {
        expected: 3,
        got: v.len(),
    })
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

/// `sin(t)/t`, continued through zero.
fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-8 {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

fn sqrt_branch(value: f64, what: &'static str) -> Result<f64, NumericError> {
    if value < 0.0 {
        return Err(NumericError::Branch { what, value });
    }
    Ok(value.sqrt())
}

/// The transported momentum of the square-root grid,
/// `P(mu) = k sqrt(1-kappa^2 q^2) mu sinc(kappa|k|mu) + q cos(kappa|k|mu)
///  - (k x q) kappa mu sinc(kappa|k|mu)`.
/// At `mu = 1` this is `K(k, q)`; at `mu = 0` it returns `q` exactly, and at
/// `kappa = 0` it degenerates to the straight line `k mu + q`.
pub fn fl_p(k: &[f64], q: &[f64], kappa: f64, mu: f64) -> Result<[f64; 3], NumericError> {
    let k = to3(k)?;
    let q = to3(q)?;
    let root = sqrt_branch(1.0 - kappa * kappa * dot3(&q, &q), "1 - kappa^2 q^2")?;
    let angle = kappa * norm3(&k) * mu;
    let spread = mu * sinc(angle);
    let cos = angle.cos();
    let cross = cross3(&k, &q);
    let mut out = [0.0; 3];
    for c in 0..3 {
        out[c] = k[c] * root * spread + q[c] * cos - cross[c] * kappa * spread;
    }
    Ok(out)
}

/// Both sides of the transport invariant
/// `sqrt(1-kappa^2 P^2) = sqrt(1-kappa^2 q^2) cos(kappa|k|mu)
///  - kappa^2 mu (q.k) sinc(kappa|k|mu)`,
/// evaluated at a claimed trajectory point `p`.  The two numbers agree along
/// the true trajectory.
pub fn fl_p_conserved_pair(
    k: &[f64],
    q: &[f64],
    kappa: f64,
    mu: f64,
    p: &[f64],
) -> Result<(f64, f64), NumericError> {
    let k = to3(k)?;
    let q = to3(q)?;
    let p = to3(p)?;
    let lhs = sqrt_branch(1.0 - kappa * kappa * dot3(&p, &p), "1 - kappa^2 P^2")?;
    let root = sqrt_branch(1.0 - kappa * kappa * dot3(&q, &q), "1 - kappa^2 q^2")?;
    let angle = kappa * norm3(&k) * mu;
    let rhs = root * angle.cos() - kappa * kappa * mu * dot3(&q, &k) * sinc(angle);
    Ok((lhs, rhs))
}

/// The product law for the square-root grid exactly as printed in
/// circulation: the same `sqrt(1 - kappa^2 k^2)` multiplies both arguments.
pub fn fl_d_paper(k: &[f64], q: &[f64], kappa: f64) -> Result<[f64; 3], NumericError> {
    let k = to3(k)?;
    let q = to3(q)?;
    let root_k = sqrt_branch(1.0 - kappa * kappa * dot3(&k, &k), "1 - kappa^2 k^2")?;
    let cross = cross3(&k, &q);
    let mut out = [0.0; 3];
    for c in 0..3 {
        out[c] = root_k * k[c] + root_k * q[c] - kappa * cross[c];
    }
    Ok(out)
}

/// The symmetric-in-arguments variant of the same law: the root over `q^2`
/// multiplies `k` and the root over `k^2` multiplies `q`.
pub fn fl_d_symmetric_variant(k: &[f64], q: &[f64], kappa: f64) -> Result<[f64; 3], NumericError> {
    let k = to3(k)?;
    let q = to3(q)?;
    let root_k = sqrt_branch(1.0 - kappa * kappa * dot3(&k, &k), "1 - kappa^2 k^2")?;
    let root_q = sqrt_branch(1.0 - kappa * kappa * dot3(&q, &q), "1 - kappa^2 q^2")?;
    let cross = cross3(&k, &q);
    let mut out = [0.0; 3];
    for c in 0..3 {
        out[c] = root_q * k[c] + root_k * q[c] - kappa * cross[c];
    }
    Ok(out)
}

/// Scalar and vector parts of the composed rotation for the symmetric grid:
/// `(cos(kappa|D|/2), (D/|D|) sin(kappa|D|/2))` expressed through `k` and
/// `q`.  The half angles carry the generator normalization; the pair always
/// satisfies `scalar^2 + |vector|^2 = 1`.
pub fn sym_d_relations(
    k: &[f64],
    q: &[f64],
    kappa: f64,
) -> Result<(f64, [f64; 3]), NumericError> {
    let (scalar, reduced) = sym_parts(&to3(k)?, &to3(q)?, kappa);
    let mut vector = [0.0; 3];
    for c in 0..3 {
        vector[c] = 0.5 * kappa * reduced[c];
    }
    Ok((scalar, vector))
}

/// `(cos part, vector part with the kappa/2 prefactor divided out)`; keeping
/// the prefactor out lets the solver take the abelian limit without a
/// zero-over-zero.
fn sym_parts(k: &[f64; 3], q: &[f64; 3], kappa: f64) -> (f64, [f64; 3]) {
    let a = 0.5 * kappa * norm3(k);
    let b = 0.5 * kappa * norm3(q);
    let (ca, cb) = (a.cos(), b.cos());
    let (sa, sb) = (sinc(a), sinc(b));
    let scalar = ca * cb - dot3(k, q) * 0.25 * kappa * kappa * sa * sb;
    let cross = cross3(k, q);
    let mut reduced = [0.0; 3];
    for c in 0..3 {
        reduced[c] = k[c] * sa * cb + q[c] * ca * sb - cross[c] * 0.5 * kappa * sa * sb;
    }
    (scalar, reduced)
}

/// Solve the composed-rotation relations for the product law of the
/// symmetric grid: `|D|` from the arccos of the scalar part, direction from
/// the vector part.  Errors when the scalar part leaves `[-1, 1]` or the
/// composed rotation sits at angle `pi`, where the direction is lost.
pub fn sym_d(k: &[f64], q: &[f64], kappa: f64) -> Result<[f64; 3], NumericError> {
    let (scalar, reduced) = sym_parts(&to3(k)?, &to3(q)?, kappa);
    if scalar.abs() > 1.0 + 1e-12 {
        return Err(NumericError::Branch {
            what: "cos of the composed half-angle",
            value: scalar,
        });
    }
    let half_angle = scalar.clamp(-1.0, 1.0).acos();
    let spread = sinc(half_angle);
    if spread.abs() < 1e-6 {
        return Err(NumericError::Branch {
            what: "sinc of the composed half-angle",
            value: spread,
        });
    }
    let mut out = [0.0; 3];
    for c in 0..3 {
        out[c] = reduced[c] / spread;
    }
    Ok(out)
}

/// Catalogue selector mirroring the command-line surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Su2Form {
    FlP,
    FlDPaper,
    FlDSymmetricVariant,
    SymD,
}

/// Evaluate one catalogue entry.  `mu` only matters for [`Su2Form::FlP`];
/// the product laws are `mu`-free.
pub fn su2_closed_form(
    form: Su2Form,
    k: &[f64],
    q: &[f64],
    kappa: f64,
    mu: f64,
) -> Result<Vec<f64>, NumericError> {
    let out = match form {
        Su2Form::FlP => fl_p(k, q, kappa, mu)?,
        Su2Form::FlDPaper => fl_d_paper(k, q, kappa)?,
        Su2Form::FlDSymmetricVariant => fl_d_symmetric_variant(k, q, kappa)?,
        Su2Form::SymD => sym_d(k, q, kappa)?,
    };
    Ok(out.to_vec())
}

// ---- exact jets ---------------------------------------------------------

/// `sum of squares` over one block of the doubled ring.
fn block_norm_sq(order: usize, base: usize) -> Result<TruncatedSeries, NumericError> {
    let mut acc = TruncatedSeries::zero(6, order);
    for i in 0..3 {
        let mut e = vec![0u32; 6];
        e[base + i] = 2;
        acc = acc.add(&TruncatedSeries::monomial(
            6,
            order,
            MultiIndex::new(e),
            GaussRational::one(),
        )?)?;
    }
    Ok(acc)
}

/// `sqrt(1 - kappa^2 * (sum of squares of one block))` as an exact jet.
fn root_series(
    kappa: &GaussRational,
    order: usize,
    base: usize,
) -> Result<TruncatedSeries, NumericError> {
    let neg_kappa_sq = -&(kappa * kappa);
    let arg = TruncatedSeries::one(6, order).add(&block_norm_sq(order, base)?.scale(&neg_kappa_sq))?;
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    Ok(AnalyticFn::PowRational(half).apply(&arg)?)
}

/// `kappa^2 * (sum of squares of the k block)`, the argument the sqrt-trig
/// jets expect.
fn angle_sq_series(kappa: &GaussRational, order: usize) -> Result<TruncatedSeries, NumericError> {
    let kappa_sq = kappa * kappa;
    Ok(block_norm_sq(order, 0)?.scale(&kappa_sq))
}

fn var6(order: usize, slot: usize) -> Result<TruncatedSeries, NumericError> {
    Ok(TruncatedSeries::var(6, order, slot)?)
}

/// Cross-product component `(k x q)_c` as a jet in the doubled ring.
fn cross_series(order: usize, c: usize) -> Result<TruncatedSeries, NumericError> {
    let a = (c + 1) % 3;
    let b = (c + 2) % 3;
    let mut plus = vec![0u32; 6];
    plus[a] = 1;
    plus[3 + b] = 1;
    let mut minus = vec![0u32; 6];
    minus[b] = 1;
    minus[3 + a] = 1;
    let p = TruncatedSeries::monomial(6, order, MultiIndex::new(plus), GaussRational::one())?;
    let m = TruncatedSeries::monomial(6, order, MultiIndex::new(minus), GaussRational::one())?;
    Ok(p.sub(&m)?)
}

/// Exact jet of [`fl_p`] at `mu = 1` in the `[k | q]` ring:
/// `k sqrt(1-kappa^2 q^2) sinc(kappa|k|) + q cos(kappa|k|)
///  - kappa (k x q) sinc(kappa|k|)`, with the trig factors as entire series
/// in `kappa^2 k^2`.
pub fn fl_p_jet(kappa: &GaussRational, order: usize) -> Result<SeriesVector, NumericError> {
    let w = angle_sq_series(kappa, order)?;
    let spread = sinc_sqrt(&w)?;
    let cos = cos_sqrt(&w)?;
    let root_q = root_series(kappa, order, 3)?;
    let f1 = root_q.mul(&spread)?;
    let mut components = Vec::with_capacity(3);
    for c in 0..3 {
        let straight = var6(order, c)?.mul(&f1)?;
        let turned = var6(order, 3 + c)?.mul(&cos)?;
        let swept = cross_series(order, c)?.mul(&spread)?.scale(kappa);
        components.push(straight.add(&turned)?.sub(&swept)?);
    }
    Ok(SeriesVector::new(components)?)
}

/// Exact jet of [`fl_d_paper`].
pub fn fl_d_paper_jet(kappa: &GaussRational, order: usize) -> Result<SeriesVector, NumericError> {
    let root_k = root_series(kappa, order, 0)?;
    let mut components = Vec::with_capacity(3);
    for c in 0..3 {
        let linear = var6(order, c)?.add(&var6(order, 3 + c)?)?.mul(&root_k)?;
        let swept = cross_series(order, c)?.scale(kappa);
        components.push(linear.sub(&swept)?);
    }
    Ok(SeriesVector::new(components)?)
}

/// Exact jet of [`fl_d_symmetric_variant`].
pub fn fl_d_symmetric_variant_jet(
    kappa: &GaussRational,
    order: usize,
) -> Result<SeriesVector, NumericError> {
    let root_k = root_series(kappa, order, 0)?;
    let root_q = root_series(kappa, order, 3)?;
    let mut components = Vec::with_capacity(3);
    for c in 0..3 {
        let first = var6(order, c)?.mul(&root_q)?;
        let second = var6(order, 3 + c)?.mul(&root_k)?;
        let swept = cross_series(order, c)?.scale(kappa);
        components.push(first.add(&second)?.sub(&swept)?);
    }
    Ok(SeriesVector::new(components)?)
}

/// Which closed-form product law, if either, the exact series engine backs.
#[derive(Clone, Copy, Debug)]
pub struct FlDAdjudication {
    pub paper_matches: bool,
    pub variant_matches: bool,
    pub order: usize,
}

impl FlDAdjudication {
    /// The single matching form's name, or `None` when the comparison is
    /// not decisive.
    pub fn winner_name(&self) -> Option<&'static str> {
        match (self.paper_matches, self.variant_matches) {
            (true, false) => Some("fl_D_paper"),
            (false, true) => Some("fl_D_symmetric_variant"),
            _ => None,
        }
    }
}

/// Compare the engine's product law for a three-dimensional realization
/// against both closed-form candidates, coefficient by coefficient through
/// `order`.
pub fn adjudicate_fl_d(r: &Realization, order: usize) -> Result<FlDAdjudication, NumericError> {
    if r.n() != 3 {
        return Err(NumericError::Dimension {
            expected: 3,
            got: r.n(),
        });
    }
    let d = d_series(r, order)?;
    let paper = fl_d_paper_jet(r.kappa(), order)?;
    let variant = fl_d_symmetric_variant_jet(r.kappa(), order)?;
    let matches = |jet: &SeriesVector| {
        (0..3).all(|c| d.component(c) == &jet.components()[c])
    };
    Ok(FlDAdjudication {
        paper_matches: matches(&paper),
        variant_matches: matches(&variant),
        order,
    })
}

/// Evaluate the components of an exact jet at a real sample.
pub(crate) fn eval_vector(
    jet: &SeriesVector,
    point: &[f64],
) -> Result<Vec<f64>, NumericError> {
    let z: Vec<Complex64> = point.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut out = Vec::with_capacity(jet.len());
    for c in jet.components() {
        out.push(c.eval_complex(&z)?.re);
    }
    Ok(out)
}
