//! Truncated power series with complex multiple-double coefficients: padded
//! convolution, exponential generators, damping, norms and the ratio
//! estimator for the radius of convergence.

use thiserror::Error;

use crate::complex::{Complex, PlanarVec};
use crate::md::MultiDouble;
use crate::tally;

#[derive(Clone, Copy, Debug, PartialEq, Error)]
pub enum SeriesError {
    #[error("series orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("last coefficient is zero; ratio undefined")]
    LastCoefficientZero,
    #[error("ratio needs at least two coefficients, order is {0}")]
    OrderTooSmall(usize),
}

/// A scalar truncated power series of order d: coefficients of t^0 .. t^(d-1).
#[derive(Clone, Debug, PartialEq)]
pub struct Series<T: MultiDouble> {
    pub coeffs: Vec<Complex<T>>,
}

impl<T: MultiDouble> Series<T> {
    pub fn zero(order: usize) -> Self {
        Series { coeffs: vec![Complex::zero(); order] }
    }

    /// The constant series 1.
    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Complex::one();
        s
    }

    pub fn constant(z: Complex<T>, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = z;
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn truncated(&self, order: usize) -> Series<T> {
        Series { coeffs: self.coeffs[..order.min(self.coeffs.len())].to_vec() }
    }

    pub fn scale(&self, z: Complex<T>) -> Series<T> {
        Series { coeffs: self.coeffs.iter().map(|c| c.mul(z)).collect() }
    }

    pub fn add(&self, rhs: &Series<T>) -> Series<T> {
        debug_assert_eq!(self.order(), rhs.order());
        Series {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.add(*b))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Series<T>) -> Series<T> {
        debug_assert_eq!(self.order(), rhs.order());
        Series {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.sub(*b))
                .collect(),
        }
    }
}

/// Padded truncated product: coefficient k of the result is
/// sum over j < d of a_j * b_(k-j), where negative indices contribute zero.
///
/// The zero-index products are performed, not skipped: one convolution always
/// executes and counts exactly d^2 coefficient multiplications, keeping the
/// work (and the cost model) uniform across output coefficients.
pub fn convolve<T: MultiDouble>(a: &Series<T>, b: &Series<T>) -> Result<Series<T>, SeriesError> {
    let d = a.order();
    if d != b.order() {
        return Err(SeriesError::OrderMismatch(a.order(), b.order()));
    }
    let zero = Complex::zero();
    let mut out = Series::zero(d);
    for k in 0..d {
        let mut acc = Complex::zero();
        for j in 0..d {
            let rhs = if j > k { zero } else { b.coeffs[k - j] };
            acc = acc.add(a.coeffs[j].mul(rhs));
        }
        out.coeffs[k] = acc;
    }
    tally::count_conv_muls((d * d) as u64);
    Ok(out)
}

/// The truncated exponential series exp(alpha t): coefficient k is
/// alpha^k / k!, built by the recurrence c_k = c_(k-1) * alpha / k.
pub fn exp_series<T: MultiDouble>(alpha: Complex<T>, order: usize) -> Series<T> {
    assert!(order >= 1);
    let mut s = Series::zero(order);
    s.coeffs[0] = Complex::one();
    for k in 1..order {
        let prev = s.coeffs[k - 1].mul(alpha);
        let k_md = T::from_f64(k as f64);
        s.coeffs[k] = Complex::new(prev.re.div(k_md), prev.im.div(k_md));
    }
    s
}

/// Scale coefficient k by delta^k: the series in the damped parameter
/// delta * t.
pub fn damp<T: MultiDouble>(x: &Series<T>, delta: T) -> Series<T> {
    let mut out = x.clone();
    let mut factor = T::one();
    for k in 1..out.order() {
        factor = factor.mul(delta);
        out.coeffs[k] = out.coeffs[k].scale(factor);
    }
    out
}

/// A truncated power series of n-vector coefficients, each coefficient vector
/// stored planar.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesVec<T: MultiDouble> {
    dim: usize,
    coeffs: Vec<PlanarVec<T>>,
}

impl<T: MultiDouble> SeriesVec<T> {
    pub fn zeros(dim: usize, order: usize) -> Self {
        SeriesVec { dim, coeffs: vec![PlanarVec::zeros(dim); order] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, k: usize) -> &PlanarVec<T> {
        &self.coeffs[k]
    }

    pub fn coeff_mut(&mut self, k: usize) -> &mut PlanarVec<T> {
        &mut self.coeffs[k]
    }

    /// Entry (i) as a scalar series of the full order.
    pub fn component(&self, i: usize) -> Series<T> {
        Series { coeffs: self.coeffs.iter().map(|c| c.get(i)).collect() }
    }

    pub fn set_component(&mut self, i: usize, s: &Series<T>) {
        assert_eq!(s.order(), self.order());
        for (k, c) in s.coeffs.iter().enumerate() {
            self.coeffs[k].set(i, *c);
        }
    }

    pub fn from_components(components: &[Series<T>]) -> Self {
        let dim = components.len();
        let order = components[0].order();
        let mut v = Self::zeros(dim, order);
        for (i, s) in components.iter().enumerate() {
            v.set_component(i, s);
        }
        v
    }

    pub fn truncated(&self, order: usize) -> SeriesVec<T> {
        SeriesVec { dim: self.dim, coeffs: self.coeffs[..order.min(self.order())].to_vec() }
    }

    pub fn sub(&self, rhs: &SeriesVec<T>) -> SeriesVec<T> {
        debug_assert_eq!(self.dim, rhs.dim);
        debug_assert_eq!(self.order(), rhs.order());
        let mut out = SeriesVec::zeros(self.dim, self.order());
        for k in 0..self.order() {
            for i in 0..self.dim {
                out.coeffs[k].set(i, self.coeffs[k].get(i).sub(rhs.coeffs[k].get(i)));
            }
        }
        out
    }
}

/// Norm of one coefficient vector: the 1-norm with |re| + |im| per entry,
/// summed in a fixed ascending order.
pub fn coeff_norm<T: MultiDouble>(v: &PlanarVec<T>) -> T {
    let mut acc = T::zero();
    for i in 0..v.len() {
        acc = acc.add(v.get(i).norm_one());
    }
    acc
}

/// Max over k of the coefficient-vector 1-norms.
pub fn series_norm<T: MultiDouble>(b: &SeriesVec<T>) -> T {
    let mut best = T::zero();
    for k in 0..b.order() {
        let n = coeff_norm(b.coeff(k));
        if n > best {
            best = n;
        }
    }
    best
}

/// The ratio z = c_(d-2) / c_(d-1) of the last two coefficients and its
/// modulus: the numerical surrogate for the limit of c_d / c_(d+1), which
/// locates a singular point on the boundary of the disk of convergence.
pub fn fabry_ratio<T: MultiDouble>(x: &Series<T>) -> Result<(Complex<T>, T), SeriesError> {
    let d = x.order();
    if d < 2 {
        return Err(SeriesError::OrderTooSmall(d));
    }
    let last = x.coeffs[d - 1];
    if last.is_zero() {
        return Err(SeriesError::LastCoefficientZero);
    }
    let z = x.coeffs[d - 2].div(last);
    let radius = z.modulus();
    Ok((z, radius))
}

/// Diagnostic: the full ratio sequence c_k / c_(k+1), None where the
/// denominator vanishes.
pub fn fabry_sequence<T: MultiDouble>(x: &Series<T>) -> Vec<Option<(Complex<T>, T)>> {
    (0..x.order().saturating_sub(1))
        .map(|k| {
            let den = x.coeffs[k + 1];
            if den.is_zero() {
                None
            } else {
                let z = x.coeffs[k].div(den);
                Some((z, z.modulus()))
            }
        })
        .collect()
}
