//! Complex numbers over multiple doubles, and the component-planar vector
//! layout the compute kernels read from.

use thiserror::Error;

use crate::md::MultiDouble;


#[derive(Clone, Copy, Debug, PartialEq, Error)]
pub enum PlanarError {
    #[error("index {index} out of range for planar vector of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
}

/// A complex multiple double; both parts share one precision and are kept
/// renormalized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Complex<T: MultiDouble> {
    pub re: T,
    pub im: T,
}

impl<T: MultiDouble> Complex<T> {
    pub fn new(re: T, im: T) -> Self {
        Complex { re, im }
    }

    pub fn zero() -> Self {
        Complex { re: T::zero(), im: T::zero() }
    }

    pub fn one() -> Self {
        Complex { re: T::one(), im: T::zero() }
    }

    pub fn from_f64(re: f64, im: f64) -> Self {
        Complex { re: T::from_f64(re), im: T::from_f64(im) }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(self, rhs: Self) -> Self {
        Complex { re: self.re.add(rhs.re), im: self.im.add(rhs.im) }
    }

    pub fn sub(self, rhs: Self) -> Self {
        Complex { re: self.re.sub(rhs.re), im: self.im.sub(rhs.im) }
    }

    pub fn neg(self) -> Self {
        Complex { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn conj(self) -> Self {
        Complex { re: self.re, im: self.im.neg() }
    }

    /// The 4M product: four real multiplications, one subtraction, one
    /// addition. This is the only complex product the crate uses.
    pub fn mul(self, rhs: Self) -> Self {
        let rr = self.re.mul(rhs.re);
        let ii = self.im.mul(rhs.im);
        let ri = self.re.mul(rhs.im);
        let ir = self.im.mul(rhs.re);
        Complex { re: rr.sub(ii), im: ri.add(ir) }
    }

    /// Scale by a real factor.
    pub fn scale(self, factor: T) -> Self {
        Complex { re: self.re.mul(factor), im: self.im.mul(factor) }
    }

    /// |re| + |im|, the 1-norm surrogate for the modulus used throughout the
    /// norms (no square root in hot paths).
    pub fn norm_one(self) -> T {
        self.re.abs().add(self.im.abs())
    }

    /// Squared modulus re^2 + im^2.
    pub fn modulus_sq(self) -> T {
        self.re.mul(self.re).add(self.im.mul(self.im))
    }

    /// True modulus; costs a multiple-double square root.
    pub fn modulus(self) -> T {
        self.modulus_sq().sqrt()
    }

    /// self / rhs via the conjugate, 4M product and two real divisions.
    pub fn div(self, rhs: Self) -> Self {
        let den = rhs.modulus_sq();
        let num = self.mul(rhs.conj());
        Complex { re: num.re.div(den), im: num.im.div(den) }
    }
}

pub fn cmul_4m<T: MultiDouble>(x: Complex<T>, y: Complex<T>) -> Complex<T> {
    x.mul(y)
}

/// An n-vector of K-limb complex values stored as 2K planes of n doubles:
/// plane j < K holds limb j of every real part, plane K + j holds limb j of
/// every imaginary part.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarVec<T: MultiDouble> {
    len: usize,
    data: Vec<f64>,
    _marker: std::marker::PhantomData<T>,
}

impl<T: MultiDouble> PlanarVec<T> {
    pub fn zeros(len: usize) -> Self {
        PlanarVec {
            len,
            data: vec![0.0; 2 * T::LIMBS * len],
            _marker: std::marker::PhantomData,
        }
    }

    pub fn from_entries(entries: &[Complex<T>]) -> Self {
        let mut v = Self::zeros(entries.len());
        for (i, z) in entries.iter().enumerate() {
            v.set(i, *z);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn planes(&self) -> usize {
        2 * T::LIMBS
    }

    pub fn plane(&self, j: usize) -> &[f64] {
        &self.data[j * self.len..(j + 1) * self.len]
    }

    /// Reassemble entry `i` from the planes.
    pub fn get(&self, i: usize) -> Complex<T> {
        assert!(i < self.len, "planar index {i} out of range {}", self.len);
        let k = T::LIMBS;
        let mut re = vec![0.0; k];
        let mut im = vec![0.0; k];
        for j in 0..k {
            re[j] = self.data[j * self.len + i];
            im[j] = self.data[(k + j) * self.len + i];
        }
        Complex { re: T::from_limbs(&re), im: T::from_limbs(&im) }
    }

    /// Spread entry `i` across the planes.
    pub fn set(&mut self, i: usize, z: Complex<T>) {
        assert!(i < self.len, "planar index {i} out of range {}", self.len);
        let k = T::LIMBS;
        for j in 0..k {
            self.data[j * self.len + i] = z.re.limbs()[j];
            self.data[(k + j) * self.len + i] = z.im.limbs()[j];
        }
    }

    pub fn checked_get(&self, i: usize) -> Result<Complex<T>, PlanarError> {
        if i < self.len {
            Ok(self.get(i))
        } else {
            Err(PlanarError::IndexOutOfRange { index: i, len: self.len })
        }
    }

    pub fn checked_set(&mut self, i: usize, z: Complex<T>) -> Result<(), PlanarError> {
        if i < self.len {
            self.set(i, z);
            Ok(())
        } else {
            Err(PlanarError::IndexOutOfRange { index: i, len: self.len })
        }
    }

    pub fn to_entries(&self) -> Vec<Complex<T>> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = Complex<T>> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::{random_md, Dyadic};
    use crate::md::{Dd, MultiDouble, Od, Qd};
    use crate::tally;
    use rand::SeedableRng;

    #[test]
    fn multiplicative_identities() {
        let z = Complex::<Dd>::from_f64(3.0, -4.0);
        assert_eq!(Complex::<Dd>::one().mul(z), z);
        let i = Complex::<Dd>::from_f64(0.0, 1.0);
        let m1 = i.mul(i);
        assert_eq!(m1.re.to_f64(), -1.0);
        assert!(m1.im.is_zero());
    }

    #[test]
    fn cmul_cost_is_four_muls_two_adds() {
        let costs = crate::md::costs::recorded(crate::md::Precision::Dd);
        let expect = 4 * costs.mul.total() + 2 * costs.add.total();
        let x = Complex::<Dd>::from_f64(1.25, -0.5);
        let y = Complex::<Dd>::from_f64(0.75, 2.0);
        let before = tally::local_snapshot();
        let _ = x.mul(y);
        let delta = tally::local_snapshot().since(&before);
        assert_eq!(delta.total(), expect);
    }

    #[test]
    fn four_m_matches_dyadic_oracle() {
        // Exact complex product re = ac - bd, im = ad + bc over dyadics.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let x = Complex::<Qd>::new(random_md(&mut rng), random_md(&mut rng));
            let y = Complex::<Qd>::new(random_md(&mut rng), random_md(&mut rng));
            let p = x.mul(y);
            let (a, b) = (Dyadic::from_md(&x.re), Dyadic::from_md(&x.im));
            let (c, d) = (Dyadic::from_md(&y.re), Dyadic::from_md(&y.im));
            let re = a.mul(&c).sub(&b.mul(&d));
            let im = a.mul(&d).add(&b.mul(&c));
            let tol = 8.0 * Qd::eps();
            if !re.is_zero() {
                assert!(Dyadic::from_md(&p.re).within_rel(&re, tol));
            }
            if !im.is_zero() {
                assert!(Dyadic::from_md(&p.im).within_rel(&im, tol));
            }
        }
    }

    #[test]
    fn planar_layout_counts() {
        let v = PlanarVec::<Dd>::zeros(3);
        assert_eq!(v.planes(), 4);
        assert_eq!(v.plane(0).len(), 3);
        assert!(v.get(0).is_zero());
    }

    #[test]
    fn planar_roundtrip_is_identity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let mut v = PlanarVec::<Od>::zeros(5);
        let mut entries = Vec::new();
        for i in 0..5 {
            let z = Complex::<Od>::new(random_md(&mut rng), random_md(&mut rng));
            v.set(i, z);
            entries.push(z);
        }
        for i in 0..5 {
            assert_eq!(v.get(i), entries[i]);
        }
        let w = PlanarVec::from_entries(&entries);
        assert_eq!(v, w);
    }

    #[test]
    fn planar_bounds_are_checked() {
        let mut v = PlanarVec::<Dd>::zeros(2);
        assert_eq!(
            v.checked_get(2),
            Err(PlanarError::IndexOutOfRange { index: 2, len: 2 })
        );
        assert!(v.checked_set(1, Complex::one()).is_ok());
    }

    #[test]
    fn complex_division_inverts_multiplication() {
        let x = Complex::<Qd>::from_f64(0.3, 0.4);
        let y = Complex::<Qd>::from_f64(-1.7, 0.2);
        let q = x.mul(y).div(y);
        let err = q.sub(x).norm_one().to_f64().abs();
        assert!(err <= 64.0 * Qd::eps());
    }
}
