//! Real multiple-double arithmetic: values represented as unevaluated sums of
//! 1, 2, 4 or 8 nonoverlapping hardware doubles, with exact per-call operation
//! counting.
//!
//! Each precision level has a dedicated arithmetic implementation with a fixed
//! instruction sequence, so the cost of every operation is an
//! input-independent constant. The recorded constants are available through
//! [`costs`].

pub mod eft;
mod expansion;

mod dd;
mod wide;

pub mod costs;

use std::fmt;

use thiserror::Error;

use crate::tally::Ops;

/// Supported precision levels, named by limb count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub enum Precision {
    /// Plain hardware double (1 limb).
    D,
    /// Double double (2 limbs).
    Dd,
    /// Quad double (4 limbs).
    Qd,
    /// Octo double (8 limbs).
    Od,
}

impl Precision {
    pub const ALL: [Precision; 4] = [Precision::D, Precision::Dd, Precision::Qd, Precision::Od];

    pub const fn limbs(self) -> usize {
        match self {
            Precision::D => 1,
            Precision::Dd => 2,
            Precision::Qd => 4,
            Precision::Od => 8,
        }
    }

    /// Unit roundoff of the format.
    pub const fn eps(self) -> f64 {
        match self {
            Precision::D => 2.2e-16,
            Precision::Dd => 4.9e-32,
            Precision::Qd => 6.1e-64,
            Precision::Od => 4.6e-128,
        }
    }

    pub const fn from_limbs(limbs: usize) -> Option<Precision> {
        match limbs {
            1 => Some(Precision::D),
            2 => Some(Precision::Dd),
            4 => Some(Precision::Qd),
            8 => Some(Precision::Od),
            _ => None,
        }
    }

    pub const fn label(self) -> &'static str {
        match self {
            Precision::D => "d",
            Precision::Dd => "dd",
            Precision::Qd => "qd",
            Precision::Od => "od",
        }
    }

    pub fn from_label(s: &str) -> Option<Precision> {
        match s {
            "d" => Some(Precision::D),
            "dd" => Some(Precision::Dd),
            "qd" => Some(Precision::Qd),
            "od" => Some(Precision::Od),
            _ => None,
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
pub enum MdError {
    #[error("division by zero multiple double")]
    DivisionByZero,
    #[error("square root of negative operand")]
    NegativeOperand,
}

/// A multiple-double value with `K` limbs ordered most significant first.
///
/// Values produced by the public operations are always renormalized:
/// consecutive limbs a, b with b != 0 satisfy |b| <= ulp(a)/2, so limb
/// comparison, equality and ordering coincide with the represented value.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Md<const K: usize> {
    limbs: [f64; K],
}

/// Plain double, as the 1-limb degenerate case.
pub type D1 = Md<1>;
/// Double double.
pub type Dd = Md<2>;
/// Quad double.
pub type Qd = Md<4>;
/// Octo double.
pub type Od = Md<8>;

impl<const K: usize> Md<K> {
    pub fn limb(&self, i: usize) -> f64 {
        self.limbs[i]
    }

    fn zero_raw() -> Self {
        Md { limbs: [0.0; K] }
    }

    fn from_f64_raw(v: f64) -> Self {
        let mut limbs = [0.0; K];
        limbs[0] = v;
        Md { limbs }
    }

    fn neg_raw(self) -> Self {
        Md { limbs: self.limbs.map(|l| -l) }
    }

    fn copy_from(limbs: &[f64]) -> Self {
        debug_assert_eq!(limbs.len(), K);
        let mut out = [0.0; K];
        out.copy_from_slice(limbs);
        Md { limbs: out }
    }
}

impl<const K: usize> fmt::Display for Md<K>
where
    Md<K>: MultiDouble,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

/// The scalar interface every precision level implements.
pub trait MultiDouble:
    Copy + Clone + fmt::Debug + PartialEq + PartialOrd + Send + Sync + 'static
{
    const LIMBS: usize;
    const PRECISION: Precision;

    fn from_limbs(limbs: &[f64]) -> Self;
    fn limbs(&self) -> &[f64];

    /// Rebuild the nonoverlap invariant from an arbitrary finite sequence of
    /// doubles whose exact sum is the intended value.
    fn renormalize(raw: &[f64]) -> Self;

    fn add(self, rhs: Self) -> Self;
    fn mul(self, rhs: Self) -> Self;

    /// Limb-wise scaling by a power of two (exact).
    fn scale_pow2(self, factor: f64) -> Self;

    fn zero() -> Self;

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn from_f64(v: f64) -> Self;

    fn neg(self) -> Self;

    /// Closest hardware double: the limbs summed from least significant up.
    fn to_f64(&self) -> f64 {
        self.limbs().iter().rev().sum()
    }

    fn eps() -> f64 {
        Self::PRECISION.eps()
    }

    fn sub(self, rhs: Self) -> Self {
        self.add(rhs.neg())
    }

    fn abs(self) -> Self {
        if self.is_sign_negative() {
            self.neg()
        } else {
            self
        }
    }

    fn is_zero(&self) -> bool {
        self.limbs().iter().all(|&l| l == 0.0)
    }

    fn is_sign_negative(&self) -> bool {
        self.limbs()[0] < 0.0
    }

    /// Newton refinement steps used by division and square root; each step
    /// doubles the number of correct limbs.
    fn refine_steps() -> usize {
        match Self::LIMBS {
            1 => 0,
            2 => 2,
            4 => 3,
            _ => 4,
        }
    }

    /// Unchecked division by reciprocal Newton refinement. A zero divisor
    /// follows hardware semantics and floods the result with infinities.
    fn div(self, rhs: Self) -> Self {
        let mut ops = Ops::default();
        let seed = 1.0 / rhs.limbs()[0];
        ops.tally(0, 0, 0, 1);
        ops.commit();

        let one = Self::one();
        let mut x = Self::from_f64(seed);
        for _ in 0..Self::refine_steps() {
            let r = one.sub(rhs.mul(x));
            x = x.add(x.mul(r));
        }
        let q = self.mul(x);
        let r = self.sub(rhs.mul(q));
        q.add(x.mul(r))
    }

    /// Unchecked square root; requires a nonnegative operand. The single
    /// hardware square root seeding the iteration is not charged.
    fn sqrt(self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let seed = 1.0 / self.limbs()[0].sqrt();
        let mut ops = Ops::default();
        ops.tally(0, 0, 0, 1);
        ops.commit();

        let one = Self::one();
        let mut x = Self::from_f64(seed);
        for _ in 0..Self::refine_steps() {
            let r = one.sub(self.mul(x).mul(x));
            x = x.add(x.mul(r).scale_pow2(0.5));
        }
        let s = self.mul(x);
        let r = self.sub(s.mul(s));
        s.add(r.mul(x.scale_pow2(0.5)))
    }

    /// Division with the zero-divisor error surfaced.
    fn checked_div(self, rhs: Self) -> Result<Self, MdError> {
        if rhs.is_zero() {
            Err(MdError::DivisionByZero)
        } else {
            Ok(self.div(rhs))
        }
    }

    /// Square root with the negative-operand error surfaced.
    fn checked_sqrt(self) -> Result<Self, MdError> {
        if self.is_sign_negative() {
            Err(MdError::NegativeOperand)
        } else {
            Ok(self.sqrt())
        }
    }
}

impl MultiDouble for Md<1> {
    const LIMBS: usize = 1;
    const PRECISION: Precision = Precision::D;

    fn from_limbs(limbs: &[f64]) -> Self {
        Md { limbs: [limbs[0]] }
    }

    fn limbs(&self) -> &[f64] {
        &self.limbs
    }

    fn zero() -> Self {
        Self::zero_raw()
    }

    fn from_f64(v: f64) -> Self {
        Self::from_f64_raw(v)
    }

    fn neg(self) -> Self {
        self.neg_raw()
    }

    fn renormalize(raw: &[f64]) -> Self {
        let mut ops = Ops::default();
        let mut s = raw[raw.len() - 1];
        for &v in raw[..raw.len() - 1].iter().rev() {
            s += v;
            ops.tally(1, 0, 0, 0);
        }
        ops.commit();
        Md { limbs: [s] }
    }

    fn add(self, rhs: Self) -> Self {
        let mut ops = Ops::default();
        ops.tally(1, 0, 0, 0);
        ops.commit();
        Md { limbs: [self.limbs[0] + rhs.limbs[0]] }
    }

    fn sub(self, rhs: Self) -> Self {
        let mut ops = Ops::default();
        ops.tally(0, 1, 0, 0);
        ops.commit();
        Md { limbs: [self.limbs[0] - rhs.limbs[0]] }
    }

    fn mul(self, rhs: Self) -> Self {
        let mut ops = Ops::default();
        ops.tally(0, 0, 1, 0);
        ops.commit();
        Md { limbs: [self.limbs[0] * rhs.limbs[0]] }
    }

    fn scale_pow2(self, factor: f64) -> Self {
        let mut ops = Ops::default();
        ops.tally(0, 0, 1, 0);
        ops.commit();
        Md { limbs: [self.limbs[0] * factor] }
    }

    fn div(self, rhs: Self) -> Self {
        let mut ops = Ops::default();
        ops.tally(0, 0, 0, 1);
        ops.commit();
        Md { limbs: [self.limbs[0] / rhs.limbs[0]] }
    }

    fn sqrt(self) -> Self {
        Md { limbs: [self.limbs[0].sqrt()] }
    }
}

impl<const K: usize> std::ops::Add for Md<K>
where
    Md<K>: MultiDouble,
{
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        MultiDouble::add(self, rhs)
    }
}

impl<const K: usize> std::ops::Sub for Md<K>
where
    Md<K>: MultiDouble,
{
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        MultiDouble::sub(self, rhs)
    }
}

impl<const K: usize> std::ops::Mul for Md<K>
where
    Md<K>: MultiDouble,
{
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        MultiDouble::mul(self, rhs)
    }
}

impl<const K: usize> std::ops::Neg for Md<K>
where
    Md<K>: MultiDouble,
{
    type Output = Self;
    fn neg(self) -> Self {
        MultiDouble::neg(self)
    }
}

/// Distance from |x| to the next representable double. Zero maps to zero, so
/// a nonzero limb following a zero limb always violates the invariant.
pub fn ulp(x: f64) -> f64 {
    let a = x.abs();
    if a == 0.0 {
        return 0.0;
    }
    if !a.is_finite() {
        return f64::NAN;
    }
    f64::from_bits(a.to_bits() + 1) - a
}

/// Check the nonoverlap invariant on a limb sequence (most significant
/// first): every nonzero limb is at most half an ulp of its predecessor.
pub fn is_normalized(limbs: &[f64]) -> bool {
    for pair in limbs.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b != 0.0 && b.abs() > ulp(a) / 2.0 {
            return false;
        }
    }
    true
}
