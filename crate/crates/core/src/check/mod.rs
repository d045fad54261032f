//! Built-in verification oracles.
//!
//! These routes are deliberately independent of the multiple-double
//! arithmetic they check: exact dyadic rationals over big integers for the
//! scalar operations, dense complex Gaussian elimination for the linear
//! algebra, direct truncated-polynomial expansion for the differentiation,
//! and the exponential product law for the convolutions. The CLI `verify`
//! subcommand runs all four suites; the test suites reuse them.

use num_bigint::BigInt;
use num_bigint::Sign;
use rand::Rng;

use crate::md::MultiDouble;

/// An exact dyadic rational m * 2^e.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    m: BigInt,
    e: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { m: BigInt::from(0), e: 0 }
    }

    /// Exact decomposition of a finite double.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "dyadic oracle only covers finite values");
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let exp_field = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if exp_field == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_field - 1075)
        };
        let mut m = BigInt::from(mant);
        if x.is_sign_negative() {
            m = -m;
        }
        Dyadic { m, e: exp }.normalized()
    }

    /// Exact value of a multiple double: the sum of its limbs.
    pub fn from_limbs(limbs: &[f64]) -> Self {
        limbs.iter().fold(Self::zero(), |acc, &l| acc.add(&Self::from_f64(l)))
    }

    pub fn from_md<T: MultiDouble>(v: &T) -> Self {
        Self::from_limbs(v.limbs())
    }

    fn normalized(mut self) -> Self {
        if self.m.sign() == Sign::NoSign {
            return Self::zero();
        }
        let tz = self.m.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.m >>= tz;
            self.e += tz as i64;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.m.sign() == Sign::NoSign
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.e.min(other.e);
        let m = (&self.m << (self.e - e) as u64) + (&other.m << (other.e - e) as u64);
        Dyadic { m, e }.normalized()
    }

    pub fn neg(&self) -> Self {
        Dyadic { m: -&self.m, e: self.e }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Dyadic { m: &self.m * &other.m, e: self.e + other.e }.normalized()
    }

    pub fn abs(&self) -> Self {
        if self.m.sign() == Sign::Minus {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn is_negative(&self) -> bool {
        self.m.sign() == Sign::Minus
    }

    /// self <= other, exactly.
    pub fn le(&self, other: &Self) -> bool {
        !other.sub(self).is_negative()
    }

    /// |self - other| <= tol * |other|, exactly.
    pub fn within_rel(&self, other: &Self, tol: f64) -> bool {
        let err = self.sub(other).abs();
        let bound = Self::from_f64(tol).mul(&other.abs());
        err.le(&bound)
    }

    /// Truncated division self/other with at least `frac_bits` significant
    /// bits, rounded toward zero.
    pub fn div_approx(&self, other: &Self, frac_bits: u64) -> Self {
        assert!(!other.is_zero());
        if self.is_zero() {
            return Self::zero();
        }
        let shift = frac_bits + other.m.bits() + 2;
        let m = (&self.m << shift) / &other.m;
        Dyadic { m, e: self.e - other.e - shift as i64 }.normalized()
    }

    /// Square root with at least `frac_bits` significant bits (self >= 0).
    pub fn sqrt_approx(&self, frac_bits: u64) -> Self {
        assert!(!self.is_negative());
        if self.is_zero() {
            return Self::zero();
        }
        let mut m = self.m.clone();
        let mut e = self.e;
        // Push enough bits into the mantissa and make the exponent even.
        let want_bits = 2 * frac_bits + 4;
        let mut shift = want_bits.saturating_sub(m.bits());
        if (e - shift as i64) % 2 != 0 {
            shift += 1;
        }
        m <<= shift;
        e -= shift as i64;
        let root = m.sqrt();
        Dyadic { m: root, e: e / 2 }.normalized()
    }

    /// Lossy rendering for diagnostics only.
    pub fn to_f64_lossy(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.m.bits() as i64;
        // Keep the top 64 bits and track the dropped scale.
        let drop = (bits - 64).max(0);
        let top: BigInt = &self.m >> drop as u64;
        let top: f64 = top.to_string().parse().unwrap_or(f64::NAN);
        top * (2.0f64).powi((self.e + drop).clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }
}

/// Draw a random nonzero multiple double with limbs spanning the full width
/// of the format, renormalized. Every hardware double is a dyadic rational,
/// so these inputs are exact oracle inputs.
pub fn random_md<T: MultiDouble, R: Rng>(rng: &mut R) -> T {
    let mut limbs = vec![0.0; T::LIMBS];
    let lead_exp: i32 = rng.gen_range(-30..30);
    let mut scale = (2.0f64).powi(lead_exp);
    for limb in limbs.iter_mut() {
        let mag: f64 = rng.gen_range(1.0..2.0);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        *limb = sign * mag * scale;
        // Next limb sits 53 bits (give or take jitter) below this one.
        scale *= (2.0f64).powi(-(rng.gen_range(53..60)));
        if scale == 0.0 {
            break;
        }
    }
    T::renormalize(&limbs)
}

// Complex arithmetic on (re, im) tuples: the dense oracle deliberately
// avoids the crate's own complex type and kernels.
fn cadd(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 + b.0, a.1 + b.1)
}
fn csub(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 - b.0, a.1 - b.1)
}
fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}
fn cdiv(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let den = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / den, (a.1 * b.0 - a.0 * b.1) / den)
}
fn cabs(a: (f64, f64)) -> f64 {
    a.0.hypot(a.1)
}

/// Dense complex linear solve by Gaussian elimination with partial pivoting,
/// over plain doubles. Row-major n-by-n matrix.
pub fn dense_solve(a: &[(f64, f64)], b: &[(f64, f64)], n: usize) -> Vec<(f64, f64)> {
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len(), n);
    let mut m: Vec<(f64, f64)> = a.to_vec();
    let mut rhs = b.to_vec();
    for k in 0..n {
        let pivot_row = (k..n)
            .max_by(|&p, &q| {
                cabs(m[p * n + k])
                    .partial_cmp(&cabs(m[q * n + k]))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if pivot_row != k {
            for j in 0..n {
                m.swap(k * n + j, pivot_row * n + j);
            }
            rhs.swap(k, pivot_row);
        }
        let pivot = m[k * n + k];
        assert!(cabs(pivot) > 0.0, "oracle matrix is singular");
        for i in k + 1..n {
            let factor = cdiv(m[i * n + k], pivot);
            m[i * n + k] = (0.0, 0.0);
            for j in k + 1..n {
                m[i * n + j] = csub(m[i * n + j], cmul(factor, m[k * n + j]));
            }
            rhs[i] = csub(rhs[i], cmul(factor, rhs[k]));
        }
    }
    let mut x = vec![(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for j in i + 1..n {
            acc = csub(acc, cmul(m[i * n + j], x[j]));
        }
        x[i] = cdiv(acc, m[i * n + i]);
    }
    x
}

/// Assemble the full (n d)-square block lower-triangular Toeplitz system from
/// the coefficient matrices and solve it densely: block (ki, kj), ki >= kj,
/// is A_(ki - kj).
pub fn dense_block_toeplitz_solve(
    a_coeffs: &[Vec<(f64, f64)>],
    b_coeffs: &[Vec<(f64, f64)>],
    n: usize,
) -> Vec<(f64, f64)> {
    let d = a_coeffs.len();
    assert_eq!(b_coeffs.len(), d);
    let big = n * d;
    let mut m = vec![(0.0, 0.0); big * big];
    let mut b = vec![(0.0, 0.0); big];
    for ki in 0..d {
        for kj in 0..=ki {
            let block = &a_coeffs[ki - kj];
            for i in 0..n {
                for j in 0..n {
                    m[(ki * n + i) * big + (kj * n + j)] = block[i * n + j];
                }
            }
        }
        for i in 0..n {
            b[ki * n + i] = b_coeffs[ki][i];
        }
    }
    dense_solve(&m, &b, big)
}

/// Multiply two coefficient lists of truncated series over plain complex
/// doubles: the direct Cauchy product, no padding machinery.
pub fn naive_series_product(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let d = a.len().min(b.len());
    let mut out = vec![(0.0, 0.0); d];
    for k in 0..d {
        for j in 0..=k {
            out[k] = cadd(out[k], cmul(a[j], b[k - j]));
        }
    }
    out
}

/// Outcome of one verification suite.
#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub detail: String,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Exact-arithmetic conformance: random dyadic pairs, addition and
/// multiplication against the dyadic oracle, within 4 eps relative error.
pub fn dyadic_suite(samples_per_op: usize, seed: u64) -> SuiteOutcome {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut cases = 0;
    let mut failures = 0;
    let mut detail = String::new();

    fn run_precision<T: MultiDouble, R: Rng>(
        rng: &mut R,
        samples: usize,
        cases: &mut usize,
        failures: &mut usize,
        detail: &mut String,
    ) {
        let tol = 4.0 * T::eps();
        for i in 0..samples {
            let a: T = random_md(rng);
            let b: T = random_md(rng);
            let (da, db) = (Dyadic::from_md(&a), Dyadic::from_md(&b));

            let sum = Dyadic::from_md(&a.add(b));
            let exact_sum = da.add(&db);
            *cases += 1;
            if !(exact_sum.is_zero() && sum.is_zero()) && !sum.within_rel(&exact_sum, tol) {
                *failures += 1;
                if detail.len() < 400 {
                    detail.push_str(&format!("{} add case {} off\n", T::PRECISION, i));
                }
            }

            let prod = Dyadic::from_md(&a.mul(b));
            let exact_prod = da.mul(&db);
            *cases += 1;
            if !(exact_prod.is_zero() && prod.is_zero()) && !prod.within_rel(&exact_prod, tol) {
                *failures += 1;
                if detail.len() < 400 {
                    detail.push_str(&format!("{} mul case {} off\n", T::PRECISION, i));
                }
            }
        }
    }

    run_precision::<crate::md::Dd, _>(&mut rng, samples_per_op, &mut cases, &mut failures, &mut detail);
    run_precision::<crate::md::Qd, _>(&mut rng, samples_per_op, &mut cases, &mut failures, &mut detail);
    run_precision::<crate::md::Od, _>(&mut rng, samples_per_op, &mut cases, &mut failures, &mut detail);

    SuiteOutcome { name: "dyadic-arithmetic", cases, failures, detail }
}

mod suites;

pub use suites::{dense_toeplitz_suite, exp_product_suite, gradient_suite, run_all};
