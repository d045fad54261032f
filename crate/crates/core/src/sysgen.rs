//! Construction of the monomial test problems: 0/1 exponent matrices, one- and
//! two-column systems with exponential-series solutions, and the derived
//! right-hand sides that make those solutions exact.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::Complex;
use crate::md::{MultiDouble, Precision};
use crate::series::{convolve, damp, exp_series, Series, SeriesVec};

#[derive(Clone, Copy, Debug, PartialEq, Error)]
pub enum SysgenError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("exponent matrix row {0} has no variables")]
    EmptyRow(usize),
    #[error("exponent entries must be 0 or 1")]
    NonBinaryExponent,
}

/// An n-by-n matrix with entries in {0, 1}; row i lists the variables that
/// appear in monomial i.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentMatrix {
    rows: Vec<Vec<u8>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Lower,
    Upper,
}

impl ExponentMatrix {
    pub fn new(rows: Vec<Vec<u8>>) -> Result<Self, SysgenError> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(SysgenError::DimensionMismatch { expected: n, got: row.len() });
            }
            if row.iter().any(|&e| e > 1) {
                return Err(SysgenError::NonBinaryExponent);
            }
            if row.iter().all(|&e| e == 0) {
                return Err(SysgenError::EmptyRow(i));
            }
        }
        Ok(ExponentMatrix { rows })
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// Ascending indices of the variables participating in monomial i.
    pub fn row_vars(&self, i: usize) -> Vec<usize> {
        self.rows[i]
            .iter()
            .enumerate()
            .filter_map(|(j, &e)| (e == 1).then_some(j))
            .collect()
    }
}

/// The specific triangular matrices of ones: lower has row i covering
/// variables 0..=i, upper has row i covering variables 0..n-i.
pub fn triangular_ones(n: usize, orientation: Orientation) -> ExponentMatrix {
    assert!(n >= 1);
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match orientation {
                    Orientation::Lower => u8::from(j <= i),
                    Orientation::Upper => u8::from(j <= n - 1 - i),
                })
                .collect()
        })
        .collect();
    ExponentMatrix { rows }
}

/// How the solution coefficients alpha are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum AlphaMode {
    /// alpha in [-1, -1+delta] union [1-delta, 1].
    RealNearOne { delta: f64 },
    /// |alpha| = 1 with uniform random phase.
    UnitComplex,
}

/// Everything that determines the exact solution x_k(t) = exp(alpha_k t).
#[derive(Clone, Debug)]
pub struct SolutionSpec {
    pub dim: usize,
    pub order: usize,
    pub alpha_mode: AlphaMode,
    /// Damping factor for the series parameter, in (0, 1].
    pub damping: f64,
    pub seed: u64,
}

impl SolutionSpec {
    pub fn draw_alphas<T: MultiDouble>(&self, rng: &mut ChaCha8Rng) -> Vec<Complex<T>> {
        (0..self.dim)
            .map(|_| match self.alpha_mode {
                AlphaMode::RealNearOne { delta } => {
                    let u: f64 = rng.gen_range(0.0..=delta.abs().min(1.0));
                    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    Complex::from_f64(sign * (1.0 - u), 0.0)
                }
                AlphaMode::UnitComplex => {
                    let theta: f64 = rng.gen_range(0.0..1.0);
                    let (s, c) = (std::f64::consts::TAU * theta).sin_cos();
                    Complex::from_f64(c, s)
                }
            })
            .collect()
    }
}

/// One column of monomials: an exponent matrix and its coefficient vector.
#[derive(Clone, Debug)]
pub struct SystemColumn<T: MultiDouble> {
    pub exponents: ExponentMatrix,
    pub coeffs: Vec<Complex<T>>,
}

/// A monomial system with one or two columns and a series right-hand side.
#[derive(Clone, Debug)]
pub struct MonomialSystem<T: MultiDouble> {
    pub columns: Vec<SystemColumn<T>>,
    pub rhs: SeriesVec<T>,
}

impl<T: MultiDouble> MonomialSystem<T> {
    pub fn dim(&self) -> usize {
        self.rhs.dim()
    }

    pub fn order(&self) -> usize {
        self.rhs.order()
    }
}

/// Column layout for [`make_system`]. `None` coefficient vectors default to
/// ones for one column and to random unit-modulus values for two columns.
pub enum Columns<T: MultiDouble> {
    One { exponents: ExponentMatrix, coeffs: Option<Vec<Complex<T>>> },
    Two {
        e1: ExponentMatrix,
        e2: ExponentMatrix,
        c1: Option<Vec<Complex<T>>>,
        c2: Option<Vec<Complex<T>>>,
    },
}

impl<T: MultiDouble> Columns<T> {
    /// One column over the lower-triangular matrix of ones.
    pub fn one_lower(n: usize) -> Self {
        Columns::One { exponents: triangular_ones(n, Orientation::Lower), coeffs: None }
    }

    /// The lower/upper pair of triangular ones matrices.
    pub fn two_triangular(n: usize) -> Self {
        Columns::Two {
            e1: triangular_ones(n, Orientation::Lower),
            e2: triangular_ones(n, Orientation::Upper),
            c1: None,
            c2: None,
        }
    }
}

fn unit_coeffs<T: MultiDouble>(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex<T>> {
    (0..n)
        .map(|_| {
            let theta: f64 = rng.gen_range(0.0..1.0);
            let (s, c) = (std::f64::consts::TAU * theta).sin_cos();
            Complex::from_f64(c, s)
        })
        .collect()
}

/// Product of the exact component series selected by one exponent row.
fn row_product<T: MultiDouble>(exact: &[Series<T>], vars: &[usize]) -> Series<T> {
    let mut acc = exact[vars[0]].clone();
    for &v in &vars[1..] {
        acc = convolve(&acc, &exact[v]).expect("equal orders by construction");
    }
    acc
}

/// Build a monomial system whose exact solution is
/// x_k(t) = exp(alpha_k t), truncated at the spec order and damped: the
/// right-hand side is the system evaluated at that solution with the same
/// convolution arithmetic the solver uses.
pub fn make_system<T: MultiDouble>(
    spec: &SolutionSpec,
    columns: Columns<T>,
) -> Result<(MonomialSystem<T>, SeriesVec<T>), SysgenError> {
    let n = spec.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let alphas = spec.draw_alphas::<T>(&mut rng);

    let delta_t = T::from_f64(spec.damping);
    let exact: Vec<Series<T>> = alphas
        .iter()
        .map(|&a| damp(&exp_series(a, spec.order), delta_t))
        .collect();

    let check_dim = |m: &ExponentMatrix| -> Result<(), SysgenError> {
        if m.dim() != n {
            Err(SysgenError::DimensionMismatch { expected: n, got: m.dim() })
        } else {
            Ok(())
        }
    };
    let check_len = |c: &Vec<Complex<T>>| -> Result<(), SysgenError> {
        if c.len() != n {
            Err(SysgenError::DimensionMismatch { expected: n, got: c.len() })
        } else {
            Ok(())
        }
    };

    let cols: Vec<SystemColumn<T>> = match columns {
        Columns::One { exponents, coeffs } => {
            check_dim(&exponents)?;
            let coeffs = coeffs.unwrap_or_else(|| vec![Complex::one(); n]);
            check_len(&coeffs)?;
            vec![SystemColumn { exponents, coeffs }]
        }
        Columns::Two { e1, e2, c1, c2 } => {
            check_dim(&e1)?;
            check_dim(&e2)?;
            let c1 = c1.unwrap_or_else(|| unit_coeffs(n, &mut rng));
            let c2 = c2.unwrap_or_else(|| unit_coeffs(n, &mut rng));
            check_len(&c1)?;
            check_len(&c2)?;
            vec![
                SystemColumn { exponents: e1, coeffs: c1 },
                SystemColumn { exponents: e2, coeffs: c2 },
            ]
        }
    };

    let mut rhs = SeriesVec::zeros(n, spec.order);
    for i in 0..n {
        let mut b_i = Series::zero(spec.order);
        for col in &cols {
            let prod = row_product(&exact, &col.exponents.row_vars(i));
            b_i = b_i.add(&prod.scale(col.coeffs[i]));
        }
        rhs.set_component(i, &b_i);
    }

    Ok((MonomialSystem { columns: cols, rhs }, SeriesVec::from_components(&exact)))
}

/// The precision level whose accuracy covers series of order d, or None when
/// the order exceeds what eight limbs guarantee.
pub fn recommend_precision(d: usize) -> Option<Precision> {
    match d {
        0..=8 => Some(Precision::D),
        9..=24 => Some(Precision::Dd),
        25..=32 => Some(Precision::Qd),
        33..=64 => Some(Precision::Od),
        _ => None,
    }
}

/// A starting value for the iteration: the exact leading coefficient vector
/// perturbed by relative noise of magnitude sqrt(eps), all higher-order
/// coefficients zeroed.
pub fn perturb_start<T: MultiDouble, R: Rng>(exact: &SeriesVec<T>, rng: &mut R) -> SeriesVec<T> {
    let scale = T::eps().sqrt();
    let mut start = SeriesVec::zeros(exact.dim(), exact.order());
    for i in 0..exact.dim() {
        let z = exact.coeff(0).get(i);
        let u: f64 = rng.gen_range(-0.5..0.5);
        let v: f64 = rng.gen_range(-0.5..0.5);
        let noise = Complex::from_f64(1.0 + scale * u, scale * v);
        start.coeff_mut(0).set(i, z.mul(noise));
    }
    start
}
