//! Householder QR least squares over complex multiple doubles, and the staged
//! block-Toeplitz forward substitution with right-hand-side updates and
//! residual computation.

use rayon::prelude::*;
use thiserror::Error;

use crate::complex::Complex;
use crate::evaldiff::SeriesMatrix;
use crate::ledger::{KernelClass, KernelLedger};
use crate::md::MultiDouble;
use crate::series::{coeff_norm, SeriesVec};

#[derive(Clone, Copy, Debug, PartialEq, Error)]
pub enum SolveError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("zero diagonal at row {0} in back substitution")]
    SingularDiagonal(usize),
}

/// Compact Householder factorization A = QR: the reflector vectors with their
/// scaling factors, and the upper triangle R (exact zeros below the
/// diagonal).
#[derive(Clone, Debug)]
pub struct QRFactors<T: MultiDouble> {
    n: usize,
    reflectors: Vec<Vec<Complex<T>>>,
    betas: Vec<T>,
    r: Vec<Complex<T>>,
    min_diag: f64,
}

impl<T: MultiDouble> QRFactors<T> {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn r_entry(&self, i: usize, j: usize) -> Complex<T> {
        if j < i {
            Complex::zero()
        } else {
            self.r[i * self.n + j]
        }
    }

    /// Smallest |re|+|im| among the diagonal entries of R: the rank-deficiency
    /// report (never raised, the iteration may still proceed).
    pub fn min_diag_modulus(&self) -> f64 {
        self.min_diag
    }

    /// Assemble the unitary factor column by column: Q e_j for each j. Meant
    /// for verification, costs n applications of the reflectors.
    pub fn assemble_q(&self) -> Vec<Complex<T>> {
        let n = self.n;
        let mut q = vec![Complex::zero(); n * n];
        for j in 0..n {
            let mut col = vec![Complex::zero(); n];
            col[j] = Complex::one();
            // Q = H_0 H_1 ... H_(n-1): apply from the last reflector back.
            for k in (0..n).rev() {
                apply_reflector(&self.reflectors[k], self.betas[k], &mut col);
            }
            for i in 0..n {
                q[i * n + j] = col[i];
            }
        }
        q
    }
}

/// v := v - beta (w^H v) w, the Householder application. The inner product
/// runs in a fixed ascending order.
fn apply_reflector<T: MultiDouble>(w: &[Complex<T>], beta: T, v: &mut [Complex<T>]) {
    if beta.is_zero() {
        return;
    }
    let mut dot = Complex::zero();
    for (wi, vi) in w.iter().zip(v.iter()) {
        dot = dot.add(wi.conj().mul(*vi));
    }
    let s = dot.scale(beta);
    for (wi, vi) in w.iter().zip(v.iter_mut()) {
        *vi = vi.sub(s.mul(*wi));
    }
}

/// Householder QR of a dense row-major n-by-n matrix.
///
/// Columns to the right of the pivot are updated in parallel; each column is
/// a fixed sequential reduction, so the factorization is deterministic for
/// any thread count.
pub fn householder_qr<T: MultiDouble>(a: &[Complex<T>], n: usize) -> QRFactors<T> {
    assert_eq!(a.len(), n * n);
    // Column-major working copy: columns are the parallel unit.
    let mut cols: Vec<Vec<Complex<T>>> = (0..n)
        .map(|j| (0..n).map(|i| a[i * n + j]).collect())
        .collect();

    let mut reflectors: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
    let mut betas: Vec<T> = Vec::with_capacity(n);
    let mut r = vec![Complex::zero(); n * n];
    let mut min_diag = f64::INFINITY;

    for k in 0..n {
        let mut w = vec![Complex::zero(); n];
        let mut sigma = T::zero();
        for i in k..n {
            sigma = sigma.add(cols[k][i].modulus_sq());
        }

        if sigma.is_zero() {
            // Zero column: identity reflector, zero pivot.
            reflectors.push(w);
            betas.push(T::zero());
            min_diag = 0.0;
            for j in k..n {
                r[k * n + j] = cols[j][k];
            }
            r[k * n + k] = Complex::zero();
            continue;
        }

        let norm = sigma.sqrt();
        let xk = cols[k][k];
        // Phase of the pivot entry; 1 when the pivot vanishes.
        let phase = if xk.is_zero() {
            Complex::one()
        } else {
            let m = xk.modulus();
            Complex::new(xk.re.div(m), xk.im.div(m))
        };
        let alpha = phase.scale(norm).neg();

        w[k] = xk.sub(alpha);
        for i in k + 1..n {
            w[i] = cols[k][i];
        }
        let mut wnorm_sq = T::zero();
        for wi in &w[k..] {
            wnorm_sq = wnorm_sq.add(wi.modulus_sq());
        }
        let beta = T::from_f64(2.0).div(wnorm_sq);

        // Pivot column maps to alpha e_k by construction; zeros below are
        // exact.
        r[k * n + k] = alpha;
        min_diag = min_diag.min(alpha.norm_one().to_f64().abs());

        let (_, rest) = cols.split_at_mut(k + 1);
        rest.par_iter_mut().for_each(|col| {
            apply_reflector(&w, beta, col);
        });
        for j in k + 1..n {
            r[k * n + j] = cols[j][k];
        }

        reflectors.push(w);
        betas.push(beta);
    }

    QRFactors { n, reflectors, betas, r, min_diag }
}

/// Q^H b: the reflectors applied in factorization order.
pub fn qhb<T: MultiDouble>(factors: &QRFactors<T>, b: &[Complex<T>]) -> Result<Vec<Complex<T>>, SolveError> {
    if b.len() != factors.n {
        return Err(SolveError::DimensionMismatch { expected: factors.n, got: b.len() });
    }
    let mut y = b.to_vec();
    for k in 0..factors.n {
        apply_reflector(&factors.reflectors[k], factors.betas[k], &mut y);
    }
    Ok(y)
}

/// Solve R x = y for upper triangular R.
pub fn back_substitute<T: MultiDouble>(
    factors: &QRFactors<T>,
    y: &[Complex<T>],
) -> Result<Vec<Complex<T>>, SolveError> {
    let n = factors.n;
    if y.len() != n {
        return Err(SolveError::DimensionMismatch { expected: n, got: y.len() });
    }
    let mut x = vec![Complex::zero(); n];
    for i in (0..n).rev() {
        let diag = factors.r_entry(i, i);
        if diag.is_zero() {
            return Err(SolveError::SingularDiagonal(i));
        }
        let mut acc = y[i];
        for j in i + 1..n {
            acc = acc.sub(factors.r_entry(i, j).mul(x[j]));
        }
        x[i] = acc.div(diag);
    }
    Ok(x)
}

/// One least-squares solve x = R \ (Q^H b) with the two phases charged to
/// their ledger classes.
pub fn least_squares_stage<T: MultiDouble>(
    factors: &QRFactors<T>,
    b: &[Complex<T>],
    ledger: &mut KernelLedger,
) -> Result<Vec<Complex<T>>, SolveError> {
    let y = ledger.record(KernelClass::Qhb, || qhb(factors, b))?;
    ledger.record(KernelClass::Bs, || back_substitute(factors, &y))
}

/// y = A_k x for one coefficient matrix of the Jacobian series, rows in
/// parallel, each row a fixed sequential dot product.
pub fn matvec<T: MultiDouble>(a: &SeriesMatrix<T>, k: usize, x: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = a.dim();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let row = a.row(k, i);
            let mut acc = Complex::zero();
            for (aij, xj) in row.iter().zip(x.iter()) {
                acc = acc.add(aij.mul(*xj));
            }
            acc
        })
        .collect()
}

/// Forward substitution through the active stages of the block lower
/// triangular Toeplitz system: for k ascending, apply the updates
/// b_k := b_k - A_(k-i) dx_i for previously solved stages i, then solve
/// A_0 dx_k = b_k through the QR factors. Updates, Q^H b products and back
/// substitutions are charged to their kernel classes.
pub fn toeplitz_solve<T: MultiDouble>(
    a: &SeriesMatrix<T>,
    b: &SeriesVec<T>,
    factors: &QRFactors<T>,
    active: std::ops::Range<usize>,
    ledger: &mut KernelLedger,
) -> Result<SeriesVec<T>, SolveError> {
    let n = a.dim();
    if b.dim() != n {
        return Err(SolveError::DimensionMismatch { expected: n, got: b.dim() });
    }
    let mut dx = SeriesVec::zeros(n, b.order());
    let mut solved: Vec<(usize, Vec<Complex<T>>)> = Vec::new();

    for k in active {
        let mut rhs: Vec<Complex<T>> = b.coeff(k).to_entries();
        for (i, dx_i) in &solved {
            ledger.record(KernelClass::Updates, || {
                let prod = matvec(a, k - i, dx_i);
                for (r, p) in rhs.iter_mut().zip(&prod) {
                    *r = r.sub(*p);
                }
            });
        }
        let x_k = least_squares_stage(factors, &rhs, ledger)?;
        for (i, z) in x_k.iter().enumerate() {
            dx.coeff_mut(k).set(i, *z);
        }
        solved.push((k, x_k));
    }
    Ok(dx)
}

/// The norm of b - A dx over the truncated product, charged to the residuals
/// class. With `sample_rows` nonzero only that many rows (deterministically
/// the first ones) enter the norm, the cheap monitoring variant.
pub fn residual<T: MultiDouble>(
    a: &SeriesMatrix<T>,
    dx: &SeriesVec<T>,
    b: &SeriesVec<T>,
    sample_rows: usize,
    ledger: &mut KernelLedger,
) -> Result<T, SolveError> {
    let n = a.dim();
    if dx.dim() != n || b.dim() != n {
        return Err(SolveError::DimensionMismatch { expected: n, got: dx.dim().max(b.dim()) });
    }
    let d = b.order().min(a.order()).min(dx.order());
    let rows = if sample_rows == 0 { n } else { sample_rows.min(n) };
    Ok(ledger.record(KernelClass::Residuals, || {
        let xs: Vec<Vec<Complex<T>>> = (0..d).map(|k| dx.coeff(k).to_entries()).collect();
        // Per sampled row, the |b - A dx| contribution of every coefficient.
        // Rows run in parallel; the cross-row sums fold in index order below,
        // so the result is independent of the scheduling. Unsampled rows are
        // never computed.
        let row_norms: Vec<Vec<T>> = (0..rows)
            .into_par_iter()
            .map(|i| {
                (0..d)
                    .map(|k| {
                        let mut acc = Complex::zero();
                        for j in 0..=k {
                            let row = a.row(k - j, i);
                            for (aij, xj) in row.iter().zip(xs[j].iter()) {
                                acc = acc.add(aij.mul(*xj));
                            }
                        }
                        b.coeff(k).get(i).sub(acc).norm_one()
                    })
                    .collect()
            })
            .collect();
        let mut worst = T::zero();
        for k in 0..d {
            let mut norm = T::zero();
            for per_row in &row_norms {
                norm = norm.add(per_row[k]);
            }
            if norm > worst {
                worst = norm;
            }
        }
        worst
    }))
}

/// Norm of one coefficient vector charged to the residuals class (the
/// convergence-monitoring norms share the class of the residual kernel).
pub fn stage_norm<T: MultiDouble>(
    v: &crate::complex::PlanarVec<T>,
    ledger: &mut KernelLedger,
) -> T {
    ledger.record(KernelClass::Residuals, || coeff_norm(v))
}
