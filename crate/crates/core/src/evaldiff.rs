//! Evaluation and differentiation of monomial systems at series vectors via
//! the reverse mode over power-series arithmetic: the value of a product of m
//! variables and all m partial derivatives in 3m-5 series multiplications.

use rayon::prelude::*;
use thiserror::Error;

use crate::complex::Complex;
use crate::md::{costs, MultiDouble, Precision};
use crate::series::{convolve, Series, SeriesVec};
use crate::sysgen::MonomialSystem;

#[derive(Clone, Copy, Debug, PartialEq, Error)]
pub enum EvalError {
    #[error("monomial has no variables")]
    EmptyMonomial,
    #[error("variable {0} appears twice in one monomial")]
    DuplicateVariable(usize),
    #[error("dimension mismatch: system {system}, vector {vector}")]
    DimensionMismatch { system: usize, vector: usize },
}

/// A truncated power series of n-by-n matrix coefficients, stored by row so
/// monomials can fill their rows independently.
#[derive(Clone, Debug)]
pub struct SeriesMatrix<T: MultiDouble> {
    dim: usize,
    order: usize,
    /// rows[i][k][j] = coefficient of t^k in d f_i / d x_j.
    rows: Vec<Vec<Vec<Complex<T>>>>,
}

impl<T: MultiDouble> SeriesMatrix<T> {
    pub fn zeros(dim: usize, order: usize) -> Self {
        SeriesMatrix {
            dim,
            order,
            rows: vec![vec![vec![Complex::zero(); dim]; order]; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entry(&self, k: usize, i: usize, j: usize) -> Complex<T> {
        self.rows[i][k][j]
    }

    pub fn set_entry(&mut self, k: usize, i: usize, j: usize, z: Complex<T>) {
        self.rows[i][k][j] = z;
    }

    /// Row i of coefficient matrix k.
    pub fn row(&self, k: usize, i: usize) -> &[Complex<T>] {
        &self.rows[i][k]
    }

    /// The dense leading coefficient matrix A_0, row-major.
    pub fn leading(&self) -> Vec<Complex<T>> {
        let mut out = Vec::with_capacity(self.dim * self.dim);
        for i in 0..self.dim {
            out.extend_from_slice(&self.rows[i][0]);
        }
        out
    }
}

/// Work table of the three-column reverse-mode scheme for one monomial:
/// forward prefix products, backward suffix products, and the cross products
/// that finish the interior gradients.
#[derive(Clone, Debug)]
pub struct MonomialWork<T: MultiDouble> {
    pub forward: Vec<Series<T>>,
    pub backward: Vec<Series<T>>,
    pub cross: Vec<Series<T>>,
}

/// Evaluate the product of the selected variables and its gradient.
///
/// Returns the value series and one gradient series per participating
/// variable, in the order given. The number of series multiplications is
/// exactly 0, 1 or 3m-5 for m = 1, 2, >= 3 participating variables.
pub fn speel_monomial<T: MultiDouble>(
    vars: &[usize],
    x: &[Series<T>],
) -> Result<(Series<T>, Vec<Series<T>>, MonomialWork<T>), EvalError> {
    let m = vars.len();
    if m == 0 {
        return Err(EvalError::EmptyMonomial);
    }
    let mut seen = vec![false; x.len()];
    for &v in vars {
        if seen[v] {
            return Err(EvalError::DuplicateVariable(v));
        }
        seen[v] = true;
    }
    let order = x[vars[0]].order();
    let empty = MonomialWork { forward: Vec::new(), backward: Vec::new(), cross: Vec::new() };

    match m {
        1 => Ok((x[vars[0]].clone(), vec![Series::one(order)], empty)),
        2 => {
            let value = convolve(&x[vars[0]], &x[vars[1]]).expect("equal orders");
            Ok((value, vec![x[vars[1]].clone(), x[vars[0]].clone()], empty))
        }
        _ => {
            // Forward column: m-1 prefix products x_v1..x_v(j+1).
            let mut forward = Vec::with_capacity(m - 1);
            forward.push(convolve(&x[vars[0]], &x[vars[1]]).expect("equal orders"));
            for j in 2..m {
                let prev = forward.last().unwrap();
                forward.push(convolve(prev, &x[vars[j]]).expect("equal orders"));
            }

            // Backward column: m-2 suffix products x_vm..x_v(m-1-j).
            let mut backward = Vec::with_capacity(m - 2);
            backward.push(convolve(&x[vars[m - 1]], &x[vars[m - 2]]).expect("equal orders"));
            for j in 2..m - 1 {
                let prev = backward.last().unwrap();
                backward.push(convolve(prev, &x[vars[m - 1 - j]]).expect("equal orders"));
            }

            let value = forward[m - 2].clone();
            let mut grads = vec![Series::zero(order); m];
            grads[0] = backward[m - 3].clone();
            grads[m - 1] = forward[m - 3].clone();

            // Cross column: m-2 products prefix(j-1) * suffix(j+1).
            let mut cross = Vec::with_capacity(m - 2);
            for j in 1..m - 1 {
                let prefix = if j == 1 { &x[vars[0]] } else { &forward[j - 2] };
                let suffix = if j == m - 2 { &x[vars[m - 1]] } else { &backward[m - 3 - j] };
                let g = convolve(prefix, suffix).expect("equal orders");
                cross.push(g.clone());
                grads[j] = g;
            }

            Ok((value, grads, MonomialWork { forward, backward, cross }))
        }
    }
}

/// Series multiplications performed by one monomial of m variables.
pub const fn speel_mul_count(m: usize) -> usize {
    match m {
        0 | 1 => 0,
        2 => 1,
        _ => 3 * m - 5,
    }
}

/// Evaluate the system at x (truncated to `order`): the Jacobian series A and
/// the residual right-hand side b = rhs - f(x).
///
/// Rows are independent and run in parallel; each writes only its own row of
/// every coefficient matrix and its own entries of b, so the result does not
/// depend on the scheduling.
pub fn evaluate_system<T: MultiDouble>(
    sys: &MonomialSystem<T>,
    x: &SeriesVec<T>,
    order: usize,
) -> Result<(SeriesMatrix<T>, SeriesVec<T>), EvalError> {
    let n = sys.dim();
    if x.dim() != n {
        return Err(EvalError::DimensionMismatch { system: n, vector: x.dim() });
    }
    let d = order.min(x.order()).min(sys.order());

    let comps: Vec<Series<T>> = (0..n).map(|i| x.component(i).truncated(d)).collect();

    struct RowResult<T: MultiDouble> {
        b: Series<T>,
        jac: Vec<Vec<Complex<T>>>,
    }

    let results: Result<Vec<RowResult<T>>, EvalError> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut b = sys.rhs.component(i).truncated(d);
            let mut jac = vec![vec![Complex::zero(); n]; d];
            for col in &sys.columns {
                let vars = col.exponents.row_vars(i);
                let c = col.coeffs[i];
                let (value, grads, _) = speel_monomial(&vars, &comps)?;
                b = b.sub(&value.scale(c));
                for (slot, &v) in vars.iter().enumerate() {
                    let scaled = grads[slot].scale(c);
                    for k in 0..d {
                        jac[k][v] = jac[k][v].add(scaled.coeffs[k]);
                    }
                }
            }
            Ok(RowResult { b, jac })
        })
        .collect();
    let results = results?;

    let mut a = SeriesMatrix::zeros(n, d);
    let mut b = SeriesVec::zeros(n, d);
    for (i, row) in results.into_iter().enumerate() {
        a.rows[i] = row.jac;
        b.set_component(i, &row.b);
    }
    Ok((a, b))
}

/// Predicted and measured floating-point operations per double of data for
/// the evaluation/differentiation kernel.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct ArithmeticIntensity {
    /// (3n-5) d^2 / (n d): multiplications per double if coefficients were
    /// plain doubles.
    pub conv_ratio: f64,
    /// n^2 d^2 / ((n+1) n d): the same ratio for a matrix-vector product.
    pub matvec_ratio: f64,
    /// Cost-model multiplier of the precision: 1, 11.5, 84 or 217.75.
    pub overhead_factor: f64,
    /// conv_ratio * overhead_factor.
    pub predicted_ops_per_double: f64,
    /// Observed hardware operations per input double, when counters are
    /// supplied.
    pub measured_ops_per_double: Option<f64>,
}

/// The intensity report for one monomial of n variables at order d.
/// `measured_ops` is the operation count observed for the kernel; the data
/// volume is the n*d complex coefficients of 2*limbs doubles each.
pub fn intensity_report(
    n: usize,
    d: usize,
    p: Precision,
    measured_ops: Option<u64>,
) -> ArithmeticIntensity {
    let nf = n as f64;
    let df = d as f64;
    let conv_ratio = (3.0 * nf - 5.0) * df * df / (nf * df);
    let matvec_ratio = nf * nf * df * df / ((nf + 1.0) * nf * df);
    let overhead = costs::overhead_factor(p);
    ArithmeticIntensity {
        conv_ratio,
        matvec_ratio,
        overhead_factor: overhead,
        predicted_ops_per_double: conv_ratio * overhead,
        measured_ops_per_double: measured_ops
            .map(|ops| ops as f64 / (nf * df * 2.0 * p.limbs() as f64)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::md::{Dd, Qd, D1};
    use crate::series::{exp_series, series_norm};
    use crate::sysgen::{make_system, AlphaMode, Columns, SolutionSpec};
    use crate::tally;

    fn exp_components<T: MultiDouble>(alphas: &[(f64, f64)], order: usize) -> Vec<Series<T>> {
        alphas
            .iter()
            .map(|&(re, im)| exp_series(Complex::from_f64(re, im), order))
            .collect()
    }

    #[test]
    fn four_variable_monomial_costs_seven_multiplications() {
        let x = exp_components::<D1>(&[(1.0, 0.0), (0.5, 0.0), (-0.25, 0.0), (0.75, 0.0)], 3);
        let before = tally::local_conv_muls();
        let (_, grads, work) = speel_monomial(&[0, 1, 2, 3], &x).unwrap();
        assert_eq!(tally::local_conv_muls() - before, 7 * 9);
        assert_eq!(grads.len(), 4);
        assert_eq!(work.forward.len(), 3);
        assert_eq!(work.backward.len(), 2);
        assert_eq!(work.cross.len(), 2);
    }

    #[test]
    fn count_law_matches_formula() {
        for m in [3usize, 5, 8, 16] {
            let d = 4usize;
            let alphas: Vec<(f64, f64)> = (0..m).map(|i| (0.1 * i as f64, 0.0)).collect();
            let x = exp_components::<D1>(&alphas, d);
            let vars: Vec<usize> = (0..m).collect();
            let before = tally::local_conv_muls();
            let _ = speel_monomial(&vars, &x).unwrap();
            let got = tally::local_conv_muls() - before;
            assert_eq!(got as usize, (3 * m - 5) * d * d);
            assert_eq!(speel_mul_count(m), 3 * m - 5);
        }
    }

    #[test]
    fn single_and_double_variable_short_circuits() {
        let x = exp_components::<Dd>(&[(1.0, 0.0), (-1.0, 0.0)], 4);
        let before = tally::local_conv_muls();
        let (value, grads, _) = speel_monomial(&[1], &x).unwrap();
        assert_eq!(tally::local_conv_muls() - before, 0);
        assert_eq!(value, x[1]);
        assert_eq!(grads[0], Series::one(4));

        let before = tally::local_conv_muls();
        let (_, grads, _) = speel_monomial(&[0, 1], &x).unwrap();
        assert_eq!(tally::local_conv_muls() - before, 16);
        assert_eq!(grads[0], x[1]);
        assert_eq!(grads[1], x[0]);
    }

    #[test]
    fn monomial_input_validation() {
        let x = exp_components::<Dd>(&[(1.0, 0.0), (2.0, 0.0)], 3);
        assert_eq!(speel_monomial::<Dd>(&[], &x).unwrap_err(), EvalError::EmptyMonomial);
        assert_eq!(
            speel_monomial(&[1, 1], &x).unwrap_err(),
            EvalError::DuplicateVariable(1)
        );
    }

    #[test]
    fn gradients_recompose_the_value() {
        // value = x_v * grad_v for every participating variable.
        let x = exp_components::<Qd>(
            &[(1.0, 0.0), (0.3, 0.4), (-0.5, 0.2), (0.9, -0.1), (0.0, 1.0)],
            5,
        );
        let vars = [0usize, 1, 2, 3, 4];
        let (value, grads, _) = speel_monomial(&vars, &x).unwrap();
        for (slot, &v) in vars.iter().enumerate() {
            let recomposed = convolve(&x[v], &grads[slot]).unwrap();
            for (a, b) in recomposed.coeffs.iter().zip(&value.coeffs) {
                let err = a.sub(*b).norm_one().to_f64();
                assert!(err <= 8.0 * Qd::eps() * 5.0, "err {err}");
            }
        }
    }

    #[test]
    fn residual_at_exact_solution_is_tiny() {
        let spec = SolutionSpec {
            dim: 5,
            order: 6,
            alpha_mode: AlphaMode::UnitComplex,
            damping: 1.0,
            seed: 5,
        };
        let (system, exact) = make_system::<Qd>(&spec, Columns::one_lower(5)).unwrap();
        let (_, b) = evaluate_system(&system, &exact, 6).unwrap();
        let norm = series_norm(&b).to_f64();
        assert!(norm <= 16.0 * 5.0 * Qd::eps(), "residual {norm}");
    }

    #[test]
    fn leading_jacobian_of_lower_ones_is_all_ones() {
        // At t=0 every exponential is 1, so each partial of x1 x2 x3 is 1.
        let spec = SolutionSpec {
            dim: 3,
            order: 4,
            alpha_mode: AlphaMode::UnitComplex,
            damping: 1.0,
            seed: 2,
        };
        let (system, exact) = make_system::<Dd>(&spec, Columns::one_lower(3)).unwrap();
        let (a, _) = evaluate_system(&system, &exact, 4).unwrap();
        for j in 0..3 {
            let e = a.entry(0, 2, j);
            assert!((e.re.to_f64() - 1.0).abs() < 1e-28);
            assert!(e.im.to_f64().abs() < 1e-28);
        }
        // A variable absent from a monomial has the zero series.
        assert!(a.entry(0, 0, 1).is_zero());
        assert!(a.entry(1, 0, 2).is_zero());
    }

    #[test]
    fn two_columns_evaluate_as_the_sum_of_single_columns() {
        use crate::sysgen::{triangular_ones, Orientation};
        let n = 4;
        let spec = SolutionSpec {
            dim: n,
            order: 3,
            alpha_mode: AlphaMode::UnitComplex,
            damping: 1.0,
            seed: 11,
        };
        let (two_col, exact) = make_system::<Dd>(&spec, Columns::two_triangular(n)).unwrap();
        let c1 = two_col.columns[0].coeffs.clone();
        let c2 = two_col.columns[1].coeffs.clone();
        let (one_a, _) = make_system::<Dd>(
            &spec,
            Columns::One {
                exponents: triangular_ones(n, Orientation::Lower),
                coeffs: Some(c1),
            },
        )
        .unwrap();
        let (one_b, _) = make_system::<Dd>(
            &spec,
            Columns::One {
                exponents: triangular_ones(n, Orientation::Upper),
                coeffs: Some(c2),
            },
        )
        .unwrap();

        let (a_two, _) = evaluate_system(&two_col, &exact, 3).unwrap();
        let (a_one, _) = evaluate_system(&one_a, &exact, 3).unwrap();
        let (a_two_b, _) = evaluate_system(&one_b, &exact, 3).unwrap();
        for k in 0..3 {
            for i in 0..n {
                for j in 0..n {
                    let want = a_one.entry(k, i, j).add(a_two_b.entry(k, i, j));
                    let got = a_two.entry(k, i, j);
                    let err = got.sub(want).norm_one().to_f64();
                    assert!(err <= 8.0 * Dd::eps() * 4.0, "err {err}");
                }
            }
        }
    }

    #[test]
    fn intensity_numbers() {
        let r = intensity_report(64, 8, Precision::Dd, None);
        assert_eq!(r.overhead_factor, 11.5);
        let qd = intensity_report(64, 8, Precision::Qd, None);
        let od = intensity_report(64, 8, Precision::Od, None);
        assert!((qd.overhead_factor / r.overhead_factor - 7.30).abs() < 0.005);
        assert!((od.overhead_factor / qd.overhead_factor - 2.59).abs() < 0.005);

        // Convolution intensity approaches 3d, matvec intensity d: ratio 3.
        let big = intensity_report(2048, 64, Precision::Od, None);
        assert!((big.conv_ratio / big.matvec_ratio - 3.0).abs() < 0.01);
    }
}
