//! The built-in verification suites behind `verify`: each checks one layer of
//! the solver against an independent reference computation.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{dense_block_toeplitz_solve, dyadic_suite, naive_series_product, SuiteOutcome};
use crate::complex::Complex;
use crate::evaldiff::{evaluate_system, speel_monomial};
use crate::ledger::KernelLedger;
use crate::linsolve::{householder_qr, toeplitz_solve};
use crate::md::{Dd, MultiDouble, Qd, D1};
use crate::series::{convolve, exp_series, Series, SeriesVec};
use crate::sysgen::{make_system, AlphaMode, Columns, SolutionSpec};

fn rand_c(rng: &mut ChaCha8Rng) -> (f64, f64) {
    (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Block-Toeplitz forward substitution against the dense assembled solve, on
/// plain doubles at n=3, d=4.
pub fn dense_toeplitz_suite(seed: u64) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, d) = (3usize, 4usize);
    let mut cases = 0;
    let mut failures = 0;
    let mut detail = String::new();

    for case in 0..8 {
        // Random well-scaled coefficient matrices and right-hand side.
        let a_coeffs: Vec<Vec<(f64, f64)>> = (0..d)
            .map(|k| {
                (0..n * n)
                    .map(|idx| {
                        let (re, im) = rand_c(&mut rng);
                        // Keep the leading block dominant so the system is
                        // comfortably nonsingular.
                        if k == 0 && idx % (n + 1) == 0 {
                            (re + 3.0, im)
                        } else {
                            (re, im)
                        }
                    })
                    .collect()
            })
            .collect();
        let b_coeffs: Vec<Vec<(f64, f64)>> =
            (0..d).map(|_| (0..n).map(|_| rand_c(&mut rng)).collect()).collect();

        // Dense oracle on the assembled 12x12 system.
        let oracle = dense_block_toeplitz_solve(&a_coeffs, &b_coeffs, n);

        // Staged solve through the production path.
        let mut a = crate::evaldiff::SeriesMatrix::<D1>::zeros(n, d);
        for k in 0..d {
            for i in 0..n {
                for j in 0..n {
                    let (re, im) = a_coeffs[k][i * n + j];
                    a.set_entry(k, i, j, Complex::from_f64(re, im));
                }
            }
        }
        let mut b = SeriesVec::<D1>::zeros(n, d);
        for k in 0..d {
            for i in 0..n {
                let (re, im) = b_coeffs[k][i];
                b.coeff_mut(k).set(i, Complex::from_f64(re, im));
            }
        }
        let factors = householder_qr(&a.leading(), n);
        let mut ledger = KernelLedger::new();
        let dx = match toeplitz_solve(&a, &b, &factors, 0..d, &mut ledger) {
            Ok(dx) => dx,
            Err(e) => {
                failures += 1;
                cases += 1;
                detail.push_str(&format!("case {case}: solve failed: {e}\n"));
                continue;
            }
        };

        cases += 1;
        let mut worst = 0.0f64;
        for k in 0..d {
            for i in 0..n {
                let got = dx.coeff(k).get(i);
                let (re, im) = oracle[k * n + i];
                worst = worst
                    .max((got.re.to_f64() - re).abs())
                    .max((got.im.to_f64() - im).abs());
            }
        }
        if worst > 1.0e-10 {
            failures += 1;
            detail.push_str(&format!("case {case}: worst entry error {worst:.3e}\n"));
        }
    }
    SuiteOutcome { name: "dense-toeplitz", cases, failures, detail }
}

/// Reverse-mode values and gradients against direct truncated-polynomial
/// expansion, on plain doubles at n <= 4, d <= 4.
pub fn gradient_suite(seed: u64) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = 0;
    let mut failures = 0;
    let mut detail = String::new();

    for n in 2..=4usize {
        for d in 2..=4usize {
            // Random component series, coefficients in [-1, 1].
            let comps_raw: Vec<Vec<(f64, f64)>> =
                (0..n).map(|_| (0..d).map(|_| rand_c(&mut rng)).collect()).collect();
            let comps: Vec<Series<D1>> = comps_raw
                .iter()
                .map(|cs| Series {
                    coeffs: cs.iter().map(|&(re, im)| Complex::from_f64(re, im)).collect(),
                })
                .collect();
            let vars: Vec<usize> = (0..n).collect();
            let (value, grads, _) = speel_monomial(&vars, &comps).expect("valid monomial");

            // Oracle: direct left-to-right Cauchy products.
            let oracle_product = |indices: &[usize]| -> Vec<(f64, f64)> {
                let mut acc = comps_raw[indices[0]].clone();
                for &v in &indices[1..] {
                    acc = naive_series_product(&acc, &comps_raw[v]);
                }
                acc
            };

            cases += 1;
            let mut worst = 0.0f64;
            let value_oracle = oracle_product(&vars);
            for k in 0..d {
                worst = worst
                    .max((value.coeffs[k].re.to_f64() - value_oracle[k].0).abs())
                    .max((value.coeffs[k].im.to_f64() - value_oracle[k].1).abs());
            }
            for (slot, &v) in vars.iter().enumerate() {
                let others: Vec<usize> = vars.iter().copied().filter(|&u| u != v).collect();
                let grad_oracle = oracle_product(&others);
                for k in 0..d {
                    worst = worst
                        .max((grads[slot].coeffs[k].re.to_f64() - grad_oracle[k].0).abs())
                        .max((grads[slot].coeffs[k].im.to_f64() - grad_oracle[k].1).abs());
                }
            }
            if worst > 1.0e-12 {
                failures += 1;
                detail.push_str(&format!("n={n} d={d}: worst error {worst:.3e}\n"));
            }
        }
    }

    // Also check a full system evaluation: residual of the exact solution.
    let spec = SolutionSpec {
        dim: 4,
        order: 4,
        alpha_mode: AlphaMode::UnitComplex,
        damping: 1.0,
        seed,
    };
    let (system, exact) = make_system::<D1>(&spec, Columns::one_lower(4)).unwrap();
    cases += 1;
    match evaluate_system(&system, &exact, 4) {
        Ok((_, b)) => {
            let norm = crate::series::series_norm(&b).to_f64();
            if norm > 1.0e-12 {
                failures += 1;
                detail.push_str(&format!("exact-solution residual {norm:.3e}\n"));
            }
        }
        Err(e) => {
            failures += 1;
            detail.push_str(&format!("evaluation failed: {e}\n"));
        }
    }

    SuiteOutcome { name: "symbolic-gradient", cases, failures, detail }
}

/// The exponential product law exp(a t) * exp(b t) = exp((a+b) t) under the
/// padded convolution, at double-double and quad-double precision.
pub fn exp_product_suite(seed: u64) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = 0;
    let mut failures = 0;
    let mut detail = String::new();

    fn run_one<T: MultiDouble>(
        rng: &mut ChaCha8Rng,
        order: usize,
        cases: &mut usize,
        failures: &mut usize,
        detail: &mut String,
    ) {
        let (ar, ai) = rand_c(rng);
        let (br, bi) = rand_c(rng);
        let alpha = Complex::<T>::from_f64(ar, ai);
        let beta = Complex::<T>::from_f64(br, bi);
        let ea = exp_series(alpha, order);
        let eb = exp_series(beta, order);
        let product = convolve(&ea, &eb).expect("equal orders");
        let direct = exp_series(alpha.add(beta), order);
        *cases += 1;
        let mut worst = 0.0f64;
        for (k, (p, q)) in product.coeffs.iter().zip(&direct.coeffs).enumerate() {
            // First-order error bound of the convolution: eps times the sum
            // of operand magnitudes entering coefficient k. Coefficients with
            // cancellation (alpha + beta small) are accurate to this absolute
            // level, not to a relative one.
            let mut ref_k = 0.0f64;
            for j in 0..=k {
                ref_k += ea.coeffs[j].norm_one().to_f64().abs()
                    * eb.coeffs[k - j].norm_one().to_f64().abs();
            }
            let bound = 16.0 * T::eps() * ref_k.max(q.norm_one().to_f64().abs());
            let err = p.sub(*q).norm_one().to_f64();
            if err > bound {
                worst = worst.max(err / bound);
            }
        }
        if worst > 1.0 {
            *failures += 1;
            detail.push_str(&format!(
                "{} order {order}: error exceeds bound by {worst:.3e}\n",
                T::PRECISION
            ));
        }
    }

    for _ in 0..10 {
        run_one::<Dd>(&mut rng, 8, &mut cases, &mut failures, &mut detail);
        run_one::<Qd>(&mut rng, 16, &mut cases, &mut failures, &mut detail);
    }
    SuiteOutcome { name: "exp-product-law", cases, failures, detail }
}

/// All four oracle suites in a fixed order.
pub fn run_all(seed: u64) -> Vec<SuiteOutcome> {
    vec![
        dyadic_suite(2000, seed),
        dense_toeplitz_suite(seed),
        gradient_suite(seed),
        exp_product_suite(seed),
    ]
}
