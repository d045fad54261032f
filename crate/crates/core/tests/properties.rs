//! Property tests over the scalar and storage layers: the invariants that
//! must hold for arbitrary inputs, not just the worked examples.

use proptest::prelude::*;

use mdnewton::check::Dyadic;
use mdnewton::complex::{Complex, PlanarVec};
use mdnewton::md::{is_normalized, Dd, MultiDouble, Od, Qd};
use mdnewton::series::{convolve, exp_series, Series};
use mdnewton::sysgen::recommend_precision;

/// Limb ladders with random step widths and signs; every draw is a valid
/// (renormalizable) multiple double.
///
/// Leading exponents stay within 2^±150: an octo-double product of values
/// near 2^-330 would need tail limbs below the smallest subnormal, where the
/// inherited hardware exponent range cuts the representable precision short.
fn md_strategy<T: MultiDouble>() -> impl Strategy<Value = T> {
    (
        -150i32..150,
        proptest::collection::vec((1.0f64..2.0, any::<bool>(), 53u32..120), T::LIMBS),
    )
        .prop_map(|(lead, parts)| {
            let mut limbs = vec![0.0; T::LIMBS];
            let mut scale = (2.0f64).powi(lead);
            for (slot, (mag, neg, step)) in limbs.iter_mut().zip(parts) {
                *slot = if neg { -mag } else { mag } * scale;
                scale *= (2.0f64).powi(-(step as i32));
            }
            T::renormalize(&limbs)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dd_ops_normalized_and_accurate(a in md_strategy::<Dd>(), b in md_strategy::<Dd>()) {
        let s = a.add(b);
        let p = a.mul(b);
        prop_assert!(is_normalized(s.limbs()));
        prop_assert!(is_normalized(p.limbs()));
        let exact = Dyadic::from_md(&a).add(&Dyadic::from_md(&b));
        if !exact.is_zero() {
            prop_assert!(Dyadic::from_md(&s).within_rel(&exact, 4.0 * Dd::eps()));
        }
        let exact = Dyadic::from_md(&a).mul(&Dyadic::from_md(&b));
        if !exact.is_zero() {
            prop_assert!(Dyadic::from_md(&p).within_rel(&exact, 4.0 * Dd::eps()));
        }
    }

    #[test]
    fn od_ops_normalized_and_accurate(a in md_strategy::<Od>(), b in md_strategy::<Od>()) {
        let s = a.add(b);
        let p = a.mul(b);
        prop_assert!(is_normalized(s.limbs()));
        prop_assert!(is_normalized(p.limbs()));
        let exact = Dyadic::from_md(&a).add(&Dyadic::from_md(&b));
        if !exact.is_zero() {
            prop_assert!(Dyadic::from_md(&s).within_rel(&exact, 4.0 * Od::eps()));
        }
        let exact = Dyadic::from_md(&a).mul(&Dyadic::from_md(&b));
        if !exact.is_zero() {
            prop_assert!(Dyadic::from_md(&p).within_rel(&exact, 4.0 * Od::eps()));
        }
    }

    #[test]
    fn commutativity_is_bitwise(a in md_strategy::<Qd>(), b in md_strategy::<Qd>()) {
        prop_assert_eq!(a.add(b), b.add(a));
        prop_assert_eq!(a.mul(b), b.mul(a));
    }

    #[test]
    fn renormalize_is_idempotent(a in md_strategy::<Qd>()) {
        let again = Qd::renormalize(a.limbs());
        prop_assert_eq!(again, a);
    }

    #[test]
    fn planar_representation_is_bijective(
        parts in proptest::collection::vec((md_strategy::<Dd>(), md_strategy::<Dd>()), 1..12)
    ) {
        let entries: Vec<Complex<Dd>> =
            parts.into_iter().map(|(re, im)| Complex::new(re, im)).collect();
        let planar = PlanarVec::from_entries(&entries);
        prop_assert_eq!(planar.to_entries(), entries);
    }

    #[test]
    fn convolution_commutes(
        a in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 5),
        b in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 5)
    ) {
        let to_series = |cs: &[(f64, f64)]| Series::<Dd> {
            coeffs: cs.iter().map(|&(re, im)| Complex::from_f64(re, im)).collect(),
        };
        let (sa, sb) = (to_series(&a), to_series(&b));
        let ab = convolve(&sa, &sb).unwrap();
        let ba = convolve(&sb, &sa).unwrap();
        for (x, y) in ab.coeffs.iter().zip(&ba.coeffs) {
            let err = x.sub(*y).norm_one().to_f64().abs();
            prop_assert!(err <= 64.0 * Dd::eps());
        }
    }

    #[test]
    fn recommended_precision_is_monotone(d in 1usize..200) {
        let limbs = |d: usize| recommend_precision(d).map(|p| p.limbs()).unwrap_or(usize::MAX);
        prop_assert!(limbs(d) <= limbs(d + 1));
    }

    #[test]
    fn geometric_series_ratio_is_exact_for_any_order(d in 2usize..32) {
        let z0 = Complex::<Dd>::from_f64(0.6, -0.2);
        let inv = Complex::<Dd>::one().div(z0);
        let mut s = Series::zero(d);
        let mut c = Complex::one();
        for k in 0..d {
            s.coeffs[k] = c;
            c = c.mul(inv);
        }
        let (z, _) = mdnewton::series::fabry_ratio(&s).unwrap();
        let rel = z.sub(z0).norm_one().to_f64() / z0.norm_one().to_f64();
        prop_assert!(rel <= 8.0 * Dd::eps());
    }
}

#[test]
fn exp_law_on_aligned_arguments_meets_the_relative_bound() {
    // exp(at) * exp(at) = exp(2at): no cancellation, so the plain relative
    // bound applies coefficient by coefficient.
    for order in [4usize, 8, 16] {
        let alpha = Complex::<Qd>::from_f64(0.7, 0.0);
        let e = exp_series(alpha, order);
        let squared = convolve(&e, &e).unwrap();
        let direct = exp_series(alpha.add(alpha), order);
        for (got, want) in squared.coeffs.iter().zip(&direct.coeffs) {
            let err = got.sub(*want).norm_one().to_f64();
            let scale = want.norm_one().to_f64();
            assert!(err <= 16.0 * Qd::eps() * scale.max(f64::MIN_POSITIVE));
        }
    }
}

#[test]
fn stage_errors_grow_at_most_geometrically() {
    // A linear block-Toeplitz toy with known solution: take the Jacobian of
    // the generated system at its exact point (nonsingular leading block),
    // declare the exponential series to be the solution, build the right-hand
    // side by the truncated matrix product, and solve stage by stage. The
    // per-stage errors propagate through the updates but stay under a finite
    // geometric envelope.
    use mdnewton::evaldiff::evaluate_system;
    use mdnewton::ledger::KernelLedger;
    use mdnewton::linsolve::{householder_qr, matvec, toeplitz_solve};
    use mdnewton::md::D1;
    use mdnewton::series::SeriesVec;
    use mdnewton::sysgen::{make_system, AlphaMode, Columns, SolutionSpec};

    let (n, d) = (3usize, 8usize);
    let spec = SolutionSpec {
        dim: n,
        order: d,
        alpha_mode: AlphaMode::UnitComplex,
        damping: 1.0,
        seed: 23,
    };
    let (system, exact) = make_system::<D1>(&spec, Columns::one_lower(n)).unwrap();
    let (a, _) = evaluate_system(&system, &exact, d).unwrap();

    let xs: Vec<Vec<Complex<D1>>> = (0..d).map(|k| exact.coeff(k).to_entries()).collect();
    let mut b = SeriesVec::<D1>::zeros(n, d);
    for k in 0..d {
        let mut acc = vec![Complex::zero(); n];
        for j in 0..=k {
            let term = matvec(&a, k - j, &xs[j]);
            for (slot, t) in acc.iter_mut().zip(term) {
                *slot = slot.add(t);
            }
        }
        for (i, z) in acc.into_iter().enumerate() {
            b.coeff_mut(k).set(i, z);
        }
    }

    let factors = householder_qr(&a.leading(), n);
    let mut ledger = KernelLedger::new();
    let dx = toeplitz_solve(&a, &b, &factors, 0..d, &mut ledger).unwrap();

    let mut errors = Vec::new();
    for k in 0..d {
        let mut err = 0.0f64;
        for i in 0..n {
            err += dx.coeff(k).get(i).sub(exact.coeff(k).get(i)).norm_one().to_f64();
        }
        errors.push(err.max(1e-18));
    }
    // Fit the envelope: rho is the largest stage-to-stage growth; it must be
    // finite and the envelope over the first error must cover every stage.
    let rho = errors.windows(2).map(|w| w[1] / w[0]).fold(0.0f64, f64::max);
    assert!(rho.is_finite() && rho > 0.0, "degenerate error sequence {errors:?}");
    let c = errors[0].max(1e-15) * 4.0;
    for (k, e) in errors.iter().enumerate() {
        assert!(
            *e <= c * rho.max(1.5).powi(k as i32),
            "stage {k} error {e} escapes the envelope (rho {rho}): {errors:?}"
        );
    }
}
