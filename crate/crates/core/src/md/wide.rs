//! Quad-double and octo-double arithmetic, instantiated from the shared
//! expansion networks with fixed limb counts.

use super::expansion::{exp_add, exp_mul, renorm_vals, MAX_TERMS};
use super::{Md, MultiDouble, Precision};
use crate::tally::Ops;

macro_rules! wide_impl {
    ($k:literal, $precision:expr) => {
        impl MultiDouble for Md<$k> {
            const LIMBS: usize = $k;
            const PRECISION: Precision = $precision;

            fn from_limbs(limbs: &[f64]) -> Self {
                Self::copy_from(limbs)
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
                let mut buf = [0.0; MAX_TERMS];
                buf[..raw.len()].copy_from_slice(raw);
                let limbs = renorm_vals::<$k>(&mut buf[..raw.len()], &mut ops);
                ops.commit();
                Md { limbs }
            }

            fn add(self, rhs: Self) -> Self {
                let mut ops = Ops::default();
                let limbs = exp_add::<$k>(&self.limbs, &rhs.limbs, &mut ops);
                ops.commit();
                Md { limbs }
            }

            fn mul(self, rhs: Self) -> Self {
                let mut ops = Ops::default();
                let limbs = exp_mul::<$k>(&self.limbs, &rhs.limbs, &mut ops);
                ops.commit();
                Md { limbs }
            }

            fn scale_pow2(self, factor: f64) -> Self {
                debug_assert_eq!(factor.abs().log2().fract(), 0.0);
                let mut ops = Ops::default();
                ops.tally(0, 0, $k, 0);
                ops.commit();
                Md { limbs: self.limbs.map(|l| l * factor) }
            }
        }
    };
}

wide_impl!(4, Precision::Qd);
wide_impl!(8, Precision::Od);

#[cfg(test)]
mod tests {
    use super::super::{is_normalized, MultiDouble, Od, Qd};
    use crate::tally;

    #[test]
    fn per_call_costs_are_input_independent() {
        let samples = [
            (1.1, 2.3),
            (0.0, 5.0),
            (-7.25e100, 3.5e-80),
            (1.0, 1.0),
        ];
        let mut qd_costs = Vec::new();
        let mut od_costs = Vec::new();
        for (x, y) in samples {
            let before = tally::local_snapshot();
            let _ = Qd::from_f64(x).mul(Qd::from_f64(y));
            qd_costs.push(tally::local_snapshot().since(&before));

            let before = tally::local_snapshot();
            let _ = Od::from_f64(x).mul(Od::from_f64(y));
            od_costs.push(tally::local_snapshot().since(&before));
        }
        assert!(qd_costs.windows(2).all(|w| w[0] == w[1]), "{qd_costs:?}");
        assert!(od_costs.windows(2).all(|w| w[0] == w[1]), "{od_costs:?}");
        // The multiplication counts follow the partial-product layout
        // exactly: K(K+1)/2 two_prods at 7 each, plus K-1 plain products.
        assert_eq!(qd_costs[0].multiplications, 73);
        assert_eq!(od_costs[0].multiplications, 259);
    }

    #[test]
    fn wide_products_stay_normalized() {
        let a = Qd::renormalize(&[1.0 / 3.0, 2.2e-20, -1.0e-40, 4.0e-62]);
        let b = Qd::renormalize(&[-9.7, 1.0e-17]);
        assert!(is_normalized(a.mul(b).limbs()));
        assert!(is_normalized(a.add(b).limbs()));

        let c = Od::renormalize(&[5.0e10, -2.0e-8, 1.0e-25, 3.0e-44, -2.0e-60]);
        let d = Od::renormalize(&[1.0e-3, 7.0e-21]);
        assert!(is_normalized(c.mul(d).limbs()));
        assert!(is_normalized(c.add(d).limbs()));
    }
}
