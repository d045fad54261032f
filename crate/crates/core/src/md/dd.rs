//! Dedicated double-double arithmetic. These are the classic two-limb
//! routines built from error-free transforms; each executes a fixed
//! instruction sequence.

use super::eft::{quick_two_sum, two_prod, two_sum};
use super::{Md, MultiDouble, Precision};
use crate::tally::Ops;

impl MultiDouble for Md<2> {
    const LIMBS: usize = 2;
    const PRECISION: Precision = Precision::Dd;

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
        let mut buf = [0.0; super::expansion::MAX_TERMS];
        buf[..raw.len()].copy_from_slice(raw);
        let limbs = super::expansion::renorm_vals::<2>(&mut buf[..raw.len()], &mut ops);
        ops.commit();
        Md { limbs }
    }

    fn add(self, rhs: Self) -> Self {
        let mut ops = Ops::default();
        let (s1, s2) = two_sum(self.limbs[0], rhs.limbs[0], &mut ops);
        let (t1, t2) = two_sum(self.limbs[1], rhs.limbs[1], &mut ops);
        let s2 = s2 + t1;
        ops.tally(1, 0, 0, 0);
        let (s1, s2) = quick_two_sum(s1, s2, &mut ops);
        let s2 = s2 + t2;
        ops.tally(1, 0, 0, 0);
        let (hi, lo) = quick_two_sum(s1, s2, &mut ops);
        ops.commit();
        Md { limbs: [hi, lo] }
    }

    fn mul(self, rhs: Self) -> Self {
        let mut ops = Ops::default();
        let (p, mut e) = two_prod(self.limbs[0], rhs.limbs[0], &mut ops);
        e += self.limbs[0] * rhs.limbs[1];
        e += self.limbs[1] * rhs.limbs[0];
        ops.tally(2, 0, 2, 0);
        let (hi, lo) = quick_two_sum(p, e, &mut ops);
        ops.commit();
        Md { limbs: [hi, lo] }
    }

    fn scale_pow2(self, factor: f64) -> Self {
        debug_assert_eq!(factor.abs().log2().fract(), 0.0);
        let mut ops = Ops::default();
        ops.tally(0, 0, 2, 0);
        ops.commit();
        Md { limbs: [self.limbs[0] * factor, self.limbs[1] * factor] }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{is_normalized, Dd, MultiDouble};
    use crate::tally;

    #[test]
    fn mul_cost_is_the_recorded_constant() {
        // One double-double product: 6 additions, 9 subtractions,
        // 9 multiplications. See `costs` for how this relates to the
        // published count of 23.
        let a = Dd::from_f64(1.1);
        let b = Dd::from_f64(2.3);
        let before = tally::local_snapshot();
        let _ = a.mul(b);
        let delta = tally::local_snapshot().since(&before);
        assert_eq!(
            (delta.additions, delta.subtractions, delta.multiplications, delta.divisions),
            (6, 9, 9, 0)
        );
    }

    #[test]
    fn add_cost_is_twenty() {
        let a = Dd::from_f64(1.1);
        let b = Dd::from_f64(2.3);
        let before = tally::local_snapshot();
        let _ = a.add(b);
        assert_eq!(tally::local_snapshot().since(&before).total(), 20);
    }

    #[test]
    fn results_stay_normalized() {
        let a = Dd::renormalize(&[1.0 / 3.0, 1.0e-20]);
        let b = Dd::renormalize(&[7.0, -3.0e-18]);
        for v in [a.add(b), a.mul(b), a.sub(b), a.div(b)] {
            assert!(is_normalized(v.limbs()), "{v:?}");
        }
    }
}
