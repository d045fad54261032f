//! Error-free transforms: the exact-rounding building blocks of all
//! multiple-double arithmetic.
//!
//! Each helper takes an [`Ops`] bill and charges exactly the hardware
//! operations it executes, so per-call costs of the routines built on top are
//! input-independent constants. No fused multiply-add is used; products are
//! split Dekker-style so the same instruction sequence runs on any host.

use crate::tally::Ops;

/// 2^27 + 1, the Dekker splitter for 53-bit doubles.
const SPLITTER: f64 = 134_217_729.0;

/// s = fl(a+b) and s + e = a + b exactly, for any finite a, b.
#[inline(always)]
pub fn two_sum(a: f64, b: f64, ops: &mut Ops) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    ops.tally(2, 4, 0, 0);
    (s, err)
}

/// Like [`two_sum`] but requires |a| >= |b| (or a = 0).
#[inline(always)]
pub fn quick_two_sum(a: f64, b: f64, ops: &mut Ops) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    ops.tally(1, 2, 0, 0);
    (s, err)
}

/// Split a double into high and low 26-bit halves with hi + lo = a exactly.
#[inline(always)]
pub fn split(a: f64, ops: &mut Ops) -> (f64, f64) {
    let t = SPLITTER * a;
    let hi = t - (t - a);
    let lo = a - hi;
    ops.tally(0, 3, 1, 0);
    (hi, lo)
}

/// p = fl(a*b) and p + e = a * b exactly.
#[inline(always)]
pub fn two_prod(a: f64, b: f64, ops: &mut Ops) -> (f64, f64) {
    let p = a * b;
    let (a_hi, a_lo) = split(a, ops);
    let (b_hi, b_lo) = split(b, ops);
    let err = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo;
    ops.tally(3, 1, 5, 0);
    (p, err)
}
