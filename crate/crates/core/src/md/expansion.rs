//! Fixed-size expansion networks shared by the quad-double and octo-double
//! precisions. Every routine executes an input-independent instruction
//! sequence, so per-call operation counts are compile-time constants of the
//! limb count.

use super::eft::{two_prod, two_sum};
use crate::tally::Ops;

/// Largest scratch buffer any network needs: the octo-double product
/// accumulates 8*8 + 1 partial terms.
pub(crate) const MAX_TERMS: usize = 65;

/// One compression round: an exact bottom-up two_sum chain (VecSum), then a
/// top-down extraction of at most `out.len()` limbs. Residues that round to
/// zero are absorbed instead of emitted, so zeros only ever trail. The
/// branches route values; the operation count depends on the lengths alone.
fn compress_round(vals: &mut [f64], out: &mut [f64], ops: &mut Ops) {
    let m = vals.len();
    let k = out.len();
    debug_assert!(m >= 1 && k >= 1);

    let mut s = vals[m - 1];
    for i in (0..m - 1).rev() {
        let (hi, lo) = two_sum(vals[i], s, ops);
        s = hi;
        vals[i + 1] = lo;
    }
    vals[0] = s;

    out.fill(0.0);
    let mut j = 0usize;
    let mut acc = vals[0];
    for i in 1..m {
        let (hi, lo) = two_sum(acc, vals[i], ops);
        if j + 1 < k {
            if lo != 0.0 {
                out[j] = hi;
                j += 1;
                acc = lo;
            } else {
                acc = hi;
            }
        } else {
            // Final slot: residues below the last limb are rounded away.
            acc = hi;
        }
    }
    out[j] = acc;
}

/// Extra limbs carried between the two compression rounds. They absorb the
/// slot waste of nearly-overlapping neighbours so no representable mass is
/// dropped early.
const GUARD_LIMBS: usize = 4;

/// Order by decreasing magnitude. The callers' term arrays are already
/// nearly sorted (interleaved limb ladders, per-diagonal products), so a
/// plain insertion sort beats a general sort by a wide margin; comparisons
/// are not arithmetic and are not charged.
fn sort_by_magnitude(vals: &mut [f64]) {
    for i in 1..vals.len() {
        let v = vals[i];
        let key = v.abs();
        let mut j = i;
        while j > 0 && vals[j - 1].abs() < key {
            vals[j] = vals[j - 1];
            j -= 1;
        }
        vals[j] = v;
    }
}

/// Compress `vals[..m]` into `K` nonoverlapping limbs, most significant
/// first.
///
/// The terms are ordered by decreasing magnitude first (comparisons only, no
/// arithmetic), compressed into `K + 4` guarded limbs, and compressed once
/// more to restore the strict half-ulp separation. Sorting keeps the
/// extraction dense: same-window terms merge exactly instead of spending an
/// output slot.
pub(crate) fn renorm_vals<const K: usize>(vals: &mut [f64], ops: &mut Ops) -> [f64; K] {
    sort_by_magnitude(vals);
    renorm_presorted::<K>(vals, ops)
}

/// The compression rounds without the ordering pass, for callers whose terms
/// already descend in magnitude (sorted merges, regular-ladder products).
fn renorm_presorted<const K: usize>(vals: &mut [f64], ops: &mut Ops) -> [f64; K] {
    // Stack buffer sized for the widest precision (8 limbs) plus guards.
    let mut mid = [0.0; 8 + GUARD_LIMBS];
    let width = K + GUARD_LIMBS;
    compress_round(vals, &mut mid[..width], ops);
    let mut out = [0.0; K];
    compress_round(&mut mid[..width], &mut out, ops);
    out
}

/// True when consecutive limbs descend by no more than 60 binades, so the
/// diagonals of a product stay within one extraction window. Values with
/// wider interior gaps route through the sorting renormalization.
fn regular_ladder(limbs: &[f64]) -> bool {
    const GAP: f64 = 8.673617379884035e-19; // 2^-60
    for pair in limbs.windows(2) {
        if pair[1] == 0.0 {
            // Zeros only trail in normalized values.
            return true;
        }
        if pair[1].abs() < pair[0].abs() * GAP {
            return false;
        }
    }
    true
}

/// Sum of two K-limb expansions: merge the two (already sorted) limb ladders
/// by decreasing magnitude, then renormalize. The merge is comparisons only.
pub(crate) fn exp_add<const K: usize>(a: &[f64; K], b: &[f64; K], ops: &mut Ops) -> [f64; K] {
    let mut merged = [0.0; MAX_TERMS];
    let (mut i, mut j) = (0usize, 0usize);
    for slot in merged[..2 * K].iter_mut() {
        let take_a = if i == K {
            false
        } else if j == K {
            true
        } else {
            a[i].abs() >= b[j].abs()
        };
        if take_a {
            *slot = a[i];
            i += 1;
        } else {
            *slot = b[j];
            j += 1;
        }
    }
    renorm_presorted::<K>(&mut merged[..2 * K], ops)
}

/// Product of two K-limb expansions.
///
/// Partial products on diagonals i+j < K are formed exactly with two_prod,
/// their error terms carried one diagonal down; the K-th diagonal is folded in
/// with plain multiplications. Terms are laid out by diagonal so the
/// renormalization sees them in decreasing magnitude order.
pub(crate) fn exp_mul<const K: usize>(a: &[f64; K], b: &[f64; K], ops: &mut Ops) -> [f64; K] {
    let regular = regular_ladder(a) && regular_ladder(b);
    let mut terms = [0.0; MAX_TERMS];
    let mut errs = [0.0; MAX_TERMS];
    let mut pos = 0usize;

    for m in 0..K {
        // Errors produced on the previous diagonal belong to this one.
        for e in 0..m {
            terms[pos + m + 1 + e] = errs[e];
        }
        for i in 0..=m {
            let (p, e) = two_prod(a[i], b[m - i], ops);
            terms[pos + i] = p;
            errs[i] = e;
        }
        pos += 2 * m + 1;
    }

    // Diagonal K: plain products plus the errors spilled from diagonal K-1,
    // accumulated into a single closing term.
    let mut tail = errs[0];
    for e in 1..K {
        tail += errs[e];
        ops.tally(1, 0, 0, 0);
    }
    for i in 1..K {
        tail += a[i] * b[K - i];
        ops.tally(1, 0, 1, 0);
    }
    terms[pos] = tail;
    pos += 1;

    if regular {
        renorm_presorted::<K>(&mut terms[..pos], ops)
    } else {
        renorm_vals::<K>(&mut terms[..pos], ops)
    }
}
