//! Hardware double-operation counters.
//!
//! Every multiple-double routine reports how many double additions,
//! subtractions, multiplications and divisions it executed. Counts are
//! accumulated per thread so that parallel kernels never contend on a shared
//! counter; totals are merged on demand from a registry of per-thread slabs.
//! A separate counter tracks series coefficient multiplications performed by
//! padded convolutions.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

/// Accumulated double-operation counts, in units of hardware operations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounter {
    pub additions: u64,
    pub subtractions: u64,
    pub multiplications: u64,
    pub divisions: u64,
}

impl OpCounter {
    pub const fn new(additions: u64, subtractions: u64, multiplications: u64, divisions: u64) -> Self {
        OpCounter { additions, subtractions, multiplications, divisions }
    }

    /// Total operation count across the four classes.
    pub const fn total(&self) -> u64 {
        self.additions + self.subtractions + self.multiplications + self.divisions
    }

    pub const fn plus(&self, other: &OpCounter) -> OpCounter {
        OpCounter {
            additions: self.additions + other.additions,
            subtractions: self.subtractions + other.subtractions,
            multiplications: self.multiplications + other.multiplications,
            divisions: self.divisions + other.divisions,
        }
    }

    /// Counts accumulated since `earlier`. Counters are monotone, so this
    /// saturates at zero rather than wrapping.
    pub fn since(&self, earlier: &OpCounter) -> OpCounter {
        OpCounter {
            additions: self.additions.saturating_sub(earlier.additions),
            subtractions: self.subtractions.saturating_sub(earlier.subtractions),
            multiplications: self.multiplications.saturating_sub(earlier.multiplications),
            divisions: self.divisions.saturating_sub(earlier.divisions),
        }
    }
}

/// Straight-line op bill for one arithmetic routine, accumulated in registers
/// and flushed to the thread slab once per public operation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Ops {
    pub add: u64,
    pub sub: u64,
    pub mul: u64,
    pub div: u64,
}

impl Ops {
    #[inline(always)]
    pub fn tally(&mut self, add: u64, sub: u64, mul: u64, div: u64) {
        self.add += add;
        self.sub += sub;
        self.mul += mul;
        self.div += div;
    }

    /// Flush the accumulated bill to this thread's counters.
    #[inline]
    pub fn commit(self) {
        with_slab(|slab| {
            slab.bump(&slab.additions, self.add);
            slab.bump(&slab.subtractions, self.sub);
            slab.bump(&slab.multiplications, self.mul);
            slab.bump(&slab.divisions, self.div);
        });
    }
}

struct ThreadSlab {
    additions: AtomicU64,
    subtractions: AtomicU64,
    multiplications: AtomicU64,
    divisions: AtomicU64,
    conv_coeff_muls: AtomicU64,
}

impl ThreadSlab {
    fn new() -> Self {
        ThreadSlab {
            additions: AtomicU64::new(0),
            subtractions: AtomicU64::new(0),
            multiplications: AtomicU64::new(0),
            divisions: AtomicU64::new(0),
            conv_coeff_muls: AtomicU64::new(0),
        }
    }

    // Only the owning thread writes a slab, so a plain load/store pair is
    // enough; visibility to other threads is established by the fork/join
    // edges of the parallel kernels.
    #[inline(always)]
    fn bump(&self, cell: &AtomicU64, by: u64) {
        if by != 0 {
            cell.store(cell.load(Ordering::Relaxed) + by, Ordering::Relaxed);
        }
    }
}

fn registry() -> &'static Mutex<Vec<Arc<ThreadSlab>>> {
    static REGISTRY: OnceLock<Mutex<Vec<Arc<ThreadSlab>>>> = OnceLock::new();
    REGISTRY.get_or_init(|| Mutex::new(Vec::new()))
}

thread_local! {
    static SLAB: Arc<ThreadSlab> = {
        let slab = Arc::new(ThreadSlab::new());
        registry().lock().expect("tally registry poisoned").push(Arc::clone(&slab));
        slab
    };
}

#[inline]
fn with_slab<R>(f: impl FnOnce(&ThreadSlab) -> R) -> R {
    SLAB.with(|slab| f(slab))
}

/// Record `n` coefficient multiplications performed by a padded convolution.
#[inline]
pub fn count_conv_muls(n: u64) {
    with_slab(|slab| slab.bump(&slab.conv_coeff_muls, n));
}

/// Sum of all per-thread double-operation counters.
pub fn snapshot() -> OpCounter {
    let mut out = OpCounter::default();
    for slab in registry().lock().expect("tally registry poisoned").iter() {
        out.additions += slab.additions.load(Ordering::Relaxed);
        out.subtractions += slab.subtractions.load(Ordering::Relaxed);
        out.multiplications += slab.multiplications.load(Ordering::Relaxed);
        out.divisions += slab.divisions.load(Ordering::Relaxed);
    }
    out
}

/// Sum of all per-thread convolution coefficient-multiplication counters.
pub fn conv_muls_snapshot() -> u64 {
    registry()
        .lock()
        .expect("tally registry poisoned")
        .iter()
        .map(|slab| slab.conv_coeff_muls.load(Ordering::Relaxed))
        .sum()
}

/// This thread's counters only. Useful in single-threaded tests where other
/// test threads would otherwise pollute a global snapshot.
pub fn local_snapshot() -> OpCounter {
    with_slab(|slab| OpCounter {
        additions: slab.additions.load(Ordering::Relaxed),
        subtractions: slab.subtractions.load(Ordering::Relaxed),
        multiplications: slab.multiplications.load(Ordering::Relaxed),
        divisions: slab.divisions.load(Ordering::Relaxed),
    })
}

/// This thread's convolution multiplication counter.
pub fn local_conv_muls() -> u64 {
    with_slab(|slab| slab.conv_coeff_muls.load(Ordering::Relaxed))
}
