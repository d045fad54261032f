//! Per-kernel-class accounting: invocation counts, double-operation counts
//! and wall time for the six kernel classes of the solver.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::tally::{self, OpCounter};

/// The six instrumentation categories. The set is fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelClass {
    /// Evaluation and differentiation.
    Convolution,
    /// Householder QR factorization.
    Qr,
    /// Multiplications of the conjugated Q with a right-hand side.
    Qhb,
    /// Back substitutions.
    Bs,
    /// Right-hand-side updates b := b - A x.
    Updates,
    /// Residual and convergence-norm computations.
    Residuals,
}

impl KernelClass {
    pub const ALL: [KernelClass; 6] = [
        KernelClass::Convolution,
        KernelClass::Qr,
        KernelClass::Qhb,
        KernelClass::Bs,
        KernelClass::Updates,
        KernelClass::Residuals,
    ];

    pub const fn name(self) -> &'static str {
        match self {
            KernelClass::Convolution => "convolution",
            KernelClass::Qr => "qr",
            KernelClass::Qhb => "qhb",
            KernelClass::Bs => "bs",
            KernelClass::Updates => "updates",
            KernelClass::Residuals => "residuals",
        }
    }

    const fn index(self) -> usize {
        match self {
            KernelClass::Convolution => 0,
            KernelClass::Qr => 1,
            KernelClass::Qhb => 2,
            KernelClass::Bs => 3,
            KernelClass::Updates => 4,
            KernelClass::Residuals => 5,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct ClassStats {
    pub invocations: u64,
    pub ops: OpCounter,
    pub seconds: f64,
}

/// Accumulated per-class counters for one solver run. Regions must not nest;
/// the driver is single-threaded orchestration over internally parallel
/// kernels, so at most one region is open at a time.
#[derive(Clone, Debug, Default)]
pub struct KernelLedger {
    stats: [ClassStats; 6],
    conv_coeff_muls: u64,
}

impl KernelLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Run `f` under `class`, charging its wall time and every double
    /// operation performed on any thread while it runs.
    pub fn record<R>(&mut self, class: KernelClass, f: impl FnOnce() -> R) -> R {
        let ops_before = tally::snapshot();
        let conv_before = tally::conv_muls_snapshot();
        let start = Instant::now();
        let out = f();
        let elapsed = start.elapsed().as_secs_f64();
        let ops = tally::snapshot().since(&ops_before);
        let stats = &mut self.stats[class.index()];
        stats.invocations += 1;
        stats.ops = stats.ops.plus(&ops);
        stats.seconds += elapsed;
        if class == KernelClass::Convolution {
            self.conv_coeff_muls += tally::conv_muls_snapshot() - conv_before;
        }
        out
    }

    pub fn class(&self, class: KernelClass) -> &ClassStats {
        &self.stats[class.index()]
    }

    /// Coefficient multiplications performed by padded convolutions inside
    /// convolution regions.
    pub fn conv_coeff_muls(&self) -> u64 {
        self.conv_coeff_muls
    }

    pub fn total_ops(&self) -> u64 {
        self.stats.iter().map(|s| s.ops.total()).sum()
    }

    pub fn total_seconds(&self) -> f64 {
        self.stats.iter().map(|s| s.seconds).sum()
    }

    pub fn merge(&mut self, other: &KernelLedger) {
        for (mine, theirs) in self.stats.iter_mut().zip(&other.stats) {
            mine.invocations += theirs.invocations;
            mine.ops = mine.ops.plus(&theirs.ops);
            mine.seconds += theirs.seconds;
        }
        self.conv_coeff_muls += other.conv_coeff_muls;
    }

    pub fn report(&self) -> LedgerReport {
        let total_seconds = self.total_seconds();
        let classes = KernelClass::ALL
            .iter()
            .map(|&c| {
                let s = self.class(c);
                ClassReport {
                    name: c.name().to_string(),
                    invocations: s.invocations,
                    ops: s.ops,
                    total_ops: s.ops.total(),
                    seconds: s.seconds,
                    percent_time: if total_seconds > 0.0 {
                        100.0 * s.seconds / total_seconds
                    } else {
                        0.0
                    },
                    gigaflops: if s.seconds > 0.0 {
                        s.ops.total() as f64 / s.seconds / 1.0e9
                    } else {
                        0.0
                    },
                }
            })
            .collect();
        LedgerReport {
            classes,
            total_kernel_ops: self.total_ops(),
            total_kernel_seconds: total_seconds,
            conv_coeff_muls: self.conv_coeff_muls,
        }
    }
}

/// Serializable summary: per-class times, operation counts, percentages of
/// the total kernel time, and derived gigaflop rates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LedgerReport {
    pub classes: Vec<ClassReport>,
    pub total_kernel_ops: u64,
    pub total_kernel_seconds: f64,
    pub conv_coeff_muls: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassReport {
    pub name: String,
    pub invocations: u64,
    pub ops: OpCounter,
    pub total_ops: u64,
    pub seconds: f64,
    pub percent_time: f64,
    pub gigaflops: f64,
}

impl LedgerReport {
    pub fn class(&self, name: &str) -> Option<&ClassReport> {
        self.classes.iter().find(|c| c.name == name)
    }
}
