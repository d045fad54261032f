//! The staggered-order Newton driver: order schedule, stage activation,
//! convergence tests and kernel-class accounting.
//!
//! Each iteration evaluates the system at the current truncation order,
//! retires the prefix of stages whose residual coefficient vectors are below
//! tolerance, advances the order once the whole active window has converged,
//! and solves the remaining stages through the block-Toeplitz forward
//! substitution. Retired stages are never touched again, so their
//! coefficient vectors are bitwise frozen.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evaldiff::{evaluate_system, EvalError};
use crate::ledger::{KernelClass, KernelLedger};
use crate::linsolve::{householder_qr, residual, stage_norm, toeplitz_solve, QRFactors, SolveError};
use crate::md::MultiDouble;
use crate::series::{coeff_norm, SeriesVec};
use crate::sysgen::MonomialSystem;
use crate::tally::{self, OpCounter};

#[derive(Clone, Copy, Debug, PartialEq, Error)]
pub enum NewtonError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// The staggered truncation orders: d := d + 1 + floor(d/2) from 1, capped at
/// `d_max` (the final entry is always `d_max`).
pub fn staggered_orders(d_max: usize) -> Vec<usize> {
    assert!(d_max >= 1);
    let mut orders = Vec::new();
    let mut d = 1usize;
    while d < d_max {
        orders.push(d);
        d = d + 1 + d / 2;
    }
    orders.push(d_max);
    orders
}

/// Order progression plus the iteration budget and tolerance of one run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Schedule {
    pub orders: Vec<usize>,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Schedule {
    pub fn staggered(d_max: usize, max_iterations: usize, tolerance: f64) -> Self {
        Schedule { orders: staggered_orders(d_max), max_iterations, tolerance }
    }
}

/// Tuning knobs of [`run_newton`]. The defaults follow the experiment family:
/// 24 iterations, absolute tolerance 1e3 times the unit roundoff, full
/// residual monitoring.
#[derive(Clone, Copy, Debug)]
pub struct NewtonConfig {
    pub max_iterations: usize,
    /// Absolute tolerance on coefficient-vector norms; `None` selects
    /// 1e3 * eps of the working precision.
    pub tolerance: Option<f64>,
    /// Number of equations entering the monitoring residual (0 = all).
    pub residual_sample: usize,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig { max_iterations: 24, tolerance: None, residual_sample: 0 }
    }
}

/// Cumulative per-class seconds snapshot embedded in the iteration log.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassSeconds {
    pub name: String,
    pub seconds: f64,
}

/// One line of the convergence log.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub order: usize,
    /// Highest stage index such that every stage at or below it has
    /// converged; -1 when none has.
    pub converged_through: i64,
    pub qr_refactored: bool,
    pub stages_solved: Vec<usize>,
    pub stage_b_norms: Vec<f64>,
    pub stage_dx_norms: Vec<f64>,
    pub b_norm: f64,
    pub dx_norm: f64,
    pub residual: Option<f64>,
    pub class_seconds: Vec<ClassSeconds>,
}

/// Result of one Newton run. `converged` is false when the iteration budget
/// ran out; the best state is still returned.
#[derive(Clone, Debug)]
pub struct NewtonOutcome<T: MultiDouble> {
    pub converged: bool,
    pub iterations: usize,
    pub x: SeriesVec<T>,
    pub ledger: KernelLedger,
    pub log: Vec<IterationRecord>,
    /// Global double-operation delta over the whole run; equals the ledger
    /// total when every kernel is charged to a class.
    pub run_ops: OpCounter,
    /// Smallest diagonal modulus seen in R: the rank-deficiency report.
    pub min_r_diag: f64,
    pub tolerance: f64,
}

fn class_seconds(ledger: &KernelLedger) -> Vec<ClassSeconds> {
    KernelClass::ALL
        .iter()
        .map(|&c| ClassSeconds { name: c.name().to_string(), seconds: ledger.class(c).seconds })
        .collect()
}

/// Run the staggered Newton iteration on `sys` from the starting series `x0`
/// (leading coefficient roughly half-precision correct), computing the
/// solution through truncation order `d_max`.
pub fn run_newton<T: MultiDouble>(
    sys: &MonomialSystem<T>,
    x0: &SeriesVec<T>,
    d_max: usize,
    config: &NewtonConfig,
) -> Result<NewtonOutcome<T>, NewtonError> {
    assert!(d_max >= 1 && d_max <= sys.order());
    let n = sys.dim();
    let tolerance = config.tolerance.unwrap_or(1.0e3 * T::eps());
    let schedule = staggered_orders(d_max);

    // Working series at full order; coefficients above x0's order start zero.
    let mut x = SeriesVec::zeros(n, d_max);
    for k in 0..x0.order().min(d_max) {
        for i in 0..n {
            x.coeff_mut(k).set(i, x0.coeff(k).get(i));
        }
    }

    let ops_before = tally::snapshot();
    let mut ledger = KernelLedger::new();
    let mut log = Vec::new();

    let mut order_idx = 0usize;
    let mut d_cur = schedule[order_idx];
    let mut k_star: i64 = -1;
    let mut factors: Option<QRFactors<T>> = None;
    let mut refactor_needed = true;
    let mut min_r_diag = f64::INFINITY;

    let finish = |converged: bool,
                  iterations: usize,
                  x: SeriesVec<T>,
                  ledger: KernelLedger,
                  log: Vec<IterationRecord>,
                  min_r_diag: f64| {
        let run_ops = tally::snapshot().since(&ops_before);
        Ok(NewtonOutcome {
            converged,
            iterations,
            x,
            ledger,
            log,
            run_ops,
            min_r_diag: if min_r_diag.is_finite() { min_r_diag } else { 0.0 },
            tolerance,
        })
    };

    for iteration in 1..=config.max_iterations {
        let (mut a, mut b) =
            ledger.record(KernelClass::Convolution, || evaluate_system(sys, &x, d_cur))?;
        let mut stage_norms: Vec<f64> = (0..d_cur)
            .map(|k| stage_norm(b.coeff(k), &mut ledger).to_f64())
            .collect();
        while k_star + 1 < d_cur as i64 && stage_norms[(k_star + 1) as usize] < tolerance {
            k_star += 1;
        }

        // The whole window converged: either done, or grow the order and
        // evaluate the freshly exposed stages.
        if k_star == d_cur as i64 - 1 {
            if d_cur == d_max {
                log.push(IterationRecord {
                    iteration,
                    order: d_cur,
                    converged_through: k_star,
                    qr_refactored: false,
                    stages_solved: Vec::new(),
                    stage_b_norms: stage_norms.clone(),
                    stage_dx_norms: Vec::new(),
                    b_norm: stage_norms.iter().cloned().fold(0.0, f64::max),
                    dx_norm: 0.0,
                    residual: None,
                    class_seconds: class_seconds(&ledger),
                });
                return finish(true, iteration, x, ledger, log, min_r_diag);
            }
            order_idx += 1;
            d_cur = schedule[order_idx];
            let fresh = ledger.record(KernelClass::Convolution, || evaluate_system(sys, &x, d_cur))?;
            a = fresh.0;
            b = fresh.1;
            stage_norms = (0..d_cur)
                .map(|k| stage_norm(b.coeff(k), &mut ledger).to_f64())
                .collect();
            while k_star + 1 < d_cur as i64 && stage_norms[(k_star + 1) as usize] < tolerance {
                k_star += 1;
            }
            if k_star == d_cur as i64 - 1 && d_cur == d_max {
                log.push(IterationRecord {
                    iteration,
                    order: d_cur,
                    converged_through: k_star,
                    qr_refactored: false,
                    stages_solved: Vec::new(),
                    stage_b_norms: stage_norms.clone(),
                    stage_dx_norms: Vec::new(),
                    b_norm: stage_norms.iter().cloned().fold(0.0, f64::max),
                    dx_norm: 0.0,
                    residual: None,
                    class_seconds: class_seconds(&ledger),
                });
                return finish(true, iteration, x, ledger, log, min_r_diag);
            }
        }

        let active = (k_star + 1) as usize..d_cur;
        let mut qr_refactored = false;
        if factors.is_none() || refactor_needed {
            let a0 = a.leading();
            let f = ledger.record(KernelClass::Qr, || householder_qr(&a0, n));
            min_r_diag = min_r_diag.min(f.min_diag_modulus());
            factors = Some(f);
            qr_refactored = true;
        }
        let f = factors.as_ref().expect("factors exist after refactor check");

        let mut stages_solved = Vec::new();
        let mut stage_dx_norms = Vec::new();
        let mut dx_norm = 0.0f64;
        let mut residual_val = None;

        if !active.is_empty() {
            let dx = toeplitz_solve(&a, &b, f, active.clone(), &mut ledger)?;
            residual_val =
                Some(residual(&a, &dx, &b, config.residual_sample, &mut ledger)?.to_f64());

            for k in active.clone() {
                let norm = stage_norm(dx.coeff(k), &mut ledger).to_f64();
                stages_solved.push(k);
                stage_dx_norms.push(norm);
                dx_norm = dx_norm.max(norm);
            }

            // The refactor policy: solving stage 0 again with a correction
            // beyond sqrt(eps) of the leading coefficient means the Jacobian
            // the factors came from is stale.
            if active.start == 0 {
                let x0_norm = ledger
                    .record(KernelClass::Residuals, || coeff_norm(x.coeff(0)))
                    .to_f64();
                refactor_needed = stage_dx_norms[0] > T::eps().sqrt() * x0_norm.max(1.0e-300);
            } else {
                refactor_needed = false;
            }

            ledger.record(KernelClass::Updates, || {
                for k in active.clone() {
                    for i in 0..n {
                        let sum = x.coeff(k).get(i).add(dx.coeff(k).get(i));
                        x.coeff_mut(k).set(i, sum);
                    }
                }
            });
        }

        log.push(IterationRecord {
            iteration,
            order: d_cur,
            converged_through: k_star,
            qr_refactored,
            stages_solved,
            stage_dx_norms,
            b_norm: stage_norms.iter().cloned().fold(0.0, f64::max),
            stage_b_norms: stage_norms,
            dx_norm,
            residual: residual_val,
            class_seconds: class_seconds(&ledger),
        });

        // Secondary exit: the whole correction at full order fell below
        // tolerance.
        if d_cur == d_max && !log.last().unwrap().stages_solved.is_empty() && dx_norm < tolerance {
            return finish(true, iteration, x, ledger, log, min_r_diag);
        }
    }

    finish(false, config.max_iterations, x, ledger, log, min_r_diag)
}
