//! Run configuration: every knob that determines a run, echoed verbatim into
//! the report so seed + config reproduce it.

use clap::Args;
use serde::{Deserialize, Serialize};

use mdnewton::md::Precision;
use mdnewton::sysgen::AlphaMode;

#[derive(Clone, Debug, Args, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    /// Number of equations and variables.
    #[arg(long, default_value_t = 4)]
    pub dim: usize,

    /// Truncation order of the series (coefficients of t^0..t^(order-1)).
    #[arg(long, default_value_t = 8)]
    pub order: usize,

    /// Working precision: d, dd, qd or od.
    #[arg(long, default_value = "dd")]
    pub precision: String,

    /// Monomial columns: 1 (lower-triangular ones) or 2 (the triangular
    /// lower/upper pair).
    #[arg(long, default_value_t = 1)]
    pub columns: u8,

    /// How the solution exponents are drawn: real-near-one or unit-complex.
    #[arg(long, default_value = "unit-complex")]
    pub alpha_mode: String,

    /// Width of the real-near-one interval.
    #[arg(long, default_value_t = 0.1)]
    pub alpha_delta: f64,

    /// Damping factor for the series parameter, in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub delta_t: f64,

    /// Seed for every random draw of the run.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,

    /// Iteration budget.
    #[arg(long, default_value_t = 24)]
    pub max_iters: usize,

    /// Absolute tolerance override; default is 1e3 times the unit roundoff.
    #[arg(long)]
    pub tolerance: Option<f64>,

    /// Equations entering the monitoring residual (0 = all).
    #[arg(long, default_value_t = 0)]
    pub residual_sample: usize,

    /// Worker threads for the parallel kernels; defaults to
    /// MDNEWTON_THREADS or the number of CPUs.
    #[arg(long)]
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn precision_enum(&self) -> Result<Precision, String> {
        Precision::from_label(&self.precision)
            .ok_or_else(|| format!("unknown precision {:?} (use d, dd, qd or od)", self.precision))
    }

    pub fn alpha_mode_enum(&self) -> Result<AlphaMode, String> {
        match self.alpha_mode.as_str() {
            "real-near-one" => Ok(AlphaMode::RealNearOne { delta: self.alpha_delta }),
            "unit-complex" => Ok(AlphaMode::UnitComplex),
            other => Err(format!(
                "unknown alpha mode {other:?} (use real-near-one or unit-complex)"
            )),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        self.precision_enum()?;
        self.alpha_mode_enum()?;
        if self.dim == 0 {
            return Err("dim must be at least 1".into());
        }
        if self.order == 0 {
            return Err("order must be at least 1".into());
        }
        if !(self.columns == 1 || self.columns == 2) {
            return Err("columns must be 1 or 2".into());
        }
        if !(self.delta_t > 0.0 && self.delta_t <= 1.0) {
            return Err("delta-t must lie in (0, 1]".into());
        }
        if self.threads == Some(0) {
            return Err("threads must be at least 1".into());
        }
        Ok(())
    }

    pub fn resolved_threads(&self) -> usize {
        self.threads
            .or_else(|| {
                std::env::var("MDNEWTON_THREADS")
                    .ok()
                    .and_then(|v| v.parse().ok())
            })
            .unwrap_or_else(|| {
                std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
            })
            .max(1)
    }

    /// The precision warning of the invariants: accuracy is no longer
    /// guaranteed when the configured precision falls short of the order's
    /// recommendation.
    pub fn precision_warning(&self) -> Option<String> {
        let configured = self.precision_enum().ok()?;
        match mdnewton::sysgen::recommend_precision(self.order) {
            None => Some(format!(
                "order {} exceeds the octo-double guarantee; accuracy is no longer guaranteed",
                self.order
            )),
            Some(rec) if rec.limbs() > configured.limbs() => Some(format!(
                "order {} recommends {} precision but {} is configured; accuracy is no longer guaranteed",
                self.order,
                rec.label(),
                configured.label()
            )),
            Some(_) => None,
        }
    }
}
