//! The machine-readable run report: everything needed to reproduce and audit
//! one run, with limb-exact solution encoding.

use serde::{Deserialize, Serialize};

use mdnewton::jsonio::{ComplexRepr, SeriesVecRepr};
use mdnewton::ledger::LedgerReport;
use mdnewton::newton::IterationRecord;
use mdnewton::tally::OpCounter;

use crate::config::RunConfig;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Environment {
    pub package_version: String,
    pub threads: usize,
    pub os: String,
    pub arch: String,
}

impl Environment {
    pub fn current(threads: usize) -> Self {
        Environment {
            package_version: env!("CARGO_PKG_VERSION").to_string(),
            threads,
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
        }
    }
}

/// Ratio estimate of the nearest singularity for one solution component.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FabryEstimate {
    pub component: usize,
    /// The ratio of the last two coefficients, limb-exact, when defined.
    pub z: Option<ComplexRepr>,
    pub z_dec: Option<(f64, f64)>,
    pub radius: Option<f64>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub environment: Environment,
    pub warnings: Vec<String>,
    pub converged: bool,
    pub iterations: usize,
    pub tolerance: f64,
    /// Max over k of the 1-norm distance between computed and exact
    /// coefficient vectors.
    pub forward_error: f64,
    pub final_b_norm: f64,
    /// Smallest diagonal modulus of R: rank-deficiency report.
    pub min_r_diag: f64,
    pub wall_seconds: f64,
    pub run_ops: OpCounter,
    pub run_ops_total: u64,
    pub ledger: LedgerReport,
    pub fabry: Vec<FabryEstimate>,
    pub log: Vec<IterationRecord>,
    /// The computed solution series, hex-exact.
    pub solution: SeriesVecRepr,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// The convergence log as line-oriented JSON.
    pub fn log_jsonl(&self) -> String {
        let mut out = String::new();
        for record in &self.log {
            out.push_str(&serde_json::to_string(record).expect("record serializes"));
            out.push('\n');
        }
        out
    }
}
