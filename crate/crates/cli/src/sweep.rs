//! Parameter sweeps: one run per axis value, results as a plot-ready CSV
//! table. Row failures are recorded in the status column and the sweep
//! continues.

use anyhow::{anyhow, Result};

use mdnewton::ledger::LedgerReport;

use crate::config::RunConfig;
use crate::run::execute;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    Precision,
    Order,
    Dim,
}

impl SweepAxis {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "precision" => Ok(SweepAxis::Precision),
            "order" => Ok(SweepAxis::Order),
            "dim" => Ok(SweepAxis::Dim),
            other => Err(anyhow!("unknown sweep axis {other:?} (use precision, order or dim)")),
        }
    }
}

pub const CSV_HEADER: &str = "axis,value,status,converged,iterations,\
conv_seconds,qr_seconds,qhb_seconds,bs_seconds,updates_seconds,residuals_seconds,\
total_kernel_seconds,wall_seconds,total_ops,gigaflops,forward_error,seed";

fn class_seconds(ledger: &LedgerReport, name: &str) -> f64 {
    ledger.class(name).map(|c| c.seconds).unwrap_or(0.0)
}

/// Run the sweep and return the CSV text (header always present; one row per
/// value).
pub fn sweep(base: &RunConfig, axis: SweepAxis, values: &[String]) -> String {
    let axis_name = match axis {
        SweepAxis::Precision => "precision",
        SweepAxis::Order => "order",
        SweepAxis::Dim => "dim",
    };
    let mut out = String::from(CSV_HEADER);
    out.push('\n');

    for value in values {
        let mut config = base.clone();
        let apply: Result<()> = (|| {
            match axis {
                SweepAxis::Precision => config.precision = value.clone(),
                SweepAxis::Order => config.order = value.parse().map_err(|_| anyhow!("bad order {value:?}"))?,
                SweepAxis::Dim => config.dim = value.parse().map_err(|_| anyhow!("bad dim {value:?}"))?,
            }
            Ok(())
        })();

        let row = match apply.and_then(|()| execute(&config)) {
            Ok(artifacts) => {
                let r = &artifacts.report;
                let total_seconds = r.ledger.total_kernel_seconds;
                let gigaflops = if total_seconds > 0.0 {
                    r.ledger.total_kernel_ops as f64 / total_seconds / 1.0e9
                } else {
                    0.0
                };
                format!(
                    "{axis_name},{value},ok,{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{},{:.3},{:e},{}",
                    r.converged,
                    r.iterations,
                    class_seconds(&r.ledger, "convolution"),
                    class_seconds(&r.ledger, "qr"),
                    class_seconds(&r.ledger, "qhb"),
                    class_seconds(&r.ledger, "bs"),
                    class_seconds(&r.ledger, "updates"),
                    class_seconds(&r.ledger, "residuals"),
                    total_seconds,
                    r.wall_seconds,
                    r.ledger.total_kernel_ops,
                    gigaflops,
                    r.forward_error,
                    r.config.seed,
                )
            }
            Err(e) => {
                let msg = e.to_string().replace([',', '\n'], ";");
                format!("{axis_name},{value},error: {msg},,,,,,,,,,,,,")
            }
        };
        out.push_str(&row);
        out.push('\n');
    }
    out
}
