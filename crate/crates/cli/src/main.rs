//! Experiment harness: `run` solves one generated system and writes a
//! machine-readable report, `sweep` repeats it along one axis into a CSV
//! table, `verify` executes the built-in oracle suites.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mdnewton_cli::config::RunConfig;
use mdnewton_cli::sweep::SweepAxis;
use mdnewton_cli::{run, sweep};

#[derive(Parser)]
#[command(
    name = "mdnewton",
    about = "Taylor series solutions of monomial systems by staggered Newton iteration \
             in multiple-double precision, with per-kernel operation and time accounting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one generated system and report convergence, accuracy and the
    /// kernel ledger.
    Run {
        #[command(flatten)]
        config: RunConfig,

        /// Write the full JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,

        /// Write the convergence log as JSON lines here.
        #[arg(long)]
        log: Option<PathBuf>,

        /// Suppress the per-iteration console output.
        #[arg(long, default_value_t = false)]
        quiet: bool,
    },

    /// Run one experiment per value of the chosen axis and emit a CSV table.
    Sweep {
        #[command(flatten)]
        config: RunConfig,

        /// Axis to vary: precision, order or dim.
        #[arg(long)]
        axis: String,

        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',')]
        values: Vec<String>,

        /// Write the CSV here (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Run the built-in oracle suites and print a pass/fail matrix.
    Verify {
        /// Seed of the randomized suites.
        #[arg(long, default_value_t = 2024)]
        seed: u64,

        /// Random sample pairs per operation and precision in the
        /// exact-arithmetic suite.
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            use clap::error::ErrorKind;
            let kind = e.kind();
            let _ = e.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };

    match cli.command {
        Command::Run { config, report, log, quiet } => cmd_run(config, report, log, quiet),
        Command::Sweep { config, axis, values, out } => cmd_sweep(config, axis, values, out),
        Command::Verify { seed, samples } => cmd_verify(seed, samples),
    }
}

fn cmd_run(
    config: RunConfig,
    report_path: Option<PathBuf>,
    log_path: Option<PathBuf>,
    quiet: bool,
) -> ExitCode {
    if let Err(e) = config.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if let Some(w) = config.precision_warning() {
        eprintln!("warning: {w}");
    }

    let artifacts = match run::execute(&config) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let report = &artifacts.report;

    if !quiet {
        for record in &report.log {
            println!(
                "iter {:>3}  order {:>3}  |b| {:>12.5e}  |dx| {:>12.5e}  stages {:?}",
                record.iteration, record.order, record.b_norm, record.dx_norm, record.stages_solved
            );
        }
    }
    println!(
        "{}: {} in {} iterations, forward error {:.3e}, {} kernel ops in {:.3}s wall",
        report.config.precision,
        if report.converged { "converged" } else { "NOT converged" },
        report.iterations,
        report.forward_error,
        report.ledger.total_kernel_ops,
        report.wall_seconds
    );
    for class in &report.ledger.classes {
        println!(
            "  {:>12}: {:>7} calls  {:>16} ops  {:>9.4}s  {:>6.2}%  {:>8.3} Gflop/s",
            class.name,
            class.invocations,
            class.total_ops,
            class.seconds,
            class.percent_time,
            class.gigaflops
        );
    }

    if let Some(path) = report_path {
        if let Err(e) = std::fs::write(&path, report.to_json()) {
            eprintln!("error: cannot write report {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    if let Some(path) = log_path {
        if let Err(e) = std::fs::write(&path, report.log_jsonl()) {
            eprintln!("error: cannot write log {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }

    ExitCode::from(artifacts.exit_code as u8)
}

fn cmd_sweep(
    config: RunConfig,
    axis: String,
    values: Vec<String>,
    out: Option<PathBuf>,
) -> ExitCode {
    if let Err(e) = config.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let axis = match SweepAxis::parse(&axis) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let csv = sweep::sweep(&config, axis, &values);
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, csv) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
            println!("wrote {} rows to {}", values.len(), path.display());
        }
        None => print!("{csv}"),
    }
    ExitCode::SUCCESS
}

fn cmd_verify(seed: u64, samples: usize) -> ExitCode {
    let outcomes = vec![
        mdnewton::check::dyadic_suite(samples, seed),
        mdnewton::check::dense_toeplitz_suite(seed),
        mdnewton::check::gradient_suite(seed),
        mdnewton::check::exp_product_suite(seed),
    ];
    let mut all_ok = true;
    println!("{:<20} {:>8} {:>8}  result", "suite", "cases", "failures");
    for o in &outcomes {
        println!(
            "{:<20} {:>8} {:>8}  {}",
            o.name,
            o.cases,
            o.failures,
            if o.passed() { "PASS" } else { "FAIL" }
        );
        if !o.passed() {
            all_ok = false;
            eprint!("{}", o.detail);
        }
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
