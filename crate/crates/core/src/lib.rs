//! Truncated Taylor series solutions of monomial systems by linearized
//! Newton iteration, in multiple-double precision, with per-kernel-class
//! operation and time accounting.
//!
//! The pipeline: [`sysgen`] builds test systems with known exponential-series
//! solutions; [`evaldiff`] evaluates and differentiates them at series
//! vectors with reverse-mode convolutions; [`linsolve`] solves the linearized
//! block-Toeplitz stages by Householder least squares; [`newton`] drives the
//! staggered-order iteration and fills a [`ledger::KernelLedger`]. The scalar
//! layer lives in [`md`] (real multiple doubles) and [`complex`].

pub mod check;
pub mod complex;
pub mod evaldiff;
pub mod jsonio;
pub mod ledger;
pub mod linsolve;
pub mod series;
pub mod sysgen;
pub mod md;
pub mod newton;
pub mod tally;

pub use md::{Dd, Md, MdError, MultiDouble, Od, Precision, Qd, D1};
pub use tally::OpCounter;
