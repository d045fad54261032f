//! Library surface of the experiment harness, shared by the `mdnewton`
//! binary and its integration tests.

pub mod config;
pub mod report;
pub mod run;
pub mod sweep;
