//! mdbook cannot execute the book's Rust snippets itself, so every chapter is
//! included here as a doc comment and `cargo test --doc` runs the code
//! blocks. A snippet that drifts from the library breaks the build, which
//! keeps the book honest.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/multiple-doubles.md")]
pub mod multiple_doubles {}

#[doc = include_str!("../../../book/src/complex-and-storage.md")]
pub mod complex_and_storage {}

#[doc = include_str!("../../../book/src/power-series.md")]
pub mod power_series {}

#[doc = include_str!("../../../book/src/monomial-systems.md")]
pub mod monomial_systems {}

#[doc = include_str!("../../../book/src/evaluate-differentiate.md")]
pub mod evaluate_differentiate {}

#[doc = include_str!("../../../book/src/least-squares-toeplitz.md")]
pub mod least_squares_toeplitz {}

#[doc = include_str!("../../../book/src/newton-driver.md")]
pub mod newton_driver {}

#[doc = include_str!("../../../book/src/harness.md")]
pub mod harness {}
