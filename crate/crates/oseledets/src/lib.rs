//! File formats and command-line front end for `oseledets-core`.
//!
//! The binary `oseledets` exposes five subcommands: `gen-exact` writes the
//! exact-solution test cocycle, `compute` runs one method, `sweep` charts the
//! error against ground truth over a grid of half-widths, `validate` emits
//! the equivariance and expansion-rate series, and `lyap` estimates
//! exponents.

pub mod cli;
pub mod commands;
pub mod error;
pub mod format;
pub mod output;
pub mod truth;

pub use error::{CliError, CliResult};
