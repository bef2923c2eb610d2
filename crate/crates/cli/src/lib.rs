//! Scenario files, coefficient families and report emission for the
//! `formlab` command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod family;
pub mod report;
pub mod run;
pub mod scenario;

pub use error::{CliError, Result};
pub use run::{run_scenario, Format, RunOptions, RunSummary};
pub use scenario::Scenario;
