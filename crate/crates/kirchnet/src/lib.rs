//! Config files, reports and CSV output around `kirchnet-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use config::RunConfig;
pub use error::CliError;
