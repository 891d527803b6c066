//! File formats, configuration, reports and subcommands behind the
//! `stokes-perturb` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod exec;
pub mod formats;
pub mod report;

pub use error::{CliError, Result};
