#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Library side of the `nsaspec` command-line tool: spec parsing, commands
//! and artifact encoding. `main.rs` only handles flags and exit codes.

pub mod artifacts;
pub mod commands;
pub mod error;
pub mod spec;

pub use commands::{Format, Region};
pub use error::CliError;
pub use spec::{load_spec, parse_spec, SystemSpec};
