//! Command-line front end for `ergocap`: capacitance sweeps, bosonic gap
//! tables and single-state ergotropy summaries.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use error::CliError;
