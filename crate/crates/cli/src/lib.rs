//! Command-line front end for `alignh-core`: file formats and commands.

pub mod commands;
pub mod formats;

pub use commands::{run, Cli};
