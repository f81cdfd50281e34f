//! Command-line front end: input ingestion, the analysis pipeline, the
//! value cache and table reproduction.

pub mod cache;
pub mod commands;

pub use commands::{run, Cli, Command, ExitStatus, Outcome};
