//! Command-line front end: configuration parsing and command execution.

pub mod config;
pub mod run;
