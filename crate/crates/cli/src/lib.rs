//! Library surface of the `qtoa` command-line front end: scenario
//! configuration and the subcommand implementations, split out so the
//! integration tests can drive them directly.

pub mod commands;
pub mod config;
