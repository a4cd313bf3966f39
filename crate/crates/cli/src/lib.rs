//! Driver for the `ddmcert` binary: configuration, experiment tables and file output.

pub mod commands;
pub mod config;
pub mod output;
