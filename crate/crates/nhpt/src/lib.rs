//! File formats, config handling, parallel runners and the command-line
//! surface over `nhpt-core`.

pub mod artifacts;
pub mod cli;
pub mod commands;
pub mod config;
pub mod io;
pub mod parallel;
pub mod pulse_spec;

pub use nhpt_core as core;
