//! File formats, reports and commands behind the `mwcontrol` binary.
//!
//! Every command returns an [`Outcome`] instead of printing, so the exit
//! status contract (0 success or controllable, 1 negative verdict, 2 input
//! error) can be tested without spawning a process.

pub mod cli;
pub mod commands;
pub mod config;
pub mod dot;
mod error;
pub mod examples;
pub mod format;
pub mod report;

pub use error::{CliError, Result};

/// What a command prints and the status it exits with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

impl Outcome {
    pub fn ok(stdout: String, success: bool) -> Self {
        Self {
            stdout,
            stderr: String::new(),
            code: if success { 0 } else { 1 },
        }
    }

    pub fn error(err: &CliError) -> Self {
        Self {
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
            code: 2,
        }
    }
}
