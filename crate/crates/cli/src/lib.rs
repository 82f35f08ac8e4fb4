//! Front-end plumbing for the scattering library: config parsing, figure
//! presets, table output, the grid runner, and the selfcheck battery.
//!
//! The binary in `main.rs` is a thin clap wrapper over these modules so
//! integration tests can drive everything in-process.

pub mod config;
pub mod output;
pub mod preset;
pub mod runner;
pub mod selfcheck;

use std::fmt;

/// Exit code 0: success. The error kinds map onto the remaining codes.
pub const EXIT_OK: i32 = 0;
/// Exit code 2: the config did not validate.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code 3: the run finished but some point missed its tolerance.
pub const EXIT_UNCONVERGED: i32 = 3;
/// Exit code 4: filesystem trouble.
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliErrorKind {
    Config,
    Io,
}

#[derive(Debug, Clone)]
pub struct CliError {
    pub kind: CliErrorKind,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            kind: CliErrorKind::Config,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError {
            kind: CliErrorKind::Io,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            CliErrorKind::Config => EXIT_CONFIG,
            CliErrorKind::Io => EXIT_IO,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}
