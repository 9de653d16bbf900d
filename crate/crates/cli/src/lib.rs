//! Library side of the `qho` binary: configuration, argument parsing and
//! the subcommands, kept separate so tests can drive them in-process.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;

pub use commands::{execute, Outputs};
pub use config::RunConfig;
pub use error::RunError;
