//! Command-line front end: training runs, sweeps, and evaluation of
//! exported policies.

pub mod args;
pub mod commands;
pub mod error;
pub mod export;
pub mod io;
pub mod manifest;

use std::io::Write;

pub use error::{CliError, CliResult};

/// Runs a parsed command, writing the human-readable report to `out`.
pub fn dispatch(cli: &args::Cli, out: &mut impl Write) -> CliResult<()> {
    match &cli.command {
        args::Command::Train(a) => commands::train::run(a, out).map(drop),
        args::Command::Eval(a) => commands::eval::run(a, out).map(drop),
        args::Command::Sweep(a) => commands::sweep::run(a, out).map(drop),
    }
}
