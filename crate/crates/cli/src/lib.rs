//! Command-line front end for `hsicinf`: CSV ingestion, report writers and
//! the `infer`, `simulate` and `gen` subcommands.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
pub mod report;

pub use args::Cli;
pub use error::{CliError, CliResult};

/// Dispatches a parsed command line and returns the text for stdout.
pub fn dispatch(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        args::Command::Infer(a) => commands::cmd_infer(a),
        args::Command::Simulate(a) => commands::cmd_simulate(a),
        args::Command::Gen(a) => commands::cmd_gen(a),
    }
}
