//! Command-line front end for the `asyncleap` experiments. Output is CSV:
//! a `#` line with the resolved configuration, a header row, then data
//! rows with 17 significant digits.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;

use std::fs::File;
use std::io::{self, BufWriter, Write};

use asyncleap::RunStatus;

pub use args::Cli;
pub use error::{exit, CliError, CliResult};

/// Resolves `cli`, runs it and writes the result to `--out` or stdout.
pub fn run(cli: Cli) -> CliResult<RunStatus> {
    let out_path = cli.options.out.clone();
    let resolved = config::resolve(cli.command, cli.options)?;
    let out: Box<dyn Write> = match out_path {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    commands::execute(&resolved, out)
}
