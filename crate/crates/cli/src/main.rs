use std::process::ExitCode;

use asyncleap::RunStatus;
use asyncleap_cli::{error::status_code, run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(status) => {
            if status != RunStatus::Completed {
                eprintln!("asyncleap: run ended with status {status}");
            }
            ExitCode::from(status_code(status))
        }
        Err(e) if e.is_broken_pipe() => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("asyncleap: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
