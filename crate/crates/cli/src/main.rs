mod args;
mod cache;
mod commands;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let result = match &cli.command {
        Command::Horizons(a) => commands::horizons(a),
        Command::Chart(a) => commands::chart(a),
        Command::Curvature(a) => commands::curvature(a),
        Command::Verify(a) => commands::verify(a),
        Command::Limits(a) => commands::limits(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rnads: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
