use std::process::ExitCode;

use clap::Parser;
use stokes_perturb::cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match stokes_perturb::commands::run(&cli.global, &cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("stokes-perturb: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
