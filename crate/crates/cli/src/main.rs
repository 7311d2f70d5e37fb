mod commands;
mod failure;
mod options;
mod svg;

use std::process::ExitCode;

use clap::Parser;

use options::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Preprocess(args) => commands::preprocess(args),
        Command::Cv(args) => commands::cv(args),
        Command::Gsvma(args) => commands::gsvma(args),
        Command::Report(args) => commands::report(args),
        Command::Synth(args) => commands::synth(args),
        Command::Verify(args) => commands::verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error());
            ExitCode::from(failure.exit_code())
        }
    }
}
