use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    ExitCode::from(helmscat::run(helmscat::Cli::parse()))
}
