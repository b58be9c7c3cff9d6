use clap::Parser;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = scdqc_cli::Cli::parse();
    match scdqc_cli::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
