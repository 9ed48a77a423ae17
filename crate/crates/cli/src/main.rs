use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use mwcontrol::cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = mwcontrol::commands::run(&cli);
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(outcome.code)
}
