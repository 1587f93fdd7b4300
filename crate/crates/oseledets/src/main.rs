use std::process::ExitCode;

use clap::Parser;
use oseledets::cli::Cli;
use oseledets::commands;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("oseledets: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
