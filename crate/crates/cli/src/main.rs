mod cli;
mod commands;
mod error;
mod input;
mod report;

use clap::Parser;

fn main() {
    let config = cli::RunConfig::parse();
    if let Err(err) = commands::run(&config) {
        if err.is_broken_pipe() {
            return;
        }
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
