use std::process::ExitCode;

use clap::Parser;
use shapedrm_cli::{emit, run, Cli, CliError};

fn main() -> ExitCode {
    let result = Cli::parse()
        .into_config()
        .and_then(|config| run(&config))
        .and_then(|record| emit(&record, &mut std::io::stdout().lock()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("shapedrm: {e}");
            ExitCode::from(exit_byte(&e))
        }
    }
}

fn exit_byte(e: &CliError) -> u8 {
    e.exit_code() as u8
}
