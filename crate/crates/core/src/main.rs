use std::process::ExitCode;

use clap::Parser;
use srt_core::cli::{run, Cli, Outcome};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("srt-sim: {e}");
            ExitCode::from(2)
        }
    }
}
