use std::process::ExitCode;

use clap::Parser;
use wtele_core::cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(report) => {
            print!("{}", report.body);
            if report.success {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: fidelity below 1 - 1e-10 on at least one branch");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
