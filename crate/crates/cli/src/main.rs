use std::process::ExitCode;

use clap::Parser;
use gwasym_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let code = match run(cli, argv) {
        Ok(outcome) => {
            println!("{}", outcome.report.to_json());
            for note in &outcome.notes {
                eprintln!("{note}");
            }
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
