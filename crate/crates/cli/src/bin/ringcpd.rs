use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use ringcpd_cli::{run, Args};

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = match run(&args) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    for w in &outcome.warnings {
        eprintln!("{w}");
    }
    let written = match &args.output {
        Some(path) => fs::write(path, &outcome.report),
        None => std::io::stdout().lock().write_all(outcome.report.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
