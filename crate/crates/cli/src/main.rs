use std::io::Write;
use std::process::ExitCode;

use cel_cli::{run, Cli, CliError};
use clap::Parser;

fn emit(outcome: &cel_cli::Outcome) -> Result<(), CliError> {
    let text = outcome.document.to_json()?;
    match &outcome.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Help and version requests are not errors.
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let result = run(&cli).and_then(|outcome| emit(&outcome).map(|_| outcome.exit_code));
    match result {
        Ok(code) => {
            if code == 3 {
                eprintln!("warning: fit did not converge; the report is still written");
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
