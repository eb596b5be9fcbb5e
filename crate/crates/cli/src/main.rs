use std::io::Write;
use std::process::ExitCode;

use birqi_cli::{run, tolerance, Cli, TOL_ENV};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let result = std::env::var(TOL_ENV)
        .ok()
        .as_deref()
        .map_or(tolerance(None), |v| tolerance(Some(v)))
        .and_then(|tol| run(&cli, tol, &mut out, &mut err));
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(err, "birqi: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
