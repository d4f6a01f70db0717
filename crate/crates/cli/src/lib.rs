//! Command-line driver for lively quantum walk experiments.

pub mod args;
pub mod commands;
pub mod error;
pub mod formats;
pub mod scenario;

use std::ffi::OsString;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};
pub use crate::error::{CliError, CliResult};
use crate::scenario::Scenario;

pub fn execute(command: &Command) -> CliResult<()> {
    match command {
        Command::Evolve(a) => commands::evolve_cmd(a),
        Command::Limiting(a) => commands::limiting_cmd(a),
        Command::Periodicity(a) => commands::periodicity_cmd(a),
        Command::Trapping(a) => commands::trapping_cmd(a),
        Command::Broken(a) => commands::broken_cmd(a),
        Command::Detect(a) => commands::detect_cmd(a),
        Command::Spectrum(a) => commands::spectrum_cmd(a),
        Command::Run(a) => run_scenario(&a.scenario),
    }
}

fn run_scenario(path: &Path) -> CliResult<()> {
    let scenario = Scenario::load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut argv: Vec<OsString> = vec!["lively".into()];
    argv.extend(scenario.to_args(base)?);
    let cli = Cli::try_parse_from(argv)
        .map_err(|e| CliError::param(format!("{}: {}", path.display(), e.to_string().trim_end())))?;
    execute(&cli.command)
}

/// Parse `args` (including the program name), run, and map the outcome to
/// an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lively: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
