//! Command-line front end: argument parsing, settings resolution, dispatch
//! and exit codes.

pub mod args;
pub mod commands;
pub mod render;
pub mod settings;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;

use clap::{CommandFactory, Parser};

use args::{Cli, Command};
use render::emit;
use settings::{CliError, Settings};

/// The clap command tree, for help reflection.
pub fn command() -> clap::Command {
    Cli::command()
}

/// Parses `argv`, runs the command and returns the process exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let s = Settings::resolve(&cli.global)?;
    let mode = s.output;
    match &cli.command {
        Command::Moments(a) => emit(&commands::moments(a, &s)?, mode, out)?,
        Command::Central(a) => emit(&commands::central(a, &s)?, mode, out)?,
        Command::Oracle(a) => emit(&commands::oracle(a, &s)?, mode, out)?,
        Command::Dist(a) => emit(&commands::dist(a, &s)?, mode, out)?,
        Command::Fit(a) => emit(&commands::fit(a, &s)?, mode, out)?,
        Command::Bounds(a) => emit(&commands::bounds(a, &s)?, mode, out)?,
        Command::Simulate(a) => emit(&commands::simulate(a, &s)?, mode, out)?,
        Command::Verify(a) => {
            if a.list {
                for c in verify::CHECKS {
                    writeln!(out, "{:<24} {}", c.name, c.about)?;
                }
                return Ok(());
            }
            let checks = verify::lookup(&a.only).map_err(CliError::Usage)?;
            let report = verify::run_checks(&checks, &s);
            emit(&report, mode, out)?;
            if report.elapsed_ms / 1e3 > verify::SUITE_BUDGET_SECONDS {
                writeln!(
                    err,
                    "warning: suite took {:.0} s, over the {:.0} s budget",
                    report.elapsed_ms / 1e3,
                    verify::SUITE_BUDGET_SECONDS
                )?;
            }
            if report.failed > 0 {
                for c in report.checks.iter().filter(|c| !c.passed) {
                    writeln!(err, "FAIL {}: {}", c.name, c.detail)?;
                }
                return Err(CliError::VerifyFailed {
                    failed: report.failed,
                    total: report.checks.len(),
                });
            }
        }
    }
    Ok(())
}
