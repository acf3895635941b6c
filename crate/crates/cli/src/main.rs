mod artifacts;
mod cli;
mod commands;
mod settings;

use std::fmt;
use std::process::ExitCode;

use clap::Parser;

use cli::{Cli, Command};
use settings::RunConfig;

/// Invocation problems; mapped to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let rc = RunConfig::resolve(&cli.common)?;
    match cli.command {
        Command::Constants { n_max } => commands::constants(&rc, n_max),
        Command::Shoot { n, r0, theta0, x0 } => commands::shoot(&rc, n, &r0, theta0, x0),
        Command::Doughnut { n, bracket, grid } => {
            commands::doughnut(&rc, n, bracket.as_deref(), grid)
        }
        Command::Poincare { n, range, grid } => commands::poincare(&rc, n, &range, grid),
        Command::Verify { suite, json } => commands::verify(&rc, suite, json),
    }
}

fn broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<std::io::Error>()
            .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
