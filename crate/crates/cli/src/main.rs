//! `srpol`: stationary Rydberg polariton spectra and scattering from the
//! command line.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Command, RunConfig};
use config::{Grid, Sources};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "srpol", version, about = "Stationary Rydberg polariton simulator")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// JSON problem document.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Built-in parameter set: fig2, fig3 or rb87.
    #[arg(long, global = true, value_name = "NAME")]
    preset: Option<String>,

    /// Override a document field, e.g. --set medium.z0=1.2 (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Directory for the emitted files.
    #[arg(long, global = true, default_value = ".", value_name = "DIR")]
    output: PathBuf,

    /// Scan grid as start:stop:count.
    #[arg(long, global = true, allow_hyphen_values = true, value_name = "START:STOP:COUNT")]
    grid: Option<Grid>,

    /// Drop the impurity from the medium.
    #[arg(long, global = true)]
    no_impurity: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Dark-branch complex dispersion (fig2a.csv).
    Dispersion,
    /// Intermediate-state population against δ/Ωs (fig2b.csv).
    Population,
    /// k = 0 dark state at δ = ±Ωs (darkstate.json).
    Darkstate,
    /// Dark state under far-detuned Rydberg dressing (dressed-darkstate.json).
    DressedDarkstate,
    /// T, R, A with and without the impurity (scatter.csv).
    Scatter,
    /// T, R, A against the impurity quantum number (fig3-upper.csv).
    ScanN,
    /// T, R, A against Ωc/Ωs (fig3-lower.csv).
    ScanRatio,
    /// Invariant and oracle checks (report.json).
    Verify,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Dispersion => Command::Dispersion,
            Cmd::Population => Command::Population,
            Cmd::Darkstate => Command::Darkstate,
            Cmd::DressedDarkstate => Command::DressedDarkstate,
            Cmd::Scatter => Command::Scatter,
            Cmd::ScanN => Command::ScanN,
            Cmd::ScanRatio => Command::ScanRatio,
            Cmd::Verify => Command::Verify,
        }
    }
}

fn fail(e: &CliError) -> ExitCode {
    let record = serde_json::to_string(&e.record()).unwrap_or_else(|_| e.to_string());
    eprintln!("{record}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help, --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Config(e.to_string().trim_end().to_string())),
    };
    let cfg = RunConfig {
        command: cli.command.into(),
        sources: Sources {
            config: cli.config,
            preset: cli.preset,
            overrides: cli.overrides,
        },
        output: cli.output,
        grid: cli.grid,
        no_impurity: cli.no_impurity,
    };
    match commands::run(&cfg) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}
