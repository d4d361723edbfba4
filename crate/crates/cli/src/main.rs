//! `tgeom <command> <config.json> [--out PATH]`
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 negative verdict
//! (sample not embeddable).

mod commands;
mod config;
mod format;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, ValueEnum};

use commands::Outcome;

const EXIT_ERROR: u8 = 1;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    /// Reconstruct coordinates and verify embeddability of a sample.
    Reconstruct,
    /// Smallest flat dimension a finite sample embeds in.
    EmbedTest,
    /// Grid points on the zero set of an envelope, as CSV.
    SampleObject,
    /// Timelike/spacelike/null class of a Minkowski tube with grid statistics.
    TubeClassify,
    /// Directions of a collinearity cone, as CSV plus a JSON summary.
    ConeSample,
}

#[derive(Debug, Parser)]
#[command(name = "tgeom", version, about = "Geometry from a world function")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    config: PathBuf,
    /// Write the main output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: &Cli) -> Result<Outcome> {
    let path = cli.config.as_path();
    match cli.command {
        Command::Reconstruct => commands::reconstruct_cmd(config::load(path)?),
        Command::EmbedTest => commands::embed_test_cmd(config::load(path)?),
        Command::SampleObject => commands::sample_object_cmd(config::load(path)?),
        Command::TubeClassify => commands::tube_classify_cmd(config::load(path)?),
        Command::ConeSample => commands::cone_sample_cmd(config::load(path)?),
    }
}

fn emit(cli: &Cli, outcome: &Outcome) -> Result<()> {
    match &cli.out {
        Some(path) => {
            std::fs::write(path, &outcome.body)
                .with_context(|| format!("cannot write {}", path.display()))?;
            if let Some(s) = &outcome.summary {
                std::io::stdout().write_all(s.as_bytes())?;
            }
        }
        None => {
            std::io::stdout().write_all(outcome.body.as_bytes())?;
            if let Some(s) = &outcome.summary {
                std::io::stderr().write_all(s.as_bytes())?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli).and_then(|o| emit(&cli, &o).map(|()| o.exit)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
