//! `ballmap`: build, improve, inspect and plot polynomial disk and ball maps.

mod commands;
mod config;
mod grid;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use crate::config::RunConfig;

/// Environment variable capping the number of worker threads.
const THREADS_VAR: &str = "BALLMAP_THREADS";

#[derive(Parser)]
#[command(name = "ballmap", version, about = "Polynomial mappings from the unit disk and ball onto star-like regions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Paths {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Input mapping file.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Output path (map for build/improve, report for quality, prefix for grid).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Project the configured extension onto polynomials of degree n.
    Build(Paths),
    /// Improve a map under boundary interpolation conditions.
    Improve(Paths),
    /// Export images of circles and rays (2D) or spherical shells (3D).
    Grid(Paths),
    /// Report Λ, the boundary error and, in 3D, m_K, E1 and E2.
    Quality(Paths),
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .with_context(|| format!("{THREADS_VAR} must be a positive integer, got `{v}`"))?;
    if n == 0 {
        bail!("{THREADS_VAR} must be a positive integer, got `{v}`");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    init_threads()?;
    let paths = match &cli.command {
        Command::Build(p) | Command::Improve(p) | Command::Grid(p) | Command::Quality(p) => p,
    };
    let cfg = RunConfig::load(&paths.config)?;
    let input = paths.input.as_deref();
    let out = paths.out.as_deref();
    match &cli.command {
        Command::Build(_) => commands::build(&cfg, out),
        Command::Improve(_) => commands::improve(&cfg, input, out),
        Command::Grid(_) => commands::grid(&cfg, input, out),
        Command::Quality(_) => commands::quality(&cfg, input, out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
