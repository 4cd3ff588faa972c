//! `pffatigue`: run fatigue campaigns and verification suites.

mod commands;
mod config;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "pffatigue", version, about = "Phase field fatigue simulations")]
struct Cli {
    /// Worker threads for parallel grid points (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the campaign described by a configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output.directory`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replaces `loading.max_cycles`.
        #[arg(long)]
        max_cycles_override: Option<u64>,
    },
    /// Run a verification suite and print one PASS/FAIL line per check.
    Verify {
        suite: Suite,
        /// Configuration whose `seed` drives the randomized checks.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, conflicts_with = "config")]
        seed: Option<u64>,
    },
    /// Generate a notched specimen mesh and write it as JSON or VTK.
    Mesh {
        /// Standard specimen with this stress concentration (2, 3 or 5).
        #[arg(long, required_unless_present = "config", conflicts_with = "config")]
        kt: Option<u32>,
        /// Take geometry, mesh options and length scale from a notched configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Phase field length scale in mm (with --kt).
        #[arg(long, default_value_t = 0.315)]
        length_scale: f64,
        /// Output file; `.vtk` writes VTK, anything else JSON.
        #[arg(long)]
        out: PathBuf,
    },
    /// List the built-in materials.
    Presets,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Invariants,
    SlopeTable,
    Oracle,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::FAILURE;
        }
    }
    let result = match cli.command {
        Command::Run {
            config,
            out,
            max_cycles_override,
        } => commands::run(&config, out, max_cycles_override).map(|_| true),
        Command::Verify { suite, config, seed } => {
            let seed = match config {
                Some(path) => config::RunConfig::read(&path).map(|c| c.seed),
                None => Ok(seed.unwrap_or(0)),
            };
            seed.and_then(|seed| match suite {
                Suite::Invariants => verify::invariants(seed),
                Suite::SlopeTable => verify::slope_table(),
                Suite::Oracle => verify::oracle(),
            })
        }
        Command::Mesh {
            kt,
            config,
            length_scale,
            out,
        } => commands::mesh(kt, config.as_deref(), length_scale, &out).map(|_| true),
        Command::Presets => {
            commands::presets();
            Ok(true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
