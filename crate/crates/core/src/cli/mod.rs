//! Command-line driver: `horse <config> [--out DIR] [--preset figN] [--threads K]`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure (outputs
//! are still written, failing rows tagged in the `status` column), 4 I/O.

pub mod config;
pub mod modes;
pub mod presets;
pub mod table;

use std::path::PathBuf;

use clap::Parser;

pub use config::{ChannelSpec, EnergyGrid, Mode, PotentialSpec, RunConfig};
pub use table::Table;

use crate::error::{HorseError, Result};

#[derive(Debug, Parser)]
#[command(name = "horse", version, about = "Oscillator-basis scattering calculations")]
pub struct Args {
    /// Run configuration (key = value with [section] groups).
    pub config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Figure battery fig1..fig8 instead of the configured mode.
    #[arg(long)]
    pub preset: Option<String>,
    /// Worker threads for grid evaluation.
    #[arg(long)]
    pub threads: Option<usize>,
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_IO: u8 = 4;

pub fn exit_code(e: &HorseError) -> u8 {
    match e {
        HorseError::Config { .. } => EXIT_CONFIG,
        HorseError::Io(_) => EXIT_IO,
        _ => EXIT_NUMERICAL,
    }
}

/// Tables for a parsed configuration, optionally replaced by a preset.
pub fn compute(config: &RunConfig, preset: Option<&str>) -> Result<Vec<Table>> {
    match preset {
        Some(p) => presets::run_preset(p, config),
        None => modes::run(config),
    }
}

/// Runs everything and writes the CSVs; returns the process exit code.
pub fn execute(args: &Args) -> u8 {
    match try_execute(args) {
        Ok(tables) => {
            let failed: usize = tables.iter().map(|t| t.failures).sum();
            if failed > 0 {
                eprintln!("horse: {failed} grid point(s) failed; see the status column");
                EXIT_NUMERICAL
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("horse: {e}");
            exit_code(&e)
        }
    }
}

fn try_execute(args: &Args) -> Result<Vec<Table>> {
    if let Some(p) = &args.preset {
        if !presets::PRESETS.contains(&p.as_str()) {
            return Err(HorseError::config("--preset", format!("`{p}` is not one of {}", presets::PRESETS.join(", "))));
        }
    }
    let config = RunConfig::from_file(&args.config)?;
    let pool = match args.threads {
        Some(0) => return Err(HorseError::config("--threads", "must be at least 1")),
        Some(k) => rayon::ThreadPoolBuilder::new().num_threads(k).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    }
    .map_err(|e| HorseError::config("--threads", e.to_string()))?;
    let tables = pool.install(|| compute(&config, args.preset.as_deref()))?;
    std::fs::create_dir_all(&args.out).map_err(|e| HorseError::Io(format!("{}: {e}", args.out.display())))?;
    for t in &tables {
        t.write(&args.out)?;
    }
    Ok(tables)
}
