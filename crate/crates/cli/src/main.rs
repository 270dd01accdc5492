//! Command-line frontend for the helical field toolkit.
//!
//! Exit codes: 0 when every requested check passes, 1 when a verification
//! fails, 2 on usage or configuration errors.

// NaN-rejecting comparisons read as written
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{load_pairs, RunConfig};

#[derive(Parser)]
#[command(
    name = "phlo",
    about = "Build spatially finite helical field solutions, verify the governing identities, and export grid data",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity verification suites over the sampled grid.
    Verify(CommonArgs),
    /// Export grid samples of the solution (CSV, VTK or JSON).
    Export(CommonArgs),
    /// Print the scalar summary: energy, period, action, scale, helicity.
    Report(CommonArgs),
    /// Check the two-charge interaction energy against the closed form.
    Coulomb(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Configuration file: dotted key = value lines, or a JSON object.
    #[arg(long)]
    config: PathBuf,
    /// Override the grid point counts as nx,ny,nz,nt.
    #[arg(long)]
    grid: Option<String>,
    /// Scale every verification tolerance by this factor.
    #[arg(long)]
    tol: Option<f64>,
    /// Output format for exports and written reports.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output path (required for export, optional elsewhere).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Vtk,
    Json,
}

fn main() {
    match run() {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}

fn run() -> Result<i32> {
    let cli = Cli::parse();
    let args = match &cli.command {
        Command::Verify(a) | Command::Export(a) | Command::Report(a) | Command::Coulomb(a) => a,
    };
    let pairs = load_pairs(&args.config)?;
    let mut run_config = RunConfig::from_pairs(&pairs)?;
    if let Some(grid) = &args.grid {
        run_config.override_grid_counts(grid)?;
    }
    let tol_scale = match args.tol {
        Some(t) if t > 0.0 => t,
        Some(t) => bail!("tolerance scale must be positive, got {t}"),
        None => 1.0,
    };

    match &cli.command {
        Command::Verify(args) => {
            let checks = commands::run_verify(&run_config, tol_scale)?;
            let rendered = commands::render_verify(&checks);
            print!("{rendered}");
            if let Some(out) = &args.out {
                let text = if args.format == Format::Json {
                    serde_json::to_string_pretty(&commands::verify_to_json(&checks))?
                } else {
                    rendered.clone()
                };
                std::fs::write(out, text)?;
            }
            let failed = checks.iter().filter(|c| !c.passed()).count();
            if failed > 0 {
                eprintln!("{failed} identity check(s) failed");
                return Ok(1);
            }
            Ok(0)
        }
        Command::Export(args) => {
            let Some(out) = &args.out else {
                bail!("export needs --out <path>");
            };
            commands::run_export(&run_config, args.format, out)?;
            println!("wrote {}", out.display());
            Ok(0)
        }
        Command::Report(args) => {
            let (text, json) = commands::run_report(&run_config)?;
            print!("{text}");
            if let Some(out) = &args.out {
                let payload = if args.format == Format::Json {
                    serde_json::to_string_pretty(&json)?
                } else {
                    text.clone()
                };
                std::fs::write(out, payload)?;
            }
            Ok(0)
        }
        Command::Coulomb(args) => {
            let (text, json) = commands::run_coulomb(&run_config)?;
            print!("{text}");
            if let Some(out) = &args.out {
                let payload = if args.format == Format::Json {
                    serde_json::to_string_pretty(&json)?
                } else {
                    text.clone()
                };
                std::fs::write(out, payload)?;
            }
            Ok(0)
        }
    }
}
