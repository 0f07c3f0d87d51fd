use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use s3pinch::tube::{CHAIN_TOLERANCE, DEFAULT_SAMPLES};
use s3pinch::Error;

mod commands;
mod output;

use output::Format;

/// Default tolerance for sampled grids.
const IMPORT_TOLERANCE: f64 = 1e-4;

/// Curvature pinching certificates for surfaces in the unit 3-sphere.
#[derive(Debug, Parser)]
#[command(name = "s3pinch", version)]
struct Cli {
    /// Quadrature nodes per direction (a power of two, at least 8).
    #[arg(long, global = true, default_value_t = 64, value_parser = parse_resolution)]
    resolution: usize,

    /// Seed for Monte-Carlo volume estimates.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Monte-Carlo samples per side; 0 disables sampling.
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,

    /// Output format (default: csv for sweep-tori, json otherwise).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Relative tolerance for inequality checks (default 1e-8, or 1e-4 for
    /// imported grids, whose derivatives come from finite differences).
    #[arg(long, global = true, value_parser = parse_tol)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Genus bound, tube-volume chain and Monte-Carlo volumes for one surface.
    Check {
        /// e.g. `sphere:r=0.5`, `torus:a=0.6`, `psphere:r=1,eps=0.1,l=2,m=0`, `clifford`
        surface: String,
    },
    /// Genus-bound slack along the flat tori.
    SweepTori {
        a_min: f64,
        a_max: f64,
        /// Number of sample points, endpoints included.
        steps: usize,
    },
    /// Scalar solves.
    Solve {
        #[command(subcommand)]
        what: Solve,
    },
    /// Total |A|^3 of a minimal surface against the gap threshold.
    Gap { surface: String },
    /// lambda_1 * Area against the eigenvalue bounds.
    Eigen { surface: String },
    /// Runs `check` on a sampled grid file.
    Import { path: PathBuf },
    /// Writes a sampled grid file for a catalog surface.
    Export {
        surface: String,
        /// Output path (default: stdout).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Subcommand)]
pub enum Solve {
    /// beta + (beta^2 - 1) atan(beta) = 2 g0 pi^2 / area
    Beta { g0: u32, area: f64 },
    /// f(t) = y
    Finv { y: f64 },
    /// Lower bound on max |A| for a minimal surface of genus g.
    #[command(name = "maxA", alias = "max-a")]
    MaxA {
        g: u32,
        /// Ambient volume (default 2 pi^2).
        #[arg(long)]
        ambient: Option<f64>,
    },
}

impl Cli {
    fn tolerance(&self) -> f64 {
        self.tol.unwrap_or(match self.command {
            Command::Import { .. } => IMPORT_TOLERANCE,
            _ => CHAIN_TOLERANCE,
        })
    }
}

fn parse_resolution(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n < 8 || !n.is_power_of_two() {
        return Err(format!("resolution must be a power of two >= 8, got {n}"));
    }
    Ok(n)
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(format!("tolerance must be positive, got {t}"));
    }
    Ok(t)
}

/// Exit status for a failed run.
fn failure_code(err: &anyhow::Error) -> u8 {
    let Some(e) = err.chain().find_map(|c| c.downcast_ref::<Error>()) else {
        return 2;
    };
    match e {
        Error::Domain(_)
        | Error::Format(_)
        | Error::OffSphere { .. }
        | Error::ResolutionTooCoarse { .. }
        | Error::OffGrid { .. }
        | Error::NotMinimal { .. }
        | Error::NoSpectralData(_)
        | Error::ImmersionFailure { .. }
        | Error::Io(_) => 2,
        Error::ChainViolation { .. } => 3,
        Error::DegenerateMetric { .. } | Error::BracketFailure { .. } | Error::GenusDetectionFailure { .. } => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            if let Some(path) = &out.path {
                if let Err(e) = std::fs::write(path, &out.text).with_context(|| format!("writing {}", path.display())) {
                    eprintln!("error: {e:#}");
                    return ExitCode::from(2);
                }
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(failure_code(&e))
        }
    }
}
