//! Command-line front end: flag/config-file resolution, experiment dispatch,
//! CSV sample emission, and JSON summaries. I/O lives here; everything
//! stochastic is delegated to `rwrs-core`.

pub mod config;
pub mod intervals;
pub mod manifest;
mod run;

pub use run::{execute, CliError};

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "rwrs", version, about = "Monte Carlo experiments for scenery-labelled random walks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Range-law samples #V_n / a(n).
    Range(RunArgs),
    /// Normalized cylinder-cover growth (1/a(n))·log2 Φ.
    Complexity(RunArgs),
    /// Minimum scaled local time over an interval set.
    Localtime(RunArgs),
    /// Scaling exponent of the complexity summaries across the window grid.
    Edim(RunArgs),
    /// Reference distributions (Donsker proxy or heavy-tailed range).
    Reference(RunArgs),
    /// Dyadic signature classes and covering-event diagnostics.
    Lemma4(RunArgs),
    /// Exhaustive small-instance oracle suite; exit 0 iff every check passes.
    Smalltest(RunArgs),
}

/// Shared flag surface. Precedence: flag > config file > default.
#[derive(Args, Debug, Default, Clone)]
pub struct RunArgs {
    /// Stability index in (1, 2]; 2 selects the lazy ±1 family.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Holding probability of the lazy family.
    #[arg(long)]
    pub laziness: Option<f64>,
    /// Atom at zero of the heavy-tailed family.
    #[arg(long)]
    pub zero_mass: Option<f64>,
    /// Degenerate +1 jump law (validation runs only).
    #[arg(long)]
    pub unit_step: bool,
    /// Window length n.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated window grid (edim).
    #[arg(long)]
    pub n_grid: Option<String>,
    /// Monte Carlo trials.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Master seed; all randomness derives from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Ball / cover radius ε.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Comma-separated scenery probabilities.
    #[arg(long)]
    pub probs: Option<String>,
    /// Interval set for localtime, e.g. "-0.5..0.5".
    #[arg(long)]
    pub interval: Option<String>,
    /// Steps per reference trial.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Reference kind: brownian | stable.
    #[arg(long)]
    pub kind: Option<String>,
    /// Admissibility threshold ℰ (lemma4).
    #[arg(long)]
    pub cal_e: Option<f64>,
    /// Randomized instances (smalltest).
    #[arg(long)]
    pub instances: Option<usize>,
    /// Also compute the KS distance against the matching reference.
    #[arg(long)]
    pub ks_reference: bool,
    /// CSV output path (one sample per row).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON summary output path.
    #[arg(long)]
    pub json_out: Option<PathBuf>,
    /// Flat key-value config file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
}
