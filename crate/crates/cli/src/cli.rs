use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "angenent",
    version,
    about = "Geodesics, closed orbits and entropy bounds for rotationally symmetric self-shrinkers"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Precision {
    Double,
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Fast,
    Full,
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Plain-text `key = value` file with defaults for the flags below.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Directory for artifacts; created if missing.
    #[arg(long, global = true, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
    /// Overwrite existing artifacts.
    #[arg(long, global = true)]
    pub force: bool,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, value_enum)]
    pub precision: Option<Precision>,
    /// Worker threads for sweeps; output order does not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    #[arg(long, global = true)]
    pub max_step: Option<f64>,
    #[arg(long, global = true)]
    pub r_min: Option<f64>,
    #[arg(long, global = true)]
    pub escape_radius: Option<f64>,
    #[arg(long, global = true)]
    pub max_arclength: Option<f64>,
    #[arg(long, global = true)]
    pub max_axis_crossings: Option<usize>,
    #[arg(long, global = true)]
    pub max_steps: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Table of y_n, kappa_n, E_n and the two-sided bounds for n = 2..n_max.
    Constants {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        n_max: u64,
    },
    /// Integrate one geodesic and report its fate.
    Shoot {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        n: u64,
        /// Start radius on x = 0; `sphere` and `cylinder` give the exact radii.
        #[arg(long, allow_hyphen_values = true)]
        r0: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        theta0: f64,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        x0: f64,
    },
    /// Solve for the symmetric closed geodesic (the doughnut profile).
    Doughnut {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        n: u64,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        bracket: Option<Vec<f64>>,
        #[arg(long, default_value_t = angenent_core::orbit::DEFAULT_GRID)]
        grid: usize,
    },
    /// Fixed points of the horizontal-launch return map.
    Poincare {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        n: u64,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], required = true)]
        range: Vec<f64>,
        #[arg(long, default_value_t = angenent_core::orbit::DEFAULT_GRID)]
        grid: usize,
    },
    /// Run the acceptance checks.
    Verify {
        #[arg(long, value_enum, default_value = "fast")]
        suite: SuiteArg,
        /// Print results as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}
