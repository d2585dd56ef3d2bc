use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "saext", version, about = "Self-adjoint extensions of 1D quantum operators")]
#[command(propagate_version = true, allow_negative_numbers = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Emit JSON (default)
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,

    /// Emit CSV instead of JSON
    #[arg(long, global = true)]
    pub csv: bool,

    /// Unit system, e.g. `hbar=1,two_m=1`
    #[arg(long, global = true, value_name = "hbar=<v>,two_m=<v>")]
    pub units: Option<String>,

    /// Acceptance tolerance for the command's own check (overrides SAEXT_TOL)
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Number of grid points for sampled functions
    #[arg(long = "grid-n", global = true)]
    pub grid_n: Option<usize>,

    /// Seed for randomized demos
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Write output to a file instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Deficiency indices and basis of a catalog operator
    Deficiency(DeficiencyArgs),
    /// Boundary condition for a von Neumann parameter gamma
    Extend(ExtendArgs),
    /// Analytic spectrum of a self-adjoint extension
    Spectrum(SpectrumArgs),
    /// Robin half-line bound state
    Boundstate(BoundstateArgs),
    /// Reflection coefficient on the Robin half-line
    Scatter(ScatterArgs),
    /// Scale anomaly of the bound state
    Anomaly(AnomalyArgs),
    /// Numerical demonstration of one of the four paradoxes
    Paradox(ParadoxArgs),
    /// Classical dilatation drift for V = g q^s
    Classical(ClassicalArgs),
    /// Radial momentum symmetry in curvilinear coordinates
    Geometry(GeometryArgs),
    /// Run another subcommand over a parameter grid
    Sweep(SweepArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Deficiency(_) => "deficiency",
            Command::Extend(_) => "extend",
            Command::Spectrum(_) => "spectrum",
            Command::Boundstate(_) => "boundstate",
            Command::Scatter(_) => "scatter",
            Command::Anomaly(_) => "anomaly",
            Command::Paradox(_) => "paradox",
            Command::Classical(_) => "classical",
            Command::Geometry(_) => "geometry",
            Command::Sweep(_) => "sweep",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct DeficiencyArgs {
    /// momentum, hamiltonian or time
    #[arg(long, default_value = "momentum")]
    pub op: String,
    /// `a,b`, `a,inf` or `-inf,inf`
    #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
    pub interval: String,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Keep every `stride`-th basis sample in the output
    #[arg(long, default_value_t = 100)]
    pub stride: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct ExtendArgs {
    /// momentum (on [0,1]) or hamiltonian (on the half-line)
    #[arg(long, default_value = "momentum")]
    pub operator: String,
    #[arg(long)]
    pub gamma: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct SpectrumArgs {
    /// momentum, well or robin
    #[arg(long, default_value = "momentum")]
    pub op: String,
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    #[arg(long = "n-min", default_value_t = -5)]
    pub n_min: i64,
    #[arg(long = "n-max", default_value_t = 5)]
    pub n_max: i64,
    #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
    pub interval: String,
    /// Well width
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Robin parameter (`inf` for Dirichlet)
    #[arg(long, default_value = "-1", allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long = "k-max", default_value_t = 10.0)]
    pub k_max: f64,
    #[arg(long = "k-count", default_value_t = 10)]
    pub k_count: usize,
    /// CSV of eigenfunction samples instead of eigenvalues
    #[arg(long)]
    pub eigenfunctions: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct BoundstateArgs {
    #[arg(long)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct ScatterArgs {
    /// Robin parameter (`inf` for Dirichlet)
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long)]
    pub k: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct AnomalyArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub t: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct ParadoxArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    pub id: u8,
    /// Matrix size (1, 2), number of levels (3) or basis size (4)
    #[arg(long)]
    pub n: Option<usize>,
    /// Interval length for paradox 4, well width for paradox 3
    #[arg(long, default_value_t = 1.0)]
    pub l: f64,
    /// Twist of the discretized momentum for paradox 1
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct ClassicalArgs {
    #[arg(long)]
    pub s: f64,
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    #[arg(long, default_value_t = 1.0)]
    pub q0: f64,
    #[arg(long, default_value_t = 0.3)]
    pub p0: f64,
    #[arg(long = "t-end", default_value_t = 5.0)]
    pub t_end: f64,
    /// Integrator tolerance
    #[arg(long = "ode-tol", default_value_t = 1e-10)]
    pub ode_tol: f64,
    /// Number of trajectory samples to include
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct GeometryArgs {
    /// polar, spherical or flat
    #[arg(long, default_value = "polar")]
    pub metric: String,
    /// `bump:<a>,<b>`
    #[arg(long, default_value = "bump:1,2")]
    pub probe: String,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(trailing_var_arg = true, allow_negative_numbers = true)]
pub struct SweepArgs {
    /// `param=start:stop:count`; repeat for a cartesian product
    #[arg(long = "sweep", required = true, allow_hyphen_values = true)]
    pub sweep: Vec<String>,
    /// Subcommand and its fixed arguments
    #[arg(required = true, allow_hyphen_values = true, num_args = 1..)]
    pub command: Vec<String>,
}

/// A bare subcommand, used to parse each sweep point.
#[derive(Debug, Parser)]
#[command(name = "saext", allow_negative_numbers = true)]
pub struct SubcommandOnly {
    #[command(subcommand)]
    pub command: Command,
}
