use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Clone, Parser)]
#[command(
    name = "pseudolap",
    version,
    about = "Pseudo-Laplacian spectra, Heegner coefficients and critical-line zeros"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,

    /// Defaults to `selfcheck`.
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// Discriminant with optional weight, `d` or `d:nu`; repeatable.
    #[arg(long = "disc", global = true, allow_hyphen_values = true, value_name = "D[:NU]")]
    pub disc: Vec<String>,

    /// Multiply θE by w(d)/2, required for d = -3 and d = -4.
    #[arg(long, global = true)]
    pub unit_correction: bool,

    /// Truncation height.
    #[arg(long, global = true, default_value_t = 2.0)]
    pub a: f64,

    /// Ordinate window; each command has its own default.
    #[arg(long, global = true, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
    pub window: Option<Vec<f64>>,

    /// Truncation height of the spectral integrals.
    #[arg(long, global = true, default_value_t = 400.0)]
    pub tmax: f64,

    /// Half-width of the excised neighbourhood of the kernel singularity.
    #[arg(long, global = true, default_value_t = 0.05)]
    pub delta: f64,

    /// Report path; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Report format; zero lists default to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[arg(long, global = true, default_value = ".pseudolap-cache")]
    pub cache_dir: PathBuf,

    /// Write a header-only CSV (or empty list) instead of failing on no results.
    #[arg(long, global = true)]
    pub allow_empty: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Invariant checks across all modules; exit 2 on any failure.
    Selfcheck,
    /// Zeros of the constant term a^s + c_s a^{1-s} on the critical line.
    CtZeros,
    /// Zeros of θE on the critical line.
    ThetaZeros,
    /// Zeros of ζ on the critical line (window top at most 200).
    ZetaZeros,
    /// Eigenvalue parameters, one per constant-term interval.
    Eigen,
    /// Interleaving report with per-interval root counts.
    Interleave,
    /// F and G at one spectral parameter w.
    Determinant {
        #[arg(long, num_args = 2, value_names = ["RE", "IM"], allow_hyphen_values = true, default_values_t = [0.8, 2.0])]
        w: Vec<f64>,
    },
    /// Integral of 1 - (sin πu/πu)² over (alpha, beta).
    PairCorr {
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
    },
    /// Spacing bounds between adjacent θE zeros.
    SpacingScan,
    /// Phase-branch and θE sample caches.
    Cache {
        #[command(subcommand)]
        action: CacheCommand,
    },
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum CacheCommand {
    Status,
    Clear,
    /// Build the phase branch to t = 200 and the θE samples for --disc at --tmax.
    Warm,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Selfcheck => "selfcheck",
            Command::CtZeros => "ct-zeros",
            Command::ThetaZeros => "theta-zeros",
            Command::ZetaZeros => "zeta-zeros",
            Command::Eigen => "eigen",
            Command::Interleave => "interleave",
            Command::Determinant { .. } => "determinant",
            Command::PairCorr { .. } => "pair-corr",
            Command::SpacingScan => "spacing-scan",
            Command::Cache { .. } => "cache",
        }
    }

    pub fn default_window(&self) -> (f64, f64) {
        match self {
            Command::CtZeros => (0.5, 100.0),
            Command::ThetaZeros => (0.5, 60.0),
            Command::ZetaZeros => (1.0, 100.0),
            Command::SpacingScan => (20.0, 60.0),
            _ => (15.0, 40.0),
        }
    }

    /// Whether the default report is a zero list.
    pub fn lists_zeros(&self) -> bool {
        matches!(
            self,
            Command::CtZeros | Command::ThetaZeros | Command::ZetaZeros | Command::Eigen
        )
    }
}
