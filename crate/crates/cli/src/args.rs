use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "sampdisc", version, about = "Sampling discretization experiments for trigonometric polynomials")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct GlobalArgs {
    /// Seed for randomized commands (required by them).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Cap on worker threads.
    #[arg(long, global = true, env = "SAMPDISC_THREADS")]
    pub threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true)]
    pub oversample: Option<usize>,

    #[arg(long = "polygon-k", global = true)]
    pub polygon_k: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build frequency sets.
    #[command(subcommand)]
    Freqset(FreqsetCmd),
    /// Norms of a polynomial.
    #[command(subcommand)]
    Poly(PolyCmd),
    /// Kernel constructions.
    #[command(subcommand)]
    Kernel(KernelCmd),
    /// Discretization estimates and point constructions.
    #[command(subcommand)]
    Discretize(DiscretizeCmd),
    /// Randomized lower-bound experiments.
    #[command(subcommand)]
    Experiment(ExperimentCmd),
    /// Uniform-norm sampling recovery.
    #[command(subcommand)]
    Recover(RecoverCmd),
    /// Run a command described by a JSON campaign file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SetKind {
    Box,
    Lacunary,
    Hyperbolic,
    Random,
}

#[derive(Debug, Subcommand)]
pub enum FreqsetCmd {
    Gen {
        #[arg(long, value_enum)]
        kind: SetKind,
        /// Box half-widths, comma separated.
        #[arg(long = "n-vec", value_delimiter = ',')]
        n_vec: Vec<u64>,
        /// Lacunary length or hyperbolic-cross level.
        #[arg(long)]
        n: Option<u32>,
        /// Lacunary ratio.
        #[arg(long, default_value_t = 3.0)]
        b: f64,
        /// Hyperbolic-cross dimension.
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Range `[1, K]` for random spectra.
        #[arg(long = "K")]
        k: Option<usize>,
        /// Keep probability for random spectra.
        #[arg(long)]
        p: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormChoice {
    L1,
    L2,
    Lq,
    Sup,
    SupBb,
}

/// A polynomial from a JSON file, or the Dirichlet kernel of a spectrum.
#[derive(Debug, Args, Clone)]
pub struct PolySource {
    #[arg(long, conflicts_with = "q")]
    pub poly: Option<PathBuf>,
    /// Spectrum: `0,1,2`, `-3..3`, `0,0;1,0` (2-d) or a JSON file.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum PolyCmd {
    Norm {
        #[command(flatten)]
        source: PolySource,
        #[arg(long, value_enum)]
        norm: NormChoice,
        /// Exponent for `lq`.
        #[arg(long, default_value_t = 2.0)]
        exponent: f64,
        #[arg(long = "rel-tol", default_value_t = 1e-9)]
        rel_tol: f64,
        #[arg(long = "node-budget", default_value_t = 2_000_000)]
        node_budget: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    Vp,
    Generalized,
    Riesz,
    RieszSplit,
    Block,
}

#[derive(Debug, Subcommand)]
pub enum KernelCmd {
    Build {
        #[arg(long, value_enum)]
        method: MethodChoice,
        /// Classical order, or lacunary length for Riesz methods.
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 3.0)]
        b: f64,
    },
}

#[derive(Debug, Args, Clone)]
pub struct PointsSource {
    /// Point set JSON file.
    #[arg(long, conflicts_with = "equispaced")]
    pub points: Option<PathBuf>,
    /// `m` equispaced points on the circle.
    #[arg(long)]
    pub equispaced: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum DiscretizeCmd {
    EstimateD {
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[command(flatten)]
        points: PointsSource,
    },
    Net {
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long)]
        eps: f64,
        #[arg(long = "pool-size", default_value_t = 20_000)]
        pool_size: usize,
        #[arg(long = "net-budget", default_value_t = 531_441)]
        net_budget: usize,
    },
    ConditionD {
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[command(flatten)]
        points: PointsSource,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long = "descent-steps", default_value_t = 50)]
        descent_steps: usize,
    },
    Remez {
        #[command(flatten)]
        source: PolySource,
        #[arg(long)]
        beta: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum XiChoice {
    Equispaced,
    Random,
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCmd {
    RandomSpectrum {
        #[arg(long = "K")]
        k: usize,
        #[arg(long = "N")]
        n: usize,
        /// Number of points; defaults to the largest admissible value.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long = "xi-mode", value_enum, default_value_t = XiChoice::Equispaced)]
        xi_mode: XiChoice,
        /// Constant in the reported bound `c (N / ln K)^{1/2}`.
        #[arg(long, default_value_t = 0.2)]
        c: f64,
    },
    Hoeffding {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2.0)]
        b: f64,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    BernsteinTail {
        #[arg(long = "K")]
        k: usize,
        #[arg(long)]
        p: f64,
        /// Threshold; defaults to `2 (a(p) K)^{1/2}`.
        #[arg(long)]
        y: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum RecoverCmd {
    Fit {
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        /// JSON `{"points": [[x..]..], "values": [[re, im]..]}`.
        #[arg(long)]
        samples: PathBuf,
    },
    VerifyEt3 {
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        /// Target polynomial JSON file.
        #[arg(long)]
        target: PathBuf,
        #[command(flatten)]
        points: PointsSource,
        /// Discretization constant; estimated from the points when absent.
        #[arg(long)]
        c1: Option<f64>,
    },
    ExactCheck {
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[command(flatten)]
        points: PointsSource,
        /// Use ε-net points for this ε instead of given points.
        #[arg(long = "net-eps")]
        net_eps: Option<f64>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Stability factor to assert.
        #[arg(long)]
        stability: Option<f64>,
    },
}
