//! Command-line surface for `coarsegeo`.

pub mod commands;
pub mod experiment;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] coarsegeo::Error),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "coarsegeo",
    version,
    about = "Hyperbolicity, quasigeodesics and subspace checks on finite graphs"
)]
pub struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads (never changes output).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a graph from a seeded family.
    Gen {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hyperbolicity constant of a graph.
    Delta {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "four_point")]
        method: String,
        #[arg(long, default_value_t = 64)]
        geodesic_cap: usize,
    },
    /// Check a path against (λ, C).
    VerifyQg {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        path: PathBuf,
        #[arg(long, default_value = "1")]
        lambda: String,
        #[arg(long, default_value = "0")]
        c: String,
    },
    /// Smallest C making a path a (λ, C)-quasigeodesic.
    Fit {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        path: PathBuf,
        #[arg(long, default_value = "1")]
        lambda: String,
    },
    /// Replace a path by a tame one along its closest geodesic.
    Tame {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        path: PathBuf,
        #[arg(long, default_value_t = 64)]
        geodesic_cap: usize,
    },
    /// Certify that a subspace (or the union of two) is (λ, C)-quasigeodesic.
    Subspace {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        subspace: PathBuf,
        /// Second subspace; the union is checked.
        #[arg(long)]
        with: Option<PathBuf>,
        #[arg(long, default_value = "1")]
        lambda: String,
        #[arg(long, default_value = "0")]
        c: String,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
    },
    /// Splice two quasigeodesics meeting at a shared point.
    Splice {
        #[arg(long)]
        graph: PathBuf,
        /// Subspace containing the first path.
        #[arg(long)]
        subspace: PathBuf,
        /// Subspace containing the second path.
        #[arg(long)]
        with: PathBuf,
        /// First path, ending at the shared point.
        #[arg(long)]
        path: PathBuf,
        /// Second path, starting at the shared point.
        #[arg(long)]
        path_b: PathBuf,
        #[arg(long, default_value = "1")]
        lambda: String,
        /// Defaults to the larger fitted C of the two paths.
        #[arg(long)]
        c: Option<String>,
        /// Defaults to the slim constant of the graph.
        #[arg(long)]
        delta: Option<String>,
        /// Defaults to the larger stability radius of the two paths.
        #[arg(long)]
        r: Option<String>,
        #[arg(long, default_value_t = 64)]
        geodesic_cap: usize,
    },
    /// Four-segment triangle experiment on one triangle.
    Triangle {
        #[arg(long)]
        graph: PathBuf,
        /// Corners `a,b,c`.
        #[arg(long, value_delimiter = ',', required = true)]
        vertices: Vec<usize>,
        #[arg(long, default_value = "1")]
        lambda: String,
        #[arg(long, default_value = "0")]
        c: String,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, default_value_t = 64)]
        geodesic_cap: usize,
    },
    /// Batch run over a family; writes JSON lines, a summary and a CSV.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Kind {
    RandomTree,
    Cycle,
    Grid,
    NoisyTree,
    BinaryTree,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub chords: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    /// JSON `ExperimentConfig`; replaces the family and parameter flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub chords: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub instances: usize,
    /// Size sweep, one instance per entry (`n`, `k` or depth by kind).
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', default_value = "delta,splice,triangle")]
    pub tasks: Vec<experiment::Task>,
    #[arg(long, default_value = "1")]
    pub lambda: String,
    #[arg(long, default_value = "0")]
    pub c: String,
    #[arg(long, default_value_t = 64)]
    pub geodesic_cap: usize,
    #[arg(long, default_value_t = 10_000)]
    pub budget: usize,
    /// Triangles per instance.
    #[arg(long, default_value_t = 5)]
    pub triangles: usize,
    #[arg(long, default_value_t = 48)]
    pub slim_max_n: usize,
    /// JSON-lines record file.
    #[arg(long)]
    pub out: PathBuf,
    /// Summary JSON file.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// What a command prints, plus a hard invariant failure if one was
/// observed. Errors exit with status 2, failures with status 1.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub failure: Option<String>,
}

/// Runs a parsed command.
pub fn run(cli: Cli) -> CliResult<Outcome> {
    match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be positive".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(|| commands::dispatch(cli.command, cli.json)),
        None => commands::dispatch(cli.command, cli.json),
    }
}
