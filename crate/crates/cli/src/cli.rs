//! Command-line surface. Every flag can also be set through an environment
//! variable named `STOKES_PERTURB_<FLAG>`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stokes_perturb_core::BcMode;

#[derive(Debug, Parser)]
#[command(name = "stokes-perturb", version, about = "Stokes and Laplace resolvents on pixel domains with slits")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// JSON config (solver options, shift, experiment).
    #[arg(long, global = true, env = "STOKES_PERTURB_CONFIG")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out", env = "STOKES_PERTURB_OUT")]
    pub out: PathBuf,
    /// Seed for sampled quantities.
    #[arg(long, global = true, default_value_t = 0, env = "STOKES_PERTURB_SEED")]
    pub seed: u64,
    /// Worker threads for experiment levels.
    #[arg(long, global = true, default_value_t = 1, env = "STOKES_PERTURB_THREADS")]
    pub threads: usize,
    /// Record wall-clock seconds in reports (outputs are then no longer
    /// byte-reproducible).
    #[arg(long, global = true, env = "STOKES_PERTURB_TIMINGS")]
    pub timings: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rasterize a shape and write a mask file.
    Shapes(ShapesArgs),
    /// Solve one resolvent problem.
    Solve(SolveArgs),
    /// Leray-decompose a face field.
    Project(ProjectArgs),
    /// Run the experiment described by `--config`.
    Sequence,
    /// Summarize a field file and render it as SVG.
    Dump(DumpArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShapeKind {
    Square,
    Disk,
    Rect,
    SlitSquare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Center,
    Inner,
    Outer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OperatorArg {
    Laplace,
    Stokes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LaplaceKind {
    Scalar,
    Vector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RhsArg {
    Gradient,
    Constant,
    Vortex,
    Crossflow,
    File,
}

/// Domain selection shared by several subcommands.
#[derive(Debug, Args)]
pub struct DomainArgs {
    /// Mask file; without it the full unit square on `--n` cells is used.
    #[arg(long, env = "STOKES_PERTURB_DOMAIN_FILE")]
    pub domain_file: Option<PathBuf>,
    /// Cells per side of the unit square.
    #[arg(long, default_value_t = 16, env = "STOKES_PERTURB_N")]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct ShapesArgs {
    #[arg(long, value_enum, default_value = "disk", env = "STOKES_PERTURB_SHAPE")]
    pub shape: ShapeKind,
    #[arg(long, default_value_t = 32, env = "STOKES_PERTURB_N")]
    pub n: usize,
    #[arg(long, value_enum, default_value = "center", env = "STOKES_PERTURB_POLICY")]
    pub policy: PolicyArg,
    /// Disk centre or rectangle centre.
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.5, 0.5], env = "STOKES_PERTURB_CENTER")]
    pub center: Vec<f64>,
    #[arg(long, default_value_t = 0.4, env = "STOKES_PERTURB_RADIUS")]
    pub radius: f64,
    #[arg(long, default_value_t = 0.5, env = "STOKES_PERTURB_WIDTH")]
    pub width: f64,
    #[arg(long, default_value_t = 0.5, env = "STOKES_PERTURB_HEIGHT")]
    pub height: f64,
    /// Slit orientation for `slit-square` (middle half of the middle line).
    #[arg(long, value_enum, default_value = "x", env = "STOKES_PERTURB_SLIT_AXIS")]
    pub slit_axis: AxisArg,
    /// Output file name inside `--out`.
    #[arg(long, default_value = "domain.mask", env = "STOKES_PERTURB_NAME")]
    pub name: String,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum, default_value = "stokes", env = "STOKES_PERTURB_OPERATOR")]
    pub operator: OperatorArg,
    #[arg(long, default_value = "weak", value_parser = parse_mode, env = "STOKES_PERTURB_MODE")]
    pub mode: BcMode,
    /// Laplace unknowns: vertex scalars or face vectors.
    #[arg(long, value_enum, default_value = "scalar", env = "STOKES_PERTURB_LAPLACE")]
    pub laplace: LaplaceKind,
    /// Cross-check a Stokes velocity against the stream-function solve.
    #[arg(long, env = "STOKES_PERTURB_ORACLE")]
    pub oracle: bool,
    #[command(flatten)]
    pub domain: DomainArgs,
    #[arg(long, value_enum, default_value = "vortex", env = "STOKES_PERTURB_RHS")]
    pub rhs: RhsArg,
    /// Field CSV used with `--rhs file`.
    #[arg(long, env = "STOKES_PERTURB_RHS_FILE")]
    pub rhs_file: Option<PathBuf>,
    /// Project the Stokes right-hand side before solving.
    #[arg(long, env = "STOKES_PERTURB_PROJECT_RHS")]
    pub project_rhs: bool,
    /// Also write the assembled system as `matrix.txt`.
    #[arg(long, env = "STOKES_PERTURB_DUMP_MATRIX")]
    pub dump_matrix: bool,
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    #[arg(long, default_value = "weak", value_parser = parse_mode, env = "STOKES_PERTURB_MODE")]
    pub mode: BcMode,
    #[command(flatten)]
    pub domain: DomainArgs,
    /// Input field; `file` reads `--field`.
    #[arg(long, value_enum, default_value = "file", env = "STOKES_PERTURB_INPUT")]
    pub input: RhsArg,
    #[arg(long, env = "STOKES_PERTURB_FIELD")]
    pub field: Option<PathBuf>,
    /// Random samples for estimating the gap between the weak and pseudo
    /// solenoidal spaces (uses `--seed`); 0 skips it.
    #[arg(long, default_value_t = 0, env = "STOKES_PERTURB_GAP_SAMPLES")]
    pub gap_samples: usize,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    #[arg(long, env = "STOKES_PERTURB_FIELD")]
    pub field: PathBuf,
    #[command(flatten)]
    pub domain: DomainArgs,
    #[arg(long, default_value = "weak", value_parser = parse_mode, env = "STOKES_PERTURB_MODE")]
    pub mode: BcMode,
}

fn parse_mode(s: &str) -> Result<BcMode, String> {
    s.parse::<BcMode>().map_err(|_| format!("expected `weak` or `pseudo`, got `{s}`"))
}
