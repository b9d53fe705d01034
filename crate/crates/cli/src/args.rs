use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "wgbh", version, about = "Weak Galerkin solver for the clamped biharmonic equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one problem and report errors against the exact solution.
    Solve(SolveArgs),
    /// Run a mesh refinement study and emit the error table.
    Convergence(ConvergenceArgs),
    /// Run the invariant suite; exit status 0 only if every check passes.
    Validate(ValidateArgs),
    /// Export or inspect meshes.
    #[command(subcommand)]
    Mesh(MeshCommand),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormulationArg {
    Full,
    Schur,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverArg {
    Direct,
    Iterative,
}

#[derive(Clone, Debug, Default, Args)]
pub struct Common {
    /// TOML config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Example id: 1, 1v, 2 or 3.
    #[arg(long)]
    pub example: Option<String>,
    /// Polynomial order k (at least 2).
    #[arg(long)]
    pub k: Option<usize>,
    /// Full system or statically condensed (Schur) system.
    #[arg(long, value_enum)]
    pub method: Option<FormulationArg>,
    /// Linear solver for the global system.
    #[arg(long, value_enum)]
    pub solver: Option<SolverArg>,
    /// Relative residual tolerance of the iterative solver.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Run element loops on a single thread.
    #[arg(long)]
    pub serial: bool,
    /// Seed for randomized checks.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: Common,
    /// Unit square with n x n cells.
    #[arg(long)]
    pub n: Option<usize>,
    /// Refinement level of the example's mesh family.
    #[arg(long)]
    pub level: Option<usize>,
    /// Mesh file in the wgmesh text format.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Write the solution coefficients here.
    #[arg(long)]
    pub solution: Option<PathBuf>,
    /// Write the solve report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Write the global matrix in Matrix Market format.
    #[arg(long)]
    pub export_matrix: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub common: Common,
    /// Number of refinement levels.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Write the table as CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write the table as markdown here.
    #[arg(long)]
    pub markdown: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Unit square with n x n cells.
    #[arg(long)]
    pub n: Option<usize>,
    /// Refinement level of the example's mesh family.
    #[arg(long)]
    pub level: Option<usize>,
    /// Mesh file in the wgmesh text format.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Random triangles used by the element-level checks.
    #[arg(long)]
    pub elements: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum MeshCommand {
    /// Write an example mesh in the wgmesh text format.
    Export(MeshExportArgs),
    /// Print counts, size and invariant report of a mesh file.
    Inspect(MeshInspectArgs),
}

#[derive(Debug, Args)]
pub struct MeshExportArgs {
    /// Example whose mesh family is used.
    #[arg(long, default_value = "1")]
    pub example: String,
    /// Unit square with n x n cells.
    #[arg(long)]
    pub n: Option<usize>,
    /// Refinement level of the example's mesh family.
    #[arg(long)]
    pub level: Option<usize>,
    /// Output file; stdout if absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MeshInspectArgs {
    pub path: PathBuf,
}
