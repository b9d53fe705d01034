//! Run configuration: an optional TOML file merged with command-line flags.
//! Flags always win over the file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use wg_biharmonic::analysis::Example;
use wg_biharmonic::solver::{Formulation, SolverMethod};
use wg_biharmonic::Execution;

use crate::args::{Common, FormulationArg, SolverArg};
use crate::CliError;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const MAX_TOLERANCE: f64 = 1e-4;
pub const DEFAULT_SEED: u64 = 2024;
pub const DEFAULT_ELEMENTS: usize = 50;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub problem: ProblemSection,
    #[serde(default)]
    pub mesh: MeshSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub validate: ValidateSection,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ExampleId {
    Number(i64),
    Name(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub example: Option<ExampleId>,
    pub k: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    pub n: Option<usize>,
    pub level: Option<usize>,
    pub levels: Option<usize>,
    pub file: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub formulation: Option<FormulationArg>,
    pub method: Option<SolverArg>,
    pub tolerance: Option<f64>,
    pub serial: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub solution: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub matrix: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub markdown: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateSection {
    pub seed: Option<u64>,
    pub elements: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

/// Where the mesh comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum MeshSource {
    /// `n x n` unit square.
    Square(usize),
    /// Refinement level of the example's default mesh family.
    Level(usize),
    File(PathBuf),
}

/// Fully resolved settings shared by all subcommands.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub example: Example,
    pub k: usize,
    pub formulation: Formulation,
    pub method: SolverMethod,
    pub exec: Execution,
    pub seed: u64,
}

fn parse_example(id: &ExampleId) -> Result<Example, CliError> {
    let s = match id {
        ExampleId::Number(n) => n.to_string(),
        ExampleId::Name(s) => s.clone(),
    };
    s.parse().map_err(|e| CliError::Usage(format!("example `{s}`: {e}")))
}

impl RunConfig {
    pub fn resolve(common: &Common, file: &FileConfig) -> Result<Self, CliError> {
        let example = match &common.example {
            Some(s) => s.parse().map_err(|e| CliError::Usage(format!("example `{s}`: {e}")))?,
            None => file.problem.example.as_ref().map(parse_example).transpose()?.unwrap_or(Example::One),
        };
        let k = common.k.or(file.problem.k).unwrap_or(2);
        if k < 2 {
            return Err(CliError::Usage(format!("k must be at least 2, got {k}")));
        }
        let tolerance = common.tol.or(file.solver.tolerance).unwrap_or(DEFAULT_TOLERANCE);
        if !(tolerance > 0.0 && tolerance <= MAX_TOLERANCE) {
            return Err(CliError::Usage(format!(
                "tolerance must lie in (0, {MAX_TOLERANCE:e}], got {tolerance:e}"
            )));
        }
        let method = match common.solver.or(file.solver.method).unwrap_or(SolverArg::Direct) {
            SolverArg::Direct => SolverMethod::Direct,
            SolverArg::Iterative => SolverMethod::Iterative { tolerance },
        };
        let formulation = match common.method.or(file.solver.formulation).unwrap_or(FormulationArg::Schur) {
            FormulationArg::Full => Formulation::Full,
            FormulationArg::Schur => Formulation::Condensed,
        };
        let serial = common.serial || file.solver.serial.unwrap_or(false);
        Ok(Self {
            example,
            k,
            formulation,
            method,
            exec: if serial { Execution::Serial } else { Execution::Parallel },
            seed: common.seed.or(file.validate.seed).unwrap_or(DEFAULT_SEED),
        })
    }
}

/// Picks the mesh from `--mesh`, `--n` or `--level`, in that order, falling
/// back to the file config and then to `default`.
pub fn mesh_source(
    file_flag: Option<&PathBuf>,
    n: Option<usize>,
    level: Option<usize>,
    config: &MeshSection,
    default: MeshSource,
) -> Result<MeshSource, CliError> {
    let flags = [file_flag.is_some(), n.is_some(), level.is_some()];
    if flags.iter().filter(|&&b| b).count() > 1 {
        return Err(CliError::Usage("use only one of --mesh, --n and --level".into()));
    }
    let source = if let Some(p) = file_flag {
        MeshSource::File(p.clone())
    } else if let Some(n) = n {
        MeshSource::Square(n)
    } else if let Some(l) = level {
        MeshSource::Level(l)
    } else if let Some(p) = &config.file {
        MeshSource::File(p.clone())
    } else if let Some(n) = config.n {
        MeshSource::Square(n)
    } else if let Some(l) = config.level {
        MeshSource::Level(l)
    } else {
        default
    };
    match source {
        MeshSource::Square(0) => Err(CliError::Usage("--n must be at least 1".into())),
        MeshSource::Level(0) => Err(CliError::Usage("levels are numbered from 1".into())),
        s => Ok(s),
    }
}
