use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use wg_biharmonic::analysis::{errors, run_convergence, run_suite, Domain, Example, StudyOptions};
use wg_biharmonic::mesh::unit_square;
use wg_biharmonic::solver::{assemble_full, condense, Formulation, SolverMethod};
use wg_biharmonic::{Error, Mesh};

use crate::args::{ConvergenceArgs, MeshExportArgs, MeshInspectArgs, SolveArgs, ValidateArgs};
use crate::config::{mesh_source, FileConfig, MeshSource, RunConfig, DEFAULT_ELEMENTS};
use crate::CliError;

fn usage_from(err: Error) -> CliError {
    CliError::Usage(err.to_string())
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))
}

fn read_mesh(path: &Path) -> Result<Mesh, CliError> {
    let file = File::open(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Mesh::read_text(BufReader::new(file)).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn build_mesh(source: &MeshSource, example: Example) -> Result<(Mesh, String), CliError> {
    match source {
        MeshSource::Square(n) => {
            if example.solution().domain == Domain::LShape {
                return Err(CliError::Usage(format!(
                    "--n builds a unit square, example {example} lives on the L-shaped domain; use --level"
                )));
            }
            Ok((unit_square(*n).map_err(usage_from)?, format!("unit square, n = {n}")))
        }
        MeshSource::Level(l) => {
            let domain = match example.solution().domain {
                Domain::UnitSquare => "unit square",
                Domain::LShape => "L-shape",
            };
            Ok((example.mesh(*l).map_err(usage_from)?, format!("{domain}, level {l}")))
        }
        MeshSource::File(p) => Ok((read_mesh(p)?, p.display().to_string())),
    }
}

fn method_name(method: SolverMethod) -> String {
    match method {
        SolverMethod::Direct => "direct".into(),
        SolverMethod::Iterative { tolerance } => format!("iterative (tol {tolerance:e})"),
    }
}

fn formulation_name(f: Formulation) -> &'static str {
    match f {
        Formulation::Full => "full",
        Formulation::Condensed => "schur",
    }
}

fn pick<'a>(flag: &'a Option<PathBuf>, file: &'a Option<PathBuf>) -> Option<&'a PathBuf> {
    flag.as_ref().or(file.as_ref())
}

pub fn solve(args: SolveArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let run = RunConfig::resolve(&args.common, &file)?;
    let source = mesh_source(args.mesh.as_ref(), args.n, args.level, &file.mesh, MeshSource::Level(2))?;
    let (mesh, description) = build_mesh(&source, run.example)?;
    let problem = run.example.solution();
    let matrix_path = pick(&args.export_matrix, &file.output.matrix);

    let (uh, report) = match run.formulation {
        Formulation::Full => {
            let sys = assemble_full(&mesh, run.k, problem, run.exec)?;
            if let Some(p) = matrix_path {
                sys.matrix.write_matrix_market(create(p)?)?;
            }
            sys.solve(&mesh, run.method)?
        }
        Formulation::Condensed => {
            let sys = condense(&mesh, run.k, problem, run.exec)?;
            if let Some(p) = matrix_path {
                sys.matrix.write_matrix_market(create(p)?)?;
            }
            sys.solve(&mesh, run.method, run.exec)?
        }
    };
    let err = errors(&mesh, &uh, problem, run.exec)?;

    let mut text = String::new();
    let _ = writeln!(text, "example = {}", run.example);
    let _ = writeln!(text, "k = {}", run.k);
    let _ = writeln!(text, "mesh = {description}");
    let _ = writeln!(text, "triangles = {}", mesh.num_triangles());
    let _ = writeln!(text, "h = {:e}", mesh.h());
    let _ = writeln!(text, "formulation = {}", formulation_name(run.formulation));
    let _ = writeln!(text, "solver = {}", method_name(run.method));
    let _ = writeln!(text, "unknowns = {}", report.unknowns);
    let _ = writeln!(text, "nonzeros = {}", report.nonzeros);
    let _ = writeln!(text, "iterations = {}", report.iterations);
    let _ = writeln!(text, "residual = {:e}", report.residual);
    let _ = writeln!(text, "err_H2 = {:.10e}", err.energy);
    let _ = writeln!(text, "err_L2 = {:.10e}", err.l2);
    print!("{text}");

    if let Some(p) = pick(&args.report, &file.output.report) {
        write_file(p, text.as_bytes())?;
    }
    if let Some(p) = pick(&args.solution, &file.output.solution) {
        let mut out = create(p)?;
        uh.write_text(&mut out)?;
        out.flush().map_err(|e| CliError::Failure(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(())
}

pub fn convergence(args: ConvergenceArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let run = RunConfig::resolve(&args.common, &file)?;
    let levels = args.levels.or(file.mesh.levels).unwrap_or(4);
    if levels == 0 {
        return Err(CliError::Usage("--levels must be at least 1".into()));
    }
    let options = StudyOptions {
        formulation: run.formulation,
        method: run.method,
        exec: run.exec,
    };
    let study = run_convergence(run.example, run.k, levels, options);
    let table = &study.table;

    println!("example {}, k = {}, {} of {levels} levels", run.example, run.k, table.rows.len());
    print!("{}", table.to_markdown());
    if let Some(p) = pick(&args.csv, &file.output.csv) {
        write_file(p, table.to_csv().as_bytes())?;
    }
    if let Some(p) = pick(&args.markdown, &file.output.markdown) {
        write_file(p, table.to_markdown().as_bytes())?;
    }
    match study.failure {
        Some((level, err)) => {
            let kept = match level {
                1 => "no levels completed".to_string(),
                2 => "table holds level 1".to_string(),
                l => format!("table holds levels 1 to {}", l - 1),
            };
            Err(CliError::Failure(format!("level {level} failed: {err}; {kept}")))
        }
        None => Ok(()),
    }
}

pub fn validate(args: ValidateArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let run = RunConfig::resolve(&args.common, &file)?;
    let source = mesh_source(args.mesh.as_ref(), args.n, args.level, &file.mesh, MeshSource::Square(4))?;
    let (mesh, description) = build_mesh(&source, run.example)?;
    let elements = args.elements.or(file.validate.elements).unwrap_or(DEFAULT_ELEMENTS);
    if elements == 0 {
        return Err(CliError::Usage("--elements must be at least 1".into()));
    }

    println!("validating k = {} on {description} (seed {})", run.k, run.seed);
    let checks = run_suite(&mesh, run.k, run.seed, elements, run.exec);
    for c in &checks {
        println!("{c}");
    }
    let failed: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
    if failed.is_empty() {
        println!("validate: all {} checks passed", checks.len());
        return Ok(());
    }
    let names: Vec<_> = failed.iter().map(|c| c.name).collect();
    Err(CliError::Failure(format!(
        "{} of {} checks failed, first failing invariant: {} (failing: {})",
        failed.len(),
        checks.len(),
        names[0],
        names.join(", ")
    )))
}

pub fn mesh_export(args: MeshExportArgs) -> Result<(), CliError> {
    let example: Example = args
        .example
        .parse()
        .map_err(|e| CliError::Usage(format!("example `{}`: {e}", args.example)))?;
    let source = mesh_source(None, args.n, args.level, &Default::default(), MeshSource::Level(1))?;
    let (mesh, _) = build_mesh(&source, example)?;
    match &args.output {
        Some(p) => write_file(p, mesh.to_text().as_bytes()),
        None => io::stdout()
            .write_all(mesh.to_text().as_bytes())
            .map_err(|e| CliError::Failure(e.to_string())),
    }
}

pub fn mesh_inspect(args: MeshInspectArgs) -> Result<(), CliError> {
    let mesh = read_mesh(&args.path)?;
    println!("vertices = {}", mesh.num_vertices());
    println!("triangles = {}", mesh.num_triangles());
    println!("edges = {} ({} on the boundary)", mesh.num_edges(), mesh.num_boundary_edges());
    println!("area = {}", mesh.area());
    println!("h = {:e}", mesh.h());
    let report = mesh.validate();
    print!("{report}");
    if report.is_valid() {
        println!();
        Ok(())
    } else {
        Err(CliError::Failure(format!("{} mesh invariant violations", report.violations.len())))
    }
}
