use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn wgbh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wgbh"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn field(out: &str, key: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no `{key}` in\n{out}"))
        .parse()
        .unwrap()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn csv_rows(p: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn solve_prints_both_error_norms() {
    let o = wgbh(&["solve", "--example", "2", "--k", "2", "--n", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(field(&out, "err_H2") > 0.0);
    assert!(field(&out, "err_L2") > 0.0);
    assert_eq!(field(&out, "triangles"), 128.0);
}

#[test]
fn full_and_schur_give_identical_errors() {
    let full = stdout(&wgbh(&["solve", "--example", "1", "--k", "2", "--n", "4", "--method", "full"]));
    let schur = stdout(&wgbh(&["solve", "--example", "1", "--k", "2", "--n", "4", "--method", "schur"]));
    for key in ["err_H2", "err_L2"] {
        let (a, b) = (field(&full, key), field(&schur, key));
        assert!((a - b).abs() <= 5e-9 * a.abs(), "{key}: {a} vs {b}");
    }
}

#[test]
fn usage_errors_exit_with_one() {
    for args in [
        &["solve", "--example", "1", "--k", "1", "--n", "4"][..],
        &["solve", "--bogus"],
        &["solve", "--example", "7"],
        &["solve", "--example", "3", "--n", "4"],
        &["solve", "--n", "4", "--level", "2"],
        &["solve", "--solver", "iterative", "--tol", "1e-2"],
        &["convergence", "--levels", "0"],
        &["frobnicate"],
    ] {
        let o = wgbh(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn help_exits_with_zero() {
    assert_eq!(wgbh(&["--help"]).status.code(), Some(0));
    assert_eq!(wgbh(&["solve", "--help"]).status.code(), Some(0));
}

#[test]
fn solve_writes_solution_report_and_matrix() {
    let dir = TempDir::new().unwrap();
    let (sol, rep, mtx) = (path(&dir, "u.txt"), path(&dir, "report.txt"), path(&dir, "k.mtx"));
    let o = wgbh(&[
        "solve", "--example", "2", "--n", "4", "--solution", &sol, "--report", &rep, "--export-matrix", &mtx,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(fs::read_to_string(&sol).unwrap().starts_with("wgsolution 1\nk 2\n"));
    assert_eq!(fs::read_to_string(&rep).unwrap(), stdout(&o));
    let matrix = fs::read_to_string(&mtx).unwrap();
    assert!(matrix.starts_with("%%MatrixMarket matrix coordinate real"));
    let unknowns = field(&stdout(&o), "unknowns") as usize;
    let size = matrix.lines().find(|l| !l.starts_with('%')).unwrap();
    assert!(size.starts_with(&format!("{unknowns} {unknowns} ")), "{size}");
}

#[test]
fn iterative_solver_runs_within_tolerance() {
    let o = wgbh(&["solve", "--example", "2", "--n", "4", "--solver", "iterative", "--tol", "1e-10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(field(&out, "residual") <= 1e-10);
    assert!(field(&out, "iterations") > 0.0);
}

#[test]
fn single_level_convergence_has_empty_rates() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("t.csv");
    let o = wgbh(&["convergence", "--example", "1", "--levels", "1", "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("level,h,err_H2,rate_H2,err_L2,rate_L2\n"));
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][3], "");
    assert_eq!(rows[0][5], "");
}

#[test]
fn convergence_k3_rates_approach_two_and_four() {
    let dir = TempDir::new().unwrap();
    let (csv, md) = (dir.path().join("t.csv"), dir.path().join("t.md"));
    let o = wgbh(&[
        "convergence", "--example", "1", "--k", "3", "--levels", "4",
        "--csv", csv.to_str().unwrap(), "--markdown", md.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let last = csv_rows(&csv).pop().unwrap();
    let (r2, r0): (f64, f64) = (last[3].parse().unwrap(), last[5].parse().unwrap());
    assert!((1.8..=2.2).contains(&r2), "{r2}");
    assert!((3.6..=4.3).contains(&r0), "{r0}");
    assert!(fs::read_to_string(&md).unwrap().contains("| 1/32 |"));
}

#[test]
fn convergence_singular_example_h2_rate() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("t.csv");
    let o = wgbh(&["convergence", "--example", "3", "--k", "2", "--levels", "5", "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("| Level 5 |"));
    let r2: f64 = csv_rows(&csv).pop().unwrap()[3].parse().unwrap();
    assert!((0.60..=0.75).contains(&r2), "{r2}");
}

#[test]
fn convergence_csv_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (path(&dir, "a.csv"), path(&dir, "b.csv"));
    for (p, extra) in [(&a, None), (&b, Some("--serial"))] {
        let mut args = vec!["convergence", "--example", "2", "--levels", "3", "--csv", p];
        args.extend(extra);
        assert_eq!(wgbh(&args).status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn failed_level_reports_partial_table_and_exits_two() {
    let dir = TempDir::new().unwrap();
    let csv = path(&dir, "t.csv");
    let o = wgbh(&[
        "convergence", "--example", "2", "--levels", "2", "--solver", "iterative", "--tol", "1e-300", "--csv", &csv,
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("level 1 failed"), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&csv).unwrap(), "level,h,err_H2,rate_H2,err_L2,rate_L2\n");
}

#[test]
fn validate_default_passes() {
    let o = wgbh(&["validate"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("validate: all 9 checks passed"));
}

#[test]
fn validate_verdict_does_not_depend_on_seed() {
    for seed in ["1", "99"] {
        let o = wgbh(&["validate", "--k", "3", "--seed", seed, "--elements", "10"]);
        assert_eq!(o.status.code(), Some(0), "seed {seed}: {}", stdout(&o));
    }
}

#[test]
fn validate_names_failing_invariant_on_flipped_mesh() {
    let dir = TempDir::new().unwrap();
    let good = path(&dir, "good.txt");
    assert_eq!(wgbh(&["mesh", "export", "--n", "2", "-o", &good]).status.code(), Some(0));
    let text = fs::read_to_string(&good).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let t = lines.iter().position(|l| l.starts_with("T ")).unwrap();
    let v: Vec<&str> = lines[t + 2].split_whitespace().collect();
    lines[t + 2] = format!("{} {} {}", v[0], v[2], v[1]);
    let flipped = path(&dir, "flipped.txt");
    fs::write(&flipped, lines.join("\n")).unwrap();

    let o = wgbh(&["validate", "--mesh", &flipped]);
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    assert!(out.contains("FAIL  interior edge sign cancellation"), "{out}");
    assert!(out.contains("adjacent orientation signs sum to"), "{out}");
    assert!(stderr(&o).contains("first failing invariant: mesh invariants"), "{}", stderr(&o));

    assert_eq!(wgbh(&["mesh", "inspect", &good]).status.code(), Some(0));
    assert_eq!(wgbh(&["mesh", "inspect", &flipped]).status.code(), Some(2));
}

#[test]
fn mesh_export_round_trips_through_solve() {
    let dir = TempDir::new().unwrap();
    let m = path(&dir, "l.txt");
    assert_eq!(wgbh(&["mesh", "export", "--example", "3", "--level", "2", "-o", &m]).status.code(), Some(0));
    let from_file = stdout(&wgbh(&["solve", "--example", "3", "--mesh", &m]));
    let from_level = stdout(&wgbh(&["solve", "--example", "3", "--level", "2"]));
    assert_eq!(field(&from_file, "err_H2"), field(&from_level, "err_H2"));
    let inspect = stdout(&wgbh(&["mesh", "inspect", &m]));
    assert!(inspect.contains("triangles = 24"), "{inspect}");
    assert!(inspect.contains("mesh is valid"), "{inspect}");
}

#[test]
fn malformed_mesh_file_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let m = path(&dir, "bad.txt");
    fs::write(&m, "wgmesh 1\nV 1\n0.0 zero\n").unwrap();
    let o = wgbh(&["solve", "--mesh", &m]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = TempDir::new().unwrap();
    let cfg = path(&dir, "run.toml");
    fs::write(
        &cfg,
        "[problem]\nexample = 2\nk = 3\n\n[mesh]\nn = 4\n\n[solver]\nformulation = \"full\"\n",
    )
    .unwrap();
    let from_file = stdout(&wgbh(&["solve", "--config", &cfg]));
    assert!(from_file.contains("example = 2\nk = 3\n"), "{from_file}");
    assert!(from_file.contains("formulation = full"));
    assert!(from_file.contains("mesh = unit square, n = 4"));

    let overridden = stdout(&wgbh(&["solve", "--config", &cfg, "--k", "2", "--method", "schur"]));
    assert!(overridden.contains("k = 2\n"), "{overridden}");
    assert!(overridden.contains("formulation = schur"));

    fs::write(&cfg, "[problem]\norder = 2\n").unwrap();
    assert_eq!(wgbh(&["solve", "--config", &cfg]).status.code(), Some(1));
    assert_eq!(wgbh(&["solve", "--config", &path(&dir, "missing.toml")]).status.code(), Some(1));
}
