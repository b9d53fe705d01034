//! Convergence studies on sequences of uniformly refined meshes.

use std::fmt::Write as _;

use crate::analysis::manufactured::{Domain, Example};
use crate::analysis::norms::{errors, rate};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::solver::{solve_problem, Formulation, SolverMethod};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub level: usize,
    pub h: f64,
    pub unknowns: usize,
    pub err_h2: f64,
    pub rate_h2: Option<f64>,
    pub err_l2: f64,
    pub rate_l2: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub example: Example,
    pub k: usize,
    pub rows: Vec<ConvergenceRow>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StudyOptions {
    pub formulation: Formulation,
    pub method: SolverMethod,
    pub exec: Execution,
}

/// Result of a study. If a level fails, `table` holds the levels completed
/// before it and `failure` the error.
#[derive(Debug)]
pub struct Study {
    pub table: ConvergenceTable,
    pub failure: Option<(usize, Error)>,
}

fn fmt_rate(r: Option<f64>) -> String {
    r.map(|v| format!("{v:.4}")).unwrap_or_default()
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("level,h,err_H2,rate_H2,err_L2,rate_L2\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{:e},{:.10e},{},{:.10e},{}",
                r.level,
                r.h,
                r.err_h2,
                fmt_rate(r.rate_h2),
                r.err_l2,
                fmt_rate(r.rate_l2)
            );
        }
        s
    }

    pub fn to_markdown(&self) -> String {
        let lshape = self.example.solution().domain == Domain::LShape;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "| {} | unknowns | \\|\\|\\|Q_h u - u_h\\|\\|\\| | rate | \\|\\|Q_0 u - u_0\\|\\| | rate |",
            if lshape { "Mesh" } else { "h" }
        );
        s.push_str("|---|---:|---:|---:|---:|---:|\n");
        for r in &self.rows {
            let label = if lshape {
                format!("Level {}", r.level)
            } else {
                format!("1/{}", (1.0 / r.h).round() as u64)
            };
            let _ = writeln!(
                s,
                "| {label} | {} | {:.4e} | {} | {:.4e} | {} |",
                r.unknowns,
                r.err_h2,
                fmt_rate(r.rate_h2),
                r.err_l2,
                fmt_rate(r.rate_l2)
            );
        }
        s
    }

    pub fn rates_h2(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.rate_h2).collect()
    }

    pub fn rates_l2(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.rate_l2).collect()
    }
}

/// Solves `example` with degree `k` on levels `1..=levels` and records the
/// errors and observed rates. Stops at the first failing level.
pub fn run_convergence(example: Example, k: usize, levels: usize, options: StudyOptions) -> Study {
    let exact = example.solution();
    let mut table = ConvergenceTable {
        example,
        k,
        rows: Vec::new(),
    };
    for level in 1..=levels {
        let outcome = (|| -> Result<ConvergenceRow> {
            let mesh = example.mesh(level)?;
            let (uh, report) = solve_problem(&mesh, k, exact, options.formulation, options.method, options.exec)?;
            let e = errors(&mesh, &uh, exact, options.exec)?;
            let prev = table.rows.last();
            Ok(ConvergenceRow {
                level,
                h: example.nominal_h(level),
                unknowns: report.unknowns,
                err_h2: e.energy,
                rate_h2: prev.and_then(|p| rate(p.err_h2, e.energy).ok()),
                err_l2: e.l2,
                rate_l2: prev.and_then(|p| rate(p.err_l2, e.l2).ok()),
            })
        })();
        match outcome {
            Ok(row) => table.rows.push(row),
            Err(err) => {
                return Study {
                    table,
                    failure: Some((level, err)),
                }
            }
        }
    }
    Study { table, failure: None }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_level_study_has_rates() {
        let study = run_convergence(Example::Two, 2, 2, StudyOptions::default());
        assert!(study.failure.is_none());
        let t = &study.table;
        assert_eq!(t.rows.len(), 2);
        assert!(t.rows[0].rate_h2.is_none());
        assert!(t.rows[1].rate_h2.unwrap() > 0.5);
        let csv = t.to_csv();
        assert!(csv.starts_with("level,h,err_H2,rate_H2,err_L2,rate_L2\n"));
        assert_eq!(csv.lines().count(), 3);
        assert!(t.to_markdown().contains("| 1/8 |"));
    }

    #[test]
    fn csv_is_deterministic_across_execution_modes() {
        let serial = StudyOptions {
            exec: Execution::Serial,
            ..Default::default()
        };
        let a = run_convergence(Example::One, 2, 2, serial).table.to_csv();
        let b = run_convergence(Example::One, 2, 2, StudyOptions::default()).table.to_csv();
        assert_eq!(a, b);
    }

    #[test]
    fn failing_level_truncates_table() {
        let options = StudyOptions {
            method: SolverMethod::Iterative { tolerance: 1e-300 },
            ..Default::default()
        };
        let study = run_convergence(Example::Two, 2, 3, options);
        let (level, err) = study.failure.expect("unreachable tolerance must fail");
        assert_eq!(level, 1);
        assert!(matches!(err, Error::CgNotConverged { .. }));
        assert!(study.table.rows.is_empty());
    }

    #[test]
    fn lshape_table_labels_levels() {
        let study = run_convergence(Example::Three, 2, 1, StudyOptions::default());
        assert!(study.table.to_markdown().contains("| Level 1 |"));
    }
}
