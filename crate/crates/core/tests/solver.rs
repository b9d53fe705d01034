use nalgebra::{DMatrix, DVector};
use wg_biharmonic::analysis::Example;
use wg_biharmonic::mesh::{unit_square, Mesh, Point};
use wg_biharmonic::solver::{
    assemble_full, check_equivalence, condense, solve_problem, DofMap, Formulation, Homogeneous, Problem,
    SolverMethod, WgFunction,
};
use wg_biharmonic::{Error, Execution};

struct Quadratic;

impl Problem for Quadratic {
    fn load(&self, _: Point) -> f64 {
        0.0
    }
    fn boundary_value(&self, p: Point) -> f64 {
        p[0] * p[0] + p[1] * p[1]
    }
    fn boundary_flux(&self, p: Point, n: [f64; 2]) -> f64 {
        2.0 * (p[0] * n[0] + p[1] * n[1])
    }
}

fn split(a: &DMatrix<f64>, n0: usize) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let ne = a.nrows() - n0;
    (
        a.view((0, 0), (n0, n0)).clone_owned(),
        a.view((0, n0), (n0, ne)).clone_owned(),
        a.view((n0, 0), (ne, n0)).clone_owned(),
        a.view((n0, n0), (ne, ne)).clone_owned(),
    )
}

#[test]
fn condensed_system_is_the_schur_complement_of_the_full_system() {
    let mesh = unit_square(3).unwrap();
    for k in [2, 3] {
        let problem = Example::Two.solution();
        let full = assemble_full(&mesh, k, problem, Execution::Serial).unwrap();
        let reduced = condense(&mesh, k, problem, Execution::Serial).unwrap();
        let n0 = full.dofmap.n_interior();

        let (k00, k0e, ke0, kee) = split(&full.matrix.to_dense(), n0);
        let b = DVector::from_vec(full.rhs.clone());
        let chol = k00.cholesky().expect("interior block is SPD");
        let schur = kee - &ke0 * chol.solve(&k0e);
        let rhs = b.rows(n0, b.len() - n0) - ke0 * chol.solve(&b.rows(0, n0).clone_owned());

        let s = reduced.matrix.to_dense();
        let scale = schur.amax();
        assert!((s - &schur).amax() <= 1e-10 * scale, "k={k}");
        let r = DVector::from_vec(reduced.rhs.clone());
        assert!((r - rhs).amax() <= 1e-10 * b.amax(), "k={k}");
    }
}

#[test]
fn assembled_matrices_are_symmetric() {
    let mesh = unit_square(4).unwrap();
    for k in [2, 3] {
        let full = assemble_full(&mesh, k, &Homogeneous, Execution::Parallel).unwrap();
        let reduced = condense(&mesh, k, &Homogeneous, Execution::Parallel).unwrap();
        assert!(full.matrix.asymmetry() <= 1e-12 * full.matrix.max_abs());
        assert!(reduced.matrix.asymmetry() <= 1e-12 * reduced.matrix.max_abs());
    }
}

#[test]
fn quadratic_patch_test_is_exact() {
    let mesh = unit_square(4).unwrap();
    for k in [2, 3] {
        let map = DofMap::new(&mesh, k).unwrap();
        let exact_k = WgFunction::project_exact(
            &mesh,
            &map,
            |p| Quadratic.boundary_value(p),
            |p| [2.0 * p[0], 2.0 * p[1]],
            Execution::Serial,
        )
        .unwrap();
        for formulation in [Formulation::Full, Formulation::Condensed] {
            let (uh, _) =
                solve_problem(&mesh, k, &Quadratic, formulation, SolverMethod::Direct, Execution::Parallel).unwrap();
            let err = uh.max_abs_diff(&exact_k);
            assert!(err <= 1e-9, "k={k}, {formulation:?}: {err}");
        }
    }
}

#[test]
fn homogeneous_problem_has_zero_solution() {
    let mesh = unit_square(4).unwrap();
    for formulation in [Formulation::Full, Formulation::Condensed] {
        let (uh, _) =
            solve_problem(&mesh, 2, &Homogeneous, formulation, SolverMethod::Direct, Execution::Serial).unwrap();
        assert_eq!(uh.max_abs(), 0.0);
    }
}

#[test]
fn full_and_condensed_solutions_agree() {
    for ex in [Example::One, Example::Two, Example::Three] {
        for k in [2, 3] {
            let mesh = ex.mesh(2).unwrap();
            let diff = check_equivalence(&mesh, k, ex.solution(), Execution::Parallel).unwrap();
            assert!(diff <= 1e-8, "example {ex}, k={k}: {diff}");
        }
    }
}

#[test]
fn condensed_matrix_is_positive_definite() {
    let mesh = unit_square(4).unwrap();
    let reduced = condense(&mesh, 2, &Homogeneous, Execution::Serial).unwrap();
    let eig = reduced.matrix.to_dense().symmetric_eigenvalues();
    assert!(eig.min() > 0.0, "min eigenvalue {}", eig.min());
}

#[test]
fn condensation_halves_the_unknowns() {
    for n in [16, 32] {
        let mesh = unit_square(n).unwrap();
        let r2 = {
            let m = DofMap::new(&mesh, 2).unwrap();
            m.n_condensed() as f64 / m.n_full() as f64
        };
        let r3 = {
            let m = DofMap::new(&mesh, 3).unwrap();
            m.n_condensed() as f64 / m.n_full() as f64
        };
        assert!((0.45..=0.55).contains(&r2), "n={n}: {r2}");
        assert!(r3 <= 0.55, "n={n}: {r3}");
    }
}

#[test]
fn full_solution_satisfies_the_discrete_equations() {
    let mesh = unit_square(8).unwrap();
    let problem = Example::One.solution();
    let full = assemble_full(&mesh, 2, problem, Execution::Parallel).unwrap();
    let (x, report) = wg_biharmonic::solver::solve(&full.matrix, &full.rhs, SolverMethod::Direct).unwrap();
    let r: Vec<f64> = full.matrix.mul_vec(&x).iter().zip(&full.rhs).map(|(a, b)| a - b).collect();
    let norm = |v: &[f64]| v.iter().map(|t| t * t).sum::<f64>().sqrt();
    assert!(norm(&r) <= 1e-10 * norm(&full.rhs));
    assert!(report.residual <= 1e-10);
}

#[test]
fn iterative_solver_matches_direct_on_small_system() {
    let mesh = unit_square(4).unwrap();
    let problem = Example::Two.solution();
    let (direct, _) = solve_problem(
        &mesh,
        2,
        problem,
        Formulation::Condensed,
        SolverMethod::Direct,
        Execution::Serial,
    )
    .unwrap();
    let (cg, report) = solve_problem(
        &mesh,
        2,
        problem,
        Formulation::Condensed,
        SolverMethod::Iterative { tolerance: 1e-12 },
        Execution::Serial,
    )
    .unwrap();
    assert!(report.residual <= 1e-12);
    assert!(direct.max_abs_diff(&cg) <= 1e-6 * direct.max_abs(), "{report}");
}

#[test]
fn serial_and_parallel_assembly_are_identical() {
    let mesh = unit_square(6).unwrap();
    let problem = Example::Two.solution();
    let a = condense(&mesh, 3, problem, Execution::Serial).unwrap();
    let b = condense(&mesh, 3, problem, Execution::Parallel).unwrap();
    assert_eq!(a.matrix, b.matrix);
    assert_eq!(a.rhs, b.rhs);
}

#[test]
fn degenerate_element_is_reported_with_its_index() {
    let vertices = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [2.0, 0.0], [3.0, 1e-9]];
    let mesh = Mesh::new(vertices, vec![[0, 1, 2], [1, 3, 4]]).unwrap();
    match condense(&mesh, 2, &Homogeneous, Execution::Serial) {
        Err(Error::DegenerateElement { element, .. }) => assert_eq!(element, 1),
        other => panic!("expected a degenerate element error, got {other:?}"),
    }
}

#[test]
fn unsupported_degree_is_rejected() {
    let mesh = unit_square(2).unwrap();
    assert!(condense(&mesh, 1, &Homogeneous, Execution::Serial).is_err());
}
