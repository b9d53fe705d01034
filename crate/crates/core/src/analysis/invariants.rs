//! Self-checks of the discretization that must hold on any valid mesh.
//!
//! Each check returns a [`Check`] rather than panicking, so a whole suite can
//! be run and reported at once.

use std::fmt;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::manufactured::EXAMPLE_2;
use crate::analysis::norms::{energy, triple_bar_norm};
use crate::error::Result;
use crate::mesh::{distance, ElementGeometry, Mesh, Point};
use crate::par::Execution;
use crate::polybasis::{project_edge, project_tri, EdgeBasis, TriProjector};
use crate::solver::{
    check_equivalence, condense, solve, solve_problem, DofMap, Formulation, Problem, SolverMethod, WgFunction,
};
use crate::wg_element::{local_stiffness, project_qh, weak_laplacian_matrix, ElementContext};

pub const COMMUTING_TOLERANCE: f64 = 1e-11;
pub const PATCH_TOLERANCE: f64 = 1e-9;
pub const NORM_IDENTITY_TOLERANCE: f64 = 1e-10;
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-8;

/// Outcome of one named invariant.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name,
            passed,
            detail: detail.into(),
        }
    }

    fn from_result(name: &'static str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((passed, detail)) => Self::new(name, passed, detail),
            Err(e) => Self::new(name, false, format!("error: {e}")),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status}  {}: {}", self.name, self.detail)
    }
}

/// A polynomial `Σ c_ab x^a y^b` in global coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    pub terms: Vec<(usize, usize, f64)>,
}

impl Polynomial {
    pub fn value(&self, p: Point) -> f64 {
        self.terms
            .iter()
            .map(|&(a, b, c)| c * p[0].powi(a as i32) * p[1].powi(b as i32))
            .sum()
    }

    pub fn grad(&self, p: Point) -> [f64; 2] {
        let mut g = [0.0; 2];
        for &(a, b, c) in &self.terms {
            if a > 0 {
                g[0] += c * a as f64 * p[0].powi(a as i32 - 1) * p[1].powi(b as i32);
            }
            if b > 0 {
                g[1] += c * b as f64 * p[0].powi(a as i32) * p[1].powi(b as i32 - 1);
            }
        }
        g
    }

    pub fn laplacian(&self, p: Point) -> f64 {
        let mut s = 0.0;
        for &(a, b, c) in &self.terms {
            if a > 1 {
                s += c * (a * (a - 1)) as f64 * p[0].powi(a as i32 - 2) * p[1].powi(b as i32);
            }
            if b > 1 {
                s += c * (b * (b - 1)) as f64 * p[0].powi(a as i32) * p[1].powi(b as i32 - 2);
            }
        }
        s
    }
}

/// Random polynomial of total degree `degree` with coefficients in `[-1, 1]`.
pub fn random_polynomial<R: Rng>(rng: &mut R, degree: usize) -> Polynomial {
    let mut terms = Vec::new();
    for d in 0..=degree {
        for b in 0..=d {
            terms.push((d - b, b, rng.random_range(-1.0..1.0)));
        }
    }
    Polynomial { terms }
}

/// Random shape-regular, counterclockwise triangle in `[-1, 1]²`.
pub fn random_element<R: Rng>(rng: &mut R) -> ElementGeometry {
    loop {
        let v: [Point; 3] = std::array::from_fn(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
        let g = ElementGeometry::new(v);
        let min_edge = (0..3).map(|i| distance(v[i], v[(i + 1) % 3])).fold(f64::INFINITY, f64::min);
        if g.area > 0.1 * g.diameter * g.diameter && min_edge > 0.3 * g.diameter {
            return g;
        }
    }
}

fn random_signs<R: Rng>(rng: &mut R) -> [f64; 3] {
    std::array::from_fn(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 })
}

/// `u = x² + y²`, `f = 0`; reproduced exactly for every `k >= 2`.
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

pub fn mesh_invariants(mesh: &Mesh) -> Check {
    let report = mesh.validate();
    let detail = if report.is_valid() {
        format!(
            "{} vertices, {} edges, {} triangles",
            mesh.num_vertices(),
            mesh.num_edges(),
            mesh.num_triangles()
        )
    } else {
        report
            .violations
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("; ")
    };
    Check::new("mesh invariants", report.is_valid(), detail)
}

/// `Δ_w Q_h u = Q_{k−2} Δu` for random `u ∈ P_k` on random elements, measured
/// in `L2(T)`.
pub fn commuting_identity(seed: u64, elements: usize, degrees: &[usize]) -> Check {
    let r = (|| -> Result<(bool, String)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for i in 0..elements {
            let k = degrees[i % degrees.len()];
            let ctx = ElementContext::new(random_element(&mut rng), random_signs(&mut rng), k)?;
            let ops = local_stiffness(&ctx)?;
            let u = random_polynomial(&mut rng, k);
            let v = project_qh(&ctx, |p| u.value(p), |p| u.grad(p))?;
            let lhs = ops.weak_laplacian_of(&v);
            let rhs = TriProjector::new(&ctx.geom, k - 2, ctx.data_degree())?.project(|p| u.laplacian(p));
            let d = lhs - rhs;
            worst = worst.max(d.dot(&(&ops.laplacian_mass * &d)).sqrt());
        }
        Ok((
            worst <= COMMUTING_TOLERANCE,
            format!("{elements} elements, max L2 defect {worst:.2e} (tol {COMMUTING_TOLERANCE:.0e})"),
        ))
    })();
    Check::from_result("commuting identity", r)
}

/// The stabilizer is positive semidefinite and vanishes on `Q_h P_k`.
pub fn stabilizer_properties(seed: u64, elements: usize, degrees: &[usize]) -> Check {
    let r = (|| -> Result<(bool, String)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut min_eig: f64 = 0.0;
        let mut max_residual: f64 = 0.0;
        for i in 0..elements {
            let k = degrees[i % degrees.len()];
            let ctx = ElementContext::new(random_element(&mut rng), random_signs(&mut rng), k)?;
            let s = local_stiffness(&ctx)?.stabilizer;
            let scale = s.amax();
            min_eig = min_eig.min(s.clone().symmetric_eigenvalues().min() / scale);
            let u = random_polynomial(&mut rng, k);
            let v = project_qh(&ctx, |p| u.value(p), |p| u.grad(p))?;
            max_residual = max_residual.max((&s * &v).amax() / (scale * v.amax()));
        }
        Ok((
            min_eig >= -1e-12 && max_residual <= 1e-10,
            format!("min eigenvalue / max entry {min_eig:.2e}, |S Q_h u| relative {max_residual:.2e}"),
        ))
    })();
    Check::from_result("stabilizer PSD and consistent", r)
}

/// Projecting a polynomial of the target space returns it unchanged, measured
/// in `L2(T)` relative to its norm, and in Legendre coefficients on an edge.
pub fn projection_idempotence(seed: u64, elements: usize, degrees: &[usize]) -> Check {
    let r = (|| -> Result<(bool, String)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for i in 0..elements {
            let k = degrees[i % degrees.len()];
            let geom = random_element(&mut rng);
            let proj = TriProjector::new(&geom, k, 2 * k + 4)?;
            let c = DVector::from_fn(proj.basis().dim(), |_, _| rng.random_range(-1.0..1.0));
            let basis = proj.basis().clone();
            let again = project_tri(|p| basis.evaluate(c.as_slice(), p), k, &geom, 2 * k + 4)?;
            let d = DVector::from_vec(again) - &c;
            let m = proj.mass();
            worst = worst.max((d.dot(&(m * &d)) / c.dot(&(m * &c))).sqrt());

            let (a, b) = (geom.vertices[0], geom.vertices[1]);
            let once = project_edge(|p| basis.evaluate(c.as_slice(), p), k - 1, a, b, 2 * k + 4)?;
            let edge = EdgeBasis::new(distance(a, b), k - 1);
            let twice = project_edge(
                |p| edge.evaluate(&once, 2.0 * distance(a, p) / distance(a, b) - 1.0),
                k - 1,
                a,
                b,
                2 * k + 4,
            )?;
            for (x, y) in once.iter().zip(&twice) {
                worst = worst.max((x - y).abs());
            }
        }
        Ok((worst <= 1e-11, format!("max relative change {worst:.2e}")))
    })();
    Check::from_result("projection idempotence", r)
}

/// On every interior edge the two neighbours see opposite orientations, and
/// the normal-trace contributions to the element-mean weak Laplacian cancel.
pub fn sign_cancellation(mesh: &Mesh, k: usize) -> Check {
    let r = (|| -> Result<(bool, String)> {
        let mut contrib = vec![(0.0f64, 0.0f64, 0usize); mesh.num_edges()];
        for t in 0..mesh.num_triangles() {
            let ctx = ElementContext::from_mesh(mesh, t, k)?;
            let (l, _) = weak_laplacian_matrix(&ctx)?;
            for (i, te) in mesh.tri_edges(t).iter().enumerate() {
                // row 0 tests against the constant: ∫_e v_n n_e·n_T
                let value = l[(0, ctx.layout.vn(i, 0))];
                let c = &mut contrib[te.edge];
                c.0 += value;
                c.1 = c.1.max(value.abs());
                c.2 += 1;
            }
        }
        let mut worst: f64 = 0.0;
        let mut interior = 0;
        for (e, edge) in mesh.edges().iter().enumerate() {
            if edge.is_boundary {
                continue;
            }
            interior += 1;
            let (sum, scale, count) = contrib[e];
            if count != 2 {
                return Ok((false, format!("edge {e} has {count} neighbours")));
            }
            worst = worst.max(sum.abs() / scale);
        }
        Ok((worst <= 1e-12, format!("{interior} interior edges, max relative imbalance {worst:.2e}")))
    })();
    Check::from_result("interior edge sign cancellation", r)
}

/// `|||v|||² = a(v, v)` for random weak functions.
pub fn norm_identity(mesh: &Mesh, k: usize, seed: u64, exec: Execution) -> Check {
    let r = (|| -> Result<(bool, String)> {
        let map = DofMap::new(mesh, k)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..3 {
            let mut v = WgFunction::zeros(&map);
            v.interior.iter_mut().for_each(|x| *x = rng.random_range(-1.0..1.0));
            v.traces.iter_mut().for_each(|x| *x = rng.random_range(-1.0..1.0));
            let by_norm = triple_bar_norm(mesh, &v, exec)?.powi(2);
            let by_form = energy(mesh, &v, exec)?;
            worst = worst.max((by_norm - by_form).abs() / by_form);
        }
        Ok((
            worst <= NORM_IDENTITY_TOLERANCE,
            format!("max relative gap {worst:.2e} (tol {NORM_IDENTITY_TOLERANCE:.0e})"),
        ))
    })();
    Check::from_result("norm equals bilinear form", r)
}

/// The discrete solution for `u = x² + y²` is `Q_h u` up to rounding.
pub fn patch_test(mesh: &Mesh, k: usize, exec: Execution) -> Check {
    let r = (|| -> Result<(bool, String)> {
        let map = DofMap::new(mesh, k)?;
        let exact = WgFunction::project_exact(
            mesh,
            &map,
            |p| Quadratic.boundary_value(p),
            |p| [2.0 * p[0], 2.0 * p[1]],
            exec,
        )?;
        let mut worst: f64 = 0.0;
        for formulation in [Formulation::Full, Formulation::Condensed] {
            let (uh, _) = solve_problem(mesh, k, &Quadratic, formulation, SolverMethod::Direct, exec)?;
            worst = worst.max(uh.max_abs_diff(&exact));
        }
        Ok((
            worst <= PATCH_TOLERANCE,
            format!("max DOF error {worst:.2e} (tol {PATCH_TOLERANCE:.0e})"),
        ))
    })();
    Check::from_result("quadratic patch test", r)
}

/// Dense eigenvalues are only computed up to this many unknowns.
pub const DENSE_EIGEN_LIMIT: usize = 1500;

/// The condensed matrix is symmetric and admits a Cholesky factorization;
/// on small systems the smallest eigenvalue is also computed.
pub fn condensed_spd(mesh: &Mesh, k: usize, exec: Execution) -> Check {
    let r = (|| -> Result<(bool, String)> {
        let sys = condense(mesh, k, &EXAMPLE_2, exec)?;
        let a = &sys.matrix;
        let symmetric = a.asymmetry() <= 1e-12 * a.max_abs();
        let factorizes = solve(a, &sys.rhs, SolverMethod::Direct).is_ok();
        let mut detail = format!("{} unknowns, symmetric: {symmetric}, Cholesky: {factorizes}", a.n());
        let mut positive = true;
        if a.n() > 0 && a.n() <= DENSE_EIGEN_LIMIT {
            let min = a.to_dense().symmetric_eigenvalues().min();
            positive = min > 0.0;
            detail.push_str(&format!(", min eigenvalue {min:.3e}"));
        }
        Ok((symmetric && factorizes && positive, detail))
    })();
    Check::from_result("condensed system SPD", r)
}

/// Full and condensed systems give the same discrete solution.
pub fn schur_equivalence(mesh: &Mesh, k: usize, exec: Execution) -> Check {
    let r = check_equivalence(mesh, k, &EXAMPLE_2, exec).map(|diff| {
        (
            diff <= EQUIVALENCE_TOLERANCE,
            format!("max DOF difference {diff:.2e} (tol {EQUIVALENCE_TOLERANCE:.0e})"),
        )
    });
    Check::from_result("full/condensed equivalence", r)
}

/// Every check above, on `mesh` with degree `k`, plus the element-level
/// checks on `elements` random triangles.
pub fn run_suite(mesh: &Mesh, k: usize, seed: u64, elements: usize, exec: Execution) -> Vec<Check> {
    let degrees = [k];
    vec![
        mesh_invariants(mesh),
        projection_idempotence(seed, elements, &degrees),
        commuting_identity(seed.wrapping_add(1), elements, &degrees),
        stabilizer_properties(seed.wrapping_add(2), elements, &degrees),
        sign_cancellation(mesh, k),
        norm_identity(mesh, k, seed.wrapping_add(3), exec),
        patch_test(mesh, k, exec),
        condensed_spd(mesh, k, exec),
        schur_equivalence(mesh, k, exec),
    ]
}
