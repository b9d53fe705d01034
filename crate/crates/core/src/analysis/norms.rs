//! Discrete norms of weak functions.
//!
//! The energy norm
//!
//! ```text
//! |||v|||² = Σ_T ‖Δ_w v‖²_T + h_T⁻¹ ‖∇v_0·n_e − v_n‖²_∂T + h_T⁻³ ‖Q_b v_0 − v_b‖²_∂T
//! ```
//!
//! is evaluated here by pointwise quadrature of each term, independently of
//! the assembled stiffness matrices, so that comparing it with `vᵀ A v` is a
//! genuine consistency check.

use crate::analysis::manufactured::ManufacturedSolution;
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::par::{try_map_indexed, Execution};
use crate::polybasis::{edge_quadrature, project_edge, tri_quadrature, EdgeBasis};
use crate::solver::{tag_element, DofMap, WgFunction};
use crate::wg_element::{local_stiffness, weak_laplacian_matrix, ElementContext};

fn check_shape(mesh: &Mesh, v: &WgFunction) -> Result<()> {
    let map = DofMap::new(mesh, v.k)?;
    let expected = map.n_interior() + map.n_edges * map.layout.per_edge();
    let found = v.interior.len() + v.traces.len();
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Contribution of triangle `t` to `|||v|||²`.
fn element_energy(mesh: &Mesh, v: &WgFunction, t: usize) -> Result<f64> {
    let k = v.k;
    let ctx = ElementContext::from_mesh(mesh, t, k)?;
    let layout = ctx.layout;
    let local = v.local(mesh, t);
    let h = ctx.h();
    let degree = ctx.data_degree();

    let (l, m) = weak_laplacian_matrix(&ctx).map_err(tag_element(t))?;
    let lap = m
        .lu()
        .solve(&(l * &local))
        .ok_or(Error::DegenerateElement { element: t, condition: f64::INFINITY })?;
    let test = ctx.laplacian_basis();
    let vol = tri_quadrature(degree)?.on_triangle(&ctx.geom);
    let mut total: f64 = vol
        .points
        .iter()
        .zip(&vol.weights)
        .map(|(p, w)| w * test.evaluate(lap.as_slice(), *p).powi(2))
        .sum();

    let basis = ctx.basis();
    let v0 = &local.as_slice()[..layout.n_interior];
    let rule = edge_quadrature(degree)?;
    for (i, edge) in ctx.edges.iter().enumerate() {
        let vb: Vec<f64> = (0..k).map(|q| local[layout.vb(i, q)]).collect();
        let vn: Vec<f64> = (0..k).map(|q| local[layout.vn(i, q)]).collect();
        let trace = EdgeBasis::new(edge.length, k - 1);
        let qb = project_edge(|p| basis.evaluate(v0, p), k - 1, edge.a, edge.b, degree)?;
        let pts = rule.on_segment(edge.a, edge.b);
        let ne = edge.normal;
        for ((p, &s), w) in pts.points.iter().zip(&pts.params).zip(&pts.weights) {
            let grad = basis
                .gradients(*p)
                .iter()
                .zip(v0)
                .fold([0.0, 0.0], |g, (d, c)| [g[0] + c * d[0], g[1] + c * d[1]]);
            let flux = grad[0] * ne[0] + grad[1] * ne[1] - trace.evaluate(&vn, s);
            let jump = trace.evaluate(&qb, s) - trace.evaluate(&vb, s);
            total += w * (flux * flux / h + jump * jump / (h * h * h));
        }
    }
    Ok(total)
}

/// `|||v|||`.
pub fn triple_bar_norm(mesh: &Mesh, v: &WgFunction, exec: Execution) -> Result<f64> {
    check_shape(mesh, v)?;
    let parts = try_map_indexed(exec, mesh.num_triangles(), |t| element_energy(mesh, v, t))?;
    Ok(parts.iter().sum::<f64>().max(0.0).sqrt())
}

/// `a(v, v) = Σ_T v_Tᵀ A_T v_T`, through the local stiffness matrices.
pub fn energy(mesh: &Mesh, v: &WgFunction, exec: Execution) -> Result<f64> {
    check_shape(mesh, v)?;
    let parts = try_map_indexed(exec, mesh.num_triangles(), |t| {
        let ctx = ElementContext::from_mesh(mesh, t, v.k)?;
        let a = local_stiffness(&ctx).map_err(tag_element(t))?.stiffness;
        let local = v.local(mesh, t);
        Ok::<_, Error>(local.dot(&(a * &local)))
    })?;
    Ok(parts.iter().sum())
}

/// `‖v_0‖` over the mesh.
pub fn interior_l2_norm(mesh: &Mesh, v: &WgFunction, exec: Execution) -> Result<f64> {
    check_shape(mesh, v)?;
    let parts = try_map_indexed(exec, mesh.num_triangles(), |t| {
        let ctx = ElementContext::from_mesh(mesh, t, v.k)?;
        let basis = ctx.basis();
        let pts = tri_quadrature(ctx.data_degree())?.on_triangle(&ctx.geom);
        let c = v.interior_of(t);
        Ok::<_, Error>(
            pts.points
                .iter()
                .zip(&pts.weights)
                .map(|(p, w)| w * basis.evaluate(c, *p).powi(2))
                .sum::<f64>(),
        )
    })?;
    Ok(parts.iter().sum::<f64>().sqrt())
}

/// Errors of a discrete solution against the projection `Q_h u` of the
/// exact solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorNorms {
    /// `|||Q_h u − u_h|||`.
    pub energy: f64,
    /// `‖Q_0 u − u_0‖`.
    pub l2: f64,
}

pub fn errors(mesh: &Mesh, uh: &WgFunction, exact: &ManufacturedSolution, exec: Execution) -> Result<ErrorNorms> {
    let map = DofMap::new(mesh, uh.k)?;
    let qh = WgFunction::project_exact(mesh, &map, |p| exact.u(p), |p| exact.grad(p), exec)?;
    let e = qh.difference(uh);
    Ok(ErrorNorms {
        energy: triple_bar_norm(mesh, &e, exec)?,
        l2: interior_l2_norm(mesh, &e, exec)?,
    })
}

/// `|||Q_h u − u_h|||`.
pub fn triple_bar_error(mesh: &Mesh, uh: &WgFunction, exact: &ManufacturedSolution, exec: Execution) -> Result<f64> {
    Ok(errors(mesh, uh, exact, exec)?.energy)
}

/// `‖Q_0 u − u_0‖`.
pub fn l2_error(mesh: &Mesh, uh: &WgFunction, exact: &ManufacturedSolution, exec: Execution) -> Result<f64> {
    Ok(errors(mesh, uh, exact, exec)?.l2)
}

/// Observed order `log2(e_coarse / e_fine)` between meshes of halved size.
pub fn rate(coarse: f64, fine: f64) -> Result<f64> {
    if !(coarse > 0.0 && fine > 0.0 && coarse.is_finite() && fine.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "rates need positive finite errors, got {coarse} and {fine}"
        )));
    }
    Ok((coarse / fine).log2())
}
