//! Static condensation of the interior unknowns.
//!
//! On each element the local system splits as
//!
//! ```text
//! [ A_00  A_0e ] [ w_0 ]   [ F_0 ]
//! [ A_e0  A_ee ] [ w_e ] = [  0  ]
//! ```
//!
//! Eliminating `w_0 = A_00⁻¹ (F_0 − A_0e w_e)` leaves the Schur complement
//! `A_ee − A_e0 A_00⁻¹ A_0e` acting on the edge traces, with load
//! `−A_e0 A_00⁻¹ F_0`. The global condensed matrix is the sum of these blocks
//! over elements. `A_00` is factored once and reused for recovery.

use nalgebra::{DMatrix, DVector};

use super::assemble::assemble_full;
use super::dofmap::{DofMap, Slot};
use super::function::WgFunction;
use super::linsolve::{solve, SolveReport, SolverMethod};
use super::sparse::CsrMatrix;
use super::{element_system, Problem};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::par::{map_indexed, try_map_indexed, Execution};

/// Per-element data needed to recover `w_0` from the edge traces.
#[derive(Clone, Debug)]
struct Recovery {
    /// `A_00⁻¹ A_0e`.
    elimination: DMatrix<f64>,
    /// `A_00⁻¹ F_0`.
    particular: DVector<f64>,
}

struct CondensedElement {
    schur: DMatrix<f64>,
    load: DVector<f64>,
    recovery: Recovery,
}

fn condense_element(a: &DMatrix<f64>, f: &DVector<f64>, n0: usize, t: usize) -> Result<CondensedElement> {
    let ne = a.nrows() - n0;
    let a00 = a.view((0, 0), (n0, n0)).clone_owned();
    let a0e = a.view((0, n0), (n0, ne)).clone_owned();
    let ae0 = a.view((n0, 0), (ne, n0));
    let aee = a.view((n0, n0), (ne, ne));
    let factor = a00
        .cholesky()
        .ok_or(Error::LocalFactorization { element: t })?;

    let elimination = factor.solve(&a0e);
    let particular = factor.solve(&f.rows(0, n0).clone_owned());
    let mut schur = aee - ae0 * &elimination;
    for j in 0..ne {
        for i in (j + 1)..ne {
            let avg = 0.5 * (schur[(i, j)] + schur[(j, i)]);
            schur[(i, j)] = avg;
            schur[(j, i)] = avg;
        }
    }
    let load = f.rows(n0, ne) - ae0 * &particular;
    Ok(CondensedElement {
        schur,
        load,
        recovery: Recovery {
            elimination,
            particular,
        },
    })
}

/// The reduced system in the edge unknowns `{w_b, w_n}` only.
#[derive(Clone, Debug)]
pub struct CondensedSystem {
    pub dofmap: DofMap,
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Prescribed boundary traces (zero elsewhere).
    pub boundary: WgFunction,
    recovery: Vec<Recovery>,
}

pub fn condense<P: Problem + ?Sized>(
    mesh: &Mesh,
    k: usize,
    problem: &P,
    exec: Execution,
) -> Result<CondensedSystem> {
    let dofmap = DofMap::new(mesh, k)?;
    let boundary = WgFunction::boundary_traces(mesh, &dofmap, problem, exec)?;
    let n0 = dofmap.layout.n_interior;
    let elements = try_map_indexed(exec, mesh.num_triangles(), |t| {
        let (a, f) = element_system(mesh, k, problem, t)?;
        condense_element(&a, &f, n0, t)
    })?;

    let n = dofmap.n_condensed();
    let mut rhs = vec![0.0; n];
    let mut triplets = Vec::new();
    let mut recovery = Vec::with_capacity(elements.len());
    for (t, el) in elements.into_iter().enumerate() {
        let slots = dofmap.condensed_slots(mesh, t);
        for (i, si) in slots.iter().enumerate() {
            let Slot::Free(gi) = *si else { continue };
            rhs[gi] += el.load[i];
            for (j, sj) in slots.iter().enumerate() {
                match *sj {
                    Slot::Free(gj) => triplets.push((gi, gj, el.schur[(i, j)])),
                    Slot::Fixed(s) => rhs[gi] -= el.schur[(i, j)] * boundary.traces[s],
                }
            }
        }
        recovery.push(el.recovery);
    }

    Ok(CondensedSystem {
        matrix: CsrMatrix::from_triplets(n, &triplets),
        rhs,
        boundary,
        dofmap,
        recovery,
    })
}

impl CondensedSystem {
    /// Fills in the edge traces from the condensed solution and recovers
    /// `w_0 = A_00⁻¹ (F_0 − A_0e w_e)` element by element.
    pub fn recover_interior(&self, mesh: &Mesh, edge_solution: &[f64], exec: Execution) -> Result<WgFunction> {
        let map = &self.dofmap;
        if edge_solution.len() != map.n_condensed() {
            return Err(Error::DimensionMismatch {
                expected: map.n_condensed(),
                found: edge_solution.len(),
            });
        }
        let mut w = self.boundary.clone();
        for e in 0..mesh.num_edges() {
            for local in 0..map.layout.per_edge() {
                if let Some(i) = map.condensed_index(e, local) {
                    w.traces[map.edge_storage(e, local)] = edge_solution[i];
                }
            }
        }
        let n0 = map.layout.n_interior;
        let pe = map.layout.per_edge();
        let interiors = map_indexed(exec, mesh.num_triangles(), |t| {
            let mut we = DVector::<f64>::zeros(3 * pe);
            for (i, te) in mesh.tri_edges(t).iter().enumerate() {
                we.as_mut_slice()[i * pe..(i + 1) * pe]
                    .copy_from_slice(&w.traces[te.edge * pe..(te.edge + 1) * pe]);
            }
            let r = &self.recovery[t];
            &r.particular - &r.elimination * we
        });
        for (t, w0) in interiors.iter().enumerate() {
            w.interior[t * n0..(t + 1) * n0].copy_from_slice(w0.as_slice());
        }
        Ok(w)
    }

    pub fn solve(&self, mesh: &Mesh, method: SolverMethod, exec: Execution) -> Result<(WgFunction, SolveReport)> {
        let (x, report) = solve(&self.matrix, &self.rhs, method)?;
        Ok((self.recover_interior(mesh, &x, exec)?, report))
    }
}

/// Solves the problem with both the full and the condensed system and
/// returns the largest absolute difference over all degrees of freedom.
pub fn check_equivalence<P: Problem + ?Sized>(
    mesh: &Mesh,
    k: usize,
    problem: &P,
    exec: Execution,
) -> Result<f64> {
    let (full, _) = assemble_full(mesh, k, problem, exec)?.solve(mesh, SolverMethod::Direct)?;
    let (reduced, _) = condense(mesh, k, problem, exec)?.solve(mesh, SolverMethod::Direct, exec)?;
    Ok(full.max_abs_diff(&reduced))
}
