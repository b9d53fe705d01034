//! The full weak Galerkin system coupling interior and edge unknowns.

use super::dofmap::{DofMap, Slot};
use super::function::WgFunction;
use super::linsolve::{solve, SolveReport, SolverMethod};
use super::sparse::CsrMatrix;
use super::{element_system, Problem};
use crate::error::Result;
use crate::mesh::Mesh;
use crate::par::{try_map_indexed, Execution};

/// `a(u_h, v) = (f, v_0)` for all `v` with vanishing boundary traces, with
/// the prescribed boundary traces moved to the right-hand side.
#[derive(Clone, Debug)]
pub struct GlobalSystem {
    pub dofmap: DofMap,
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Prescribed boundary traces (zero elsewhere).
    pub boundary: WgFunction,
}

pub fn assemble_full<P: Problem + ?Sized>(
    mesh: &Mesh,
    k: usize,
    problem: &P,
    exec: Execution,
) -> Result<GlobalSystem> {
    let dofmap = DofMap::new(mesh, k)?;
    let boundary = WgFunction::boundary_traces(mesh, &dofmap, problem, exec)?;
    let locals = try_map_indexed(exec, mesh.num_triangles(), |t| element_system(mesh, k, problem, t))?;

    let n = dofmap.n_full();
    let mut rhs = vec![0.0; n];
    let mut triplets = Vec::new();
    for (t, (a, f)) in locals.iter().enumerate() {
        let slots = dofmap.full_slots(mesh, t);
        for (i, si) in slots.iter().enumerate() {
            let Slot::Free(gi) = *si else { continue };
            rhs[gi] += f[i];
            for (j, sj) in slots.iter().enumerate() {
                match *sj {
                    Slot::Free(gj) => triplets.push((gi, gj, a[(i, j)])),
                    Slot::Fixed(s) => rhs[gi] -= a[(i, j)] * boundary.traces[s],
                }
            }
        }
    }

    Ok(GlobalSystem {
        matrix: CsrMatrix::from_triplets(n, &triplets),
        rhs,
        boundary,
        dofmap,
    })
}

impl GlobalSystem {
    /// Expands a vector of free unknowns into a full weak function.
    pub fn expand(&self, mesh: &Mesh, x: &[f64]) -> WgFunction {
        let map = &self.dofmap;
        let mut w = self.boundary.clone();
        w.interior.copy_from_slice(&x[..map.n_interior()]);
        for e in 0..mesh.num_edges() {
            for local in 0..map.layout.per_edge() {
                if let Some(i) = map.condensed_index(e, local) {
                    w.traces[map.edge_storage(e, local)] = x[map.n_interior() + i];
                }
            }
        }
        w
    }

    pub fn solve(&self, mesh: &Mesh, method: SolverMethod) -> Result<(WgFunction, SolveReport)> {
        let (x, report) = solve(&self.matrix, &self.rhs, method)?;
        Ok((self.expand(mesh, &x), report))
    }
}
