use std::io::Write;

use nalgebra::DVector;

use super::dofmap::DofMap;
use super::Problem;
use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point};
use crate::par::{try_map_indexed, Execution};
use crate::polybasis::TriProjector;
use crate::wg_element::{project_edge_traces, LocalEdge, DATA_QUAD_EXTRA};

/// A discrete weak function `{v_0, v_b, v_n}` on a mesh.
///
/// `interior` holds the `P_k` coefficients of `v_0`, element by element.
/// `traces` holds, edge by edge, the `k` Legendre coefficients of `v_b`
/// followed by the `k` coefficients of `v_n`, the latter taken along the
/// global edge normal.
#[derive(Clone, Debug, PartialEq)]
pub struct WgFunction {
    pub k: usize,
    pub n_interior: usize,
    pub interior: Vec<f64>,
    pub traces: Vec<f64>,
}

impl WgFunction {
    pub fn zeros(map: &DofMap) -> Self {
        Self {
            k: map.k(),
            n_interior: map.layout.n_interior,
            interior: vec![0.0; map.n_interior()],
            traces: vec![0.0; map.n_edges * map.layout.per_edge()],
        }
    }

    fn per_edge(&self) -> usize {
        2 * self.k
    }

    pub fn interior_of(&self, t: usize) -> &[f64] {
        &self.interior[t * self.n_interior..(t + 1) * self.n_interior]
    }

    pub fn vb(&self, e: usize) -> &[f64] {
        let start = e * self.per_edge();
        &self.traces[start..start + self.k]
    }

    pub fn vn(&self, e: usize) -> &[f64] {
        let start = e * self.per_edge() + self.k;
        &self.traces[start..start + self.k]
    }

    /// Local coefficient vector on triangle `t`, in element layout order.
    pub fn local(&self, mesh: &Mesh, t: usize) -> DVector<f64> {
        let pe = self.per_edge();
        let mut v = DVector::<f64>::zeros(self.n_interior + 3 * pe);
        v.as_mut_slice()[..self.n_interior].copy_from_slice(self.interior_of(t));
        for (i, te) in mesh.tri_edges(t).iter().enumerate() {
            let dst = self.n_interior + i * pe;
            v.as_mut_slice()[dst..dst + pe]
                .copy_from_slice(&self.traces[te.edge * pe..(te.edge + 1) * pe]);
        }
        v
    }

    pub fn max_abs_diff(&self, other: &WgFunction) -> f64 {
        self.interior
            .iter()
            .zip(&other.interior)
            .chain(self.traces.iter().zip(&other.traces))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.interior
            .iter()
            .chain(&self.traces)
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `self − other`.
    pub fn difference(&self, other: &WgFunction) -> WgFunction {
        let sub = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x - y).collect();
        WgFunction {
            k: self.k,
            n_interior: self.n_interior,
            interior: sub(&self.interior, &other.interior),
            traces: sub(&self.traces, &other.traces),
        }
    }

    pub fn scaled(&self, factor: f64) -> WgFunction {
        WgFunction {
            k: self.k,
            n_interior: self.n_interior,
            interior: self.interior.iter().map(|v| v * factor).collect(),
            traces: self.traces.iter().map(|v| v * factor).collect(),
        }
    }

    /// Prescribed traces on boundary edges: `v_b = Q_b g` and
    /// `v_n = sigma Q_b g_n` with `sigma = n_Ω · n_e`. Every other entry is zero.
    pub fn boundary_traces<P: Problem + ?Sized>(
        mesh: &Mesh,
        map: &DofMap,
        problem: &P,
        exec: Execution,
    ) -> Result<WgFunction> {
        let k = map.k();
        let edges: Vec<usize> = (0..mesh.num_edges()).filter(|&e| map.is_fixed_edge(e)).collect();
        let blocks = try_map_indexed(exec, edges.len(), |i| {
            let e = edges[i];
            let (a, b) = mesh.edge_points(e);
            let edge = LocalEdge::new(a, b, 1.0);
            let outward = mesh
                .boundary_outward_normal(e)
                .expect("fixed edges lie on the boundary");
            // (g_n n_Ω) · n_e = sigma g_n, the normal trace along the global normal
            let (vb, vn) = project_edge_traces(
                &edge,
                k,
                |p| problem.boundary_value(p),
                |p: Point| {
                    let d = problem.boundary_flux(p, outward);
                    [d * outward[0], d * outward[1]]
                },
            )?;
            Ok::<_, Error>((vb, vn))
        })?;
        let mut w = WgFunction::zeros(map);
        let pe = map.layout.per_edge();
        for (&e, (vb, vn)) in edges.iter().zip(blocks) {
            w.traces[e * pe..e * pe + k].copy_from_slice(&vb);
            w.traces[e * pe + k..(e + 1) * pe].copy_from_slice(&vn);
        }
        Ok(w)
    }

    /// `Q_h u = {Q_0 u, Q_b u, Q_b(∇u · n_e)}` of a smooth function.
    pub fn project_exact<U, G>(mesh: &Mesh, map: &DofMap, u: U, grad_u: G, exec: Execution) -> Result<WgFunction>
    where
        U: Fn(Point) -> f64 + Sync,
        G: Fn(Point) -> [f64; 2] + Sync,
    {
        let k = map.k();
        let interior = try_map_indexed(exec, mesh.num_triangles(), |t| {
            let proj = TriProjector::new(&mesh.geometry(t), k, 2 * k + DATA_QUAD_EXTRA)
                .map_err(|e| match e {
                    Error::IllConditionedMass { condition } => Error::DegenerateElement { element: t, condition },
                    other => other,
                })?;
            Ok::<_, Error>(proj.project(&u))
        })?;
        let traces = try_map_indexed(exec, mesh.num_edges(), |e| {
            let (a, b) = mesh.edge_points(e);
            project_edge_traces(&LocalEdge::new(a, b, 1.0), k, &u, &grad_u)
        })?;
        let mut w = WgFunction::zeros(map);
        let n0 = map.layout.n_interior;
        for (t, c) in interior.iter().enumerate() {
            w.interior[t * n0..(t + 1) * n0].copy_from_slice(c.as_slice());
        }
        let pe = map.layout.per_edge();
        for (e, (vb, vn)) in traces.into_iter().enumerate() {
            w.traces[e * pe..e * pe + k].copy_from_slice(&vb);
            w.traces[e * pe + k..(e + 1) * pe].copy_from_slice(&vn);
        }
        Ok(w)
    }

    /// Writes the coefficients section by section:
    /// `wgsolution 1`, `k`, then `interior`, `vb` and `vn` blocks, one
    /// element or edge per line.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        let n_tri = self.interior.len() / self.n_interior.max(1);
        let n_edges = self.traces.len() / self.per_edge();
        writeln!(out, "wgsolution 1")?;
        writeln!(out, "k {}", self.k)?;
        let line = |vals: &[f64]| vals.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(" ");
        writeln!(out, "interior {} {}", n_tri, self.n_interior)?;
        for t in 0..n_tri {
            writeln!(out, "{}", line(self.interior_of(t)))?;
        }
        writeln!(out, "vb {} {}", n_edges, self.k)?;
        for e in 0..n_edges {
            writeln!(out, "{}", line(self.vb(e)))?;
        }
        writeln!(out, "vn {} {}", n_edges, self.k)?;
        for e in 0..n_edges {
            writeln!(out, "{}", line(self.vn(e)))?;
        }
        Ok(())
    }
}
