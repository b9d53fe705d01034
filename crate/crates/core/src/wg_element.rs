//! Element-level weak Galerkin operators.
//!
//! Local degrees of freedom of a triangle are ordered
//! `[v_0 | edge 0: v_b, v_n | edge 1: v_b, v_n | edge 2: v_b, v_n]`, where
//! `v_0` is expanded in the scaled monomial basis of `P_k(T)` and each trace in
//! the Legendre basis of `P_{k-1}(e)`, parametrized along the global edge
//! orientation. `v_n` approximates `∇v · n_e` for the global edge normal, so
//! every element integral involving it picks up `sigma = n_T · n_e`.
//!
//! The discrete weak Laplacian `Δ_w v ∈ P_{k-2}(T)` satisfies
//!
//! ```text
//! (Δ_w v, ψ)_T = (v_0, Δψ)_T − <v_b, ∇ψ·n_T>_∂T + <sigma v_n, ψ>_∂T   for all ψ ∈ P_{k-2}(T)
//! ```
//!
//! and is represented in factored form as `M⁻¹ L v` with `M` the `P_{k-2}`
//! mass matrix.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::mesh::{distance, ElementGeometry, Mesh, Point};
use crate::polybasis::project::{factor_mass, tri_mass_matrix, TriProjector};
use crate::polybasis::{
    edge_quadrature, project_edge, tri_dim, tri_quadrature, EdgeBasis, TriBasis,
};

/// Extra quadrature degree used for data integrals (loads, projections of
/// analytic functions, error norms) on top of `2k`.
pub const DATA_QUAD_EXTRA: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ElementDofLayout {
    pub k: usize,
    pub n_interior: usize,
}

impl ElementDofLayout {
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!(
                "polynomial order k must be at least 2, got {k}"
            )));
        }
        Ok(Self {
            k,
            n_interior: tri_dim(k),
        })
    }

    /// Degrees of freedom per edge: `k` for `v_b` and `k` for `v_n`.
    pub fn per_edge(&self) -> usize {
        2 * self.k
    }

    pub fn n_local(&self) -> usize {
        self.n_interior + 3 * self.per_edge()
    }

    pub fn n_laplacian(&self) -> usize {
        tri_dim(self.k - 2)
    }

    pub fn vb(&self, edge: usize, p: usize) -> usize {
        self.n_interior + edge * self.per_edge() + p
    }

    pub fn vn(&self, edge: usize, p: usize) -> usize {
        self.n_interior + edge * self.per_edge() + self.k + p
    }

    /// Local indices of the two trace blocks of local edge `edge`.
    pub fn edge_block(&self, edge: usize) -> std::ops::Range<usize> {
        let start = self.n_interior + edge * self.per_edge();
        start..start + self.per_edge()
    }
}

/// A local edge described in the global orientation `a -> b`.
#[derive(Clone, Copy, Debug)]
pub struct LocalEdge {
    pub a: Point,
    pub b: Point,
    /// Global unit normal `n_e`.
    pub normal: [f64; 2],
    pub length: f64,
    /// `sigma = n_T · n_e`.
    pub sign: f64,
}

impl LocalEdge {
    pub fn new(a: Point, b: Point, sign: f64) -> Self {
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let length = dx.hypot(dy);
        Self {
            a,
            b,
            normal: [dy / length, -dx / length],
            length,
            sign,
        }
    }

    pub fn outward_normal(&self) -> [f64; 2] {
        [self.sign * self.normal[0], self.sign * self.normal[1]]
    }

    /// Reference parameter of a point on the edge, `-1` at `a`, `+1` at `b`.
    pub fn param(&self, p: Point) -> f64 {
        2.0 * distance(self.a, p) / self.length - 1.0
    }
}

/// Geometry and orientation data of one triangle.
#[derive(Clone, Debug)]
pub struct ElementContext {
    pub geom: ElementGeometry,
    pub edges: [LocalEdge; 3],
    pub layout: ElementDofLayout,
}

impl ElementContext {
    /// Local edge `i` joins vertices `i` and `i + 1`. A sign of `+1` means the
    /// global orientation of that edge follows the local traversal.
    pub fn new(geom: ElementGeometry, signs: [f64; 3], k: usize) -> Result<Self> {
        let layout = ElementDofLayout::new(k)?;
        let edges = std::array::from_fn(|i| {
            let (p, q) = (geom.vertices[i], geom.vertices[(i + 1) % 3]);
            if signs[i] > 0.0 {
                LocalEdge::new(p, q, 1.0)
            } else {
                LocalEdge::new(q, p, -1.0)
            }
        });
        Ok(Self {
            geom,
            edges,
            layout,
        })
    }

    pub fn from_mesh(mesh: &Mesh, t: usize, k: usize) -> Result<Self> {
        let te = mesh.tri_edges(t);
        Self::new(mesh.geometry(t), [te[0].sign, te[1].sign, te[2].sign], k)
    }

    pub fn h(&self) -> f64 {
        self.geom.diameter
    }

    pub fn basis(&self) -> TriBasis {
        TriBasis::new(&self.geom, self.layout.k)
    }

    pub fn laplacian_basis(&self) -> TriBasis {
        TriBasis::new(&self.geom, self.layout.k - 2)
    }

    pub fn data_degree(&self) -> usize {
        2 * self.layout.k + DATA_QUAD_EXTRA
    }
}

/// Right-hand-side matrix `L` of the weak Laplacian and the `P_{k-2}` mass
/// matrix `M`, so that `Δ_w v = M⁻¹ L v` in the scaled monomial basis.
pub fn weak_laplacian_matrix(ctx: &ElementContext) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let layout = ctx.layout;
    let k = layout.k;
    let basis = ctx.basis();
    let test = ctx.laplacian_basis();
    let nl = test.dim();
    let mut l = DMatrix::<f64>::zeros(nl, layout.n_local());

    let vol = tri_quadrature(2 * k)?.on_triangle(&ctx.geom);
    for (p, w) in vol.points.iter().zip(&vol.weights) {
        let phi = basis.values(*p);
        let lap = test.laplacians(*p);
        for (j, lj) in lap.iter().enumerate() {
            if *lj == 0.0 {
                continue;
            }
            for (m, pm) in phi.iter().enumerate() {
                l[(j, m)] += w * pm * lj;
            }
        }
    }

    let rule = edge_quadrature(2 * k)?;
    for (i, edge) in ctx.edges.iter().enumerate() {
        let pts = rule.on_segment(edge.a, edge.b);
        let trace = EdgeBasis::new(edge.length, k - 1);
        let n_t = edge.outward_normal();
        for ((p, &t), w) in pts.points.iter().zip(&pts.params).zip(&pts.weights) {
            let ell = trace.values(t);
            let psi = test.values(*p);
            let grad = test.gradients(*p);
            for j in 0..nl {
                let dn = grad[j][0] * n_t[0] + grad[j][1] * n_t[1];
                for (q, lq) in ell.iter().enumerate() {
                    l[(j, layout.vb(i, q))] -= w * lq * dn;
                    l[(j, layout.vn(i, q))] += w * lq * psi[j] * edge.sign;
                }
            }
        }
    }

    let mass = tri_mass_matrix(&test, &vol);
    Ok((l, mass))
}

/// Stabilizer on one element:
/// `h⁻¹ <∇v_0·n_e − v_n, ∇w_0·n_e − w_n>_∂T + h⁻³ <Q_b v_0 − v_b, Q_b w_0 − w_b>_∂T`.
pub fn stabilizer_matrix(ctx: &ElementContext) -> Result<DMatrix<f64>> {
    let layout = ctx.layout;
    let k = layout.k;
    let n = layout.n_local();
    let basis = ctx.basis();
    let h = ctx.h();
    let mut s = DMatrix::<f64>::zeros(n, n);
    let rule = edge_quadrature(2 * k)?;

    let mut row = vec![0.0; n];
    // entry (i, j) gets weight * (r_i * r_j), which keeps S bitwise symmetric
    let rank_one = |s: &mut DMatrix<f64>, row: &[f64], weight: f64| {
        let nz: Vec<usize> = (0..row.len()).filter(|&i| row[i] != 0.0).collect();
        for &j in &nz {
            for &i in &nz {
                s[(i, j)] += weight * (row[i] * row[j]);
            }
        }
    };

    for (i, edge) in ctx.edges.iter().enumerate() {
        let pts = rule.on_segment(edge.a, edge.b);
        let trace = EdgeBasis::new(edge.length, k - 1);
        let ne = edge.normal;

        // normal-derivative mismatch, pointwise
        for ((p, &t), w) in pts.points.iter().zip(&pts.params).zip(&pts.weights) {
            row.iter_mut().for_each(|x| *x = 0.0);
            for (m, g) in basis.gradients(*p).iter().enumerate() {
                row[m] = g[0] * ne[0] + g[1] * ne[1];
            }
            for (q, lq) in trace.values(t).iter().enumerate() {
                row[layout.vn(i, q)] = -lq;
            }
            rank_one(&mut s, &row, w / h);
        }

        // trace mismatch, in Legendre coefficients: ‖Q_b v_0 − v_b‖² = Σ m_q (c_q − b_q)²
        let mass = trace.mass_diagonal();
        let mut moments = DMatrix::<f64>::zeros(k, layout.n_interior);
        for ((p, &t), w) in pts.points.iter().zip(&pts.params).zip(&pts.weights) {
            let phi = basis.values(*p);
            for (q, lq) in trace.values(t).iter().enumerate() {
                for (m, pm) in phi.iter().enumerate() {
                    moments[(q, m)] += w * lq * pm;
                }
            }
        }
        for q in 0..k {
            row.iter_mut().for_each(|x| *x = 0.0);
            for m in 0..layout.n_interior {
                row[m] = moments[(q, m)] / mass[q];
            }
            row[layout.vb(i, q)] = -1.0;
            rank_one(&mut s, &row, mass[q] / (h * h * h));
        }
    }
    Ok(s)
}

/// Per-element operators of the bilinear form `a(v, w) = (Δ_w v, Δ_w w)_T + s_T(v, w)`.
#[derive(Clone, Debug)]
pub struct LocalOperators {
    pub layout: ElementDofLayout,
    /// `L`, with `Δ_w v = M⁻¹ L v`.
    pub weak_laplacian: DMatrix<f64>,
    /// `M`, the `P_{k-2}` mass matrix.
    pub laplacian_mass: DMatrix<f64>,
    laplacian_factor: Cholesky<f64, Dyn>,
    pub stabilizer: DMatrix<f64>,
    /// `A = Lᵀ M⁻¹ L + S`.
    pub stiffness: DMatrix<f64>,
}

impl LocalOperators {
    /// Coefficients of `Δ_w v` in the scaled monomial basis of `P_{k-2}(T)`.
    pub fn weak_laplacian_of(&self, v: &DVector<f64>) -> DVector<f64> {
        self.laplacian_factor.solve(&(&self.weak_laplacian * v))
    }
}

pub fn local_stiffness(ctx: &ElementContext) -> Result<LocalOperators> {
    // reject degenerate elements
    let vol = tri_quadrature(2 * ctx.layout.k)?.on_triangle(&ctx.geom);
    factor_mass(tri_mass_matrix(&ctx.basis(), &vol))?;
    let (l, mass) = weak_laplacian_matrix(ctx)?;
    let factor = factor_mass(mass.clone())?;
    let stabilizer = stabilizer_matrix(ctx)?;

    // M = R Rᵀ, so Lᵀ M⁻¹ L = Yᵀ Y with Y = R⁻¹ L
    let y = factor
        .l()
        .solve_lower_triangular(&l)
        .expect("Cholesky factor has a positive diagonal");
    let mut stiffness = y.tr_mul(&y) + &stabilizer;
    let n = stiffness.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            let avg = 0.5 * (stiffness[(i, j)] + stiffness[(j, i)]);
            stiffness[(i, j)] = avg;
            stiffness[(j, i)] = avg;
        }
    }

    Ok(LocalOperators {
        layout: ctx.layout,
        weak_laplacian: l,
        laplacian_mass: mass,
        laplacian_factor: factor,
        stabilizer,
        stiffness,
    })
}

/// `F_i = (f, φ_i)_T` for interior degrees of freedom, zero for edge ones.
pub fn local_load<F: Fn(Point) -> f64>(ctx: &ElementContext, f: F) -> Result<DVector<f64>> {
    let layout = ctx.layout;
    let basis = ctx.basis();
    let pts = tri_quadrature(ctx.data_degree())?.on_triangle(&ctx.geom);
    let mut load = DVector::<f64>::zeros(layout.n_local());
    for (p, w) in pts.points.iter().zip(&pts.weights) {
        let fw = w * f(*p);
        if fw == 0.0 {
            continue;
        }
        for (m, v) in basis.values(*p).iter().enumerate() {
            load[m] += fw * v;
        }
    }
    Ok(load)
}

/// `(Q_b u, Q_b(∇u · n_e))` on one edge, as Legendre coefficients of degree `k - 1`.
pub fn project_edge_traces<U, G>(
    edge: &LocalEdge,
    k: usize,
    u: U,
    grad_u: G,
) -> Result<(Vec<f64>, Vec<f64>)>
where
    U: Fn(Point) -> f64,
    G: Fn(Point) -> [f64; 2],
{
    let degree = 2 * k + DATA_QUAD_EXTRA;
    let ne = edge.normal;
    let vb = project_edge(&u, k - 1, edge.a, edge.b, degree)?;
    let vn = project_edge(
        |p| {
            let g = grad_u(p);
            g[0] * ne[0] + g[1] * ne[1]
        },
        k - 1,
        edge.a,
        edge.b,
        degree,
    )?;
    Ok((vb, vn))
}

/// Local coefficient vector of `Q_h u = {Q_0 u, Q_b u, Q_b(∇u · n_e)}`.
pub fn project_qh<U, G>(ctx: &ElementContext, u: U, grad_u: G) -> Result<DVector<f64>>
where
    U: Fn(Point) -> f64,
    G: Fn(Point) -> [f64; 2],
{
    let layout = ctx.layout;
    let mut v = DVector::<f64>::zeros(layout.n_local());
    let interior = TriProjector::new(&ctx.geom, layout.k, ctx.data_degree())?.project(&u);
    v.rows_mut(0, layout.n_interior).copy_from(&interior);
    for (i, edge) in ctx.edges.iter().enumerate() {
        let (vb, vn) = project_edge_traces(edge, layout.k, &u, &grad_u)?;
        for q in 0..layout.k {
            v[layout.vb(i, q)] = vb[q];
            v[layout.vn(i, q)] = vn[q];
        }
    }
    Ok(v)
}
