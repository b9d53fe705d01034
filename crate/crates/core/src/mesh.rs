//! Two-dimensional triangular meshes with globally oriented edges.
//!
//! Every edge carries a fixed unit normal `n_e`, obtained by rotating the unit
//! tangent from its lower-indexed vertex to its higher-indexed vertex by -90
//! degrees. Each triangle stores, for its three local edges, the sign
//! `sigma = n_T . n_e` relating its outward normal to the global one. Edge
//! unknowns that represent normal derivatives are stored relative to `n_e`,
//! which is what makes them single-valued across elements.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    /// Global vertex indices `(a, b)` with `a < b`.
    pub vertices: [usize; 2],
    pub normal: [f64; 2],
    pub length: f64,
    pub is_boundary: bool,
    /// Adjacent triangles in order of discovery. A valid mesh has one or two.
    pub adjacent: Vec<usize>,
}

/// Local edge record of a triangle. Local edge `i` joins local vertices `i`
/// and `(i + 1) % 3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriEdge {
    pub edge: usize,
    /// `+1.0` when the triangle traverses the edge from `a` to `b`, else `-1.0`.
    /// For a counterclockwise triangle this equals `n_T . n_e`.
    pub sign: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElementGeometry {
    pub vertices: [Point; 3],
    /// Signed area; positive for counterclockwise triangles.
    pub area: f64,
    pub centroid: Point,
    /// Element diameter `h_T`, the longest edge length.
    pub diameter: f64,
}

impl ElementGeometry {
    pub fn new(vertices: [Point; 3]) -> Self {
        let [p0, p1, p2] = vertices;
        let area = 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
        let centroid = [
            (p0[0] + p1[0] + p2[0]) / 3.0,
            (p0[1] + p1[1] + p2[1]) / 3.0,
        ];
        let diameter = (0..3)
            .map(|i| distance(vertices[i], vertices[(i + 1) % 3]))
            .fold(0.0, f64::max);
        Self {
            vertices,
            area,
            centroid,
            diameter,
        }
    }

    /// Maps barycentric-style reference coordinates `(s, t)` on the unit right
    /// triangle to physical coordinates.
    pub fn map(&self, s: f64, t: f64) -> Point {
        let [p0, p1, p2] = self.vertices;
        [
            p0[0] + s * (p1[0] - p0[0]) + t * (p2[0] - p0[0]),
            p0[1] + s * (p1[1] - p0[1]) + t * (p2[1] - p0[1]),
        ]
    }

    /// Outward unit normal on local edge `i`, assuming counterclockwise order.
    pub fn outward_normal(&self, i: usize) -> [f64; 2] {
        let a = self.vertices[i];
        let b = self.vertices[(i + 1) % 3];
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len = dx.hypot(dy);
        [dy / len, -dx / len]
    }
}

pub(crate) fn distance(a: Point, b: Point) -> f64 {
    (b[0] - a[0]).hypot(b[1] - a[1])
}

fn edge_normal(a: Point, b: Point) -> [f64; 2] {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len = dx.hypot(dy);
    [dy / len, -dx / len]
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    tri_edges: Vec<[TriEdge; 3]>,
}

impl Mesh {
    /// Builds the edge topology for the given triangles.
    ///
    /// Construction never rejects input: inconsistent data (clockwise
    /// triangles, over-shared edges) is kept as given so that [`Mesh::validate`]
    /// can report it. Triangle vertex indices must be in range.
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        for (t, tri) in triangles.iter().enumerate() {
            if let Some(&v) = tri.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::InvalidArgument(format!(
                    "triangle {t} references vertex {v}, mesh has {} vertices",
                    vertices.len()
                )));
            }
        }

        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut tri_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut local = [TriEdge {
                edge: 0,
                sign: 1.0,
            }; 3];
            for (i, slot) in local.iter_mut().enumerate() {
                let (u, v) = (tri[i], tri[(i + 1) % 3]);
                let key = (u.min(v), u.max(v));
                let id = *lookup.entry(key).or_insert_with(|| {
                    let (pa, pb) = (vertices[key.0], vertices[key.1]);
                    edges.push(Edge {
                        vertices: [key.0, key.1],
                        normal: edge_normal(pa, pb),
                        length: distance(pa, pb),
                        is_boundary: false,
                        adjacent: Vec::with_capacity(2),
                    });
                    edges.len() - 1
                });
                edges[id].adjacent.push(t);
                *slot = TriEdge {
                    edge: id,
                    sign: if u < v { 1.0 } else { -1.0 },
                };
            }
            tri_edges.push(local);
        }
        for e in &mut edges {
            e.is_boundary = e.adjacent.len() == 1;
        }

        Ok(Self {
            vertices,
            triangles,
            edges,
            tri_edges,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn tri_edges(&self, t: usize) -> &[TriEdge; 3] {
        &self.tri_edges[t]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_boundary_edges(&self) -> usize {
        self.edges.iter().filter(|e| e.is_boundary).count()
    }

    pub fn geometry(&self, t: usize) -> ElementGeometry {
        let [a, b, c] = self.triangles[t];
        ElementGeometry::new([self.vertices[a], self.vertices[b], self.vertices[c]])
    }

    /// Sum of the signed triangle areas.
    pub fn area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.geometry(t).area).sum()
    }

    /// Mesh size: the largest element diameter.
    pub fn h(&self) -> f64 {
        (0..self.num_triangles())
            .map(|t| self.geometry(t).diameter)
            .fold(0.0, f64::max)
    }

    pub fn edge_points(&self, e: usize) -> (Point, Point) {
        let [a, b] = self.edges[e].vertices;
        (self.vertices[a], self.vertices[b])
    }

    /// Outward normal of the domain on a boundary edge, or `None` for
    /// interior edges.
    pub fn boundary_outward_normal(&self, e: usize) -> Option<[f64; 2]> {
        let edge = &self.edges[e];
        if !edge.is_boundary {
            return None;
        }
        let t = edge.adjacent[0];
        let sign = self.tri_edges[t]
            .iter()
            .find(|te| te.edge == e)
            .map(|te| te.sign)
            .unwrap_or(1.0);
        Some([sign * edge.normal[0], sign * edge.normal[1]])
    }

    /// Vertices that lie on at least one boundary edge, ascending.
    pub fn boundary_vertices(&self) -> Vec<usize> {
        let mut on_boundary = vec![false; self.num_vertices()];
        for e in self.edges.iter().filter(|e| e.is_boundary) {
            on_boundary[e.vertices[0]] = true;
            on_boundary[e.vertices[1]] = true;
        }
        (0..self.num_vertices()).filter(|&v| on_boundary[v]).collect()
    }

    /// Checks every structural and geometric invariant of the mesh.
    pub fn validate(&self) -> MeshReport {
        let mut violations = Vec::new();

        for (t, _) in self.triangles.iter().enumerate() {
            let g = self.geometry(t);
            if !(g.area > 0.0) {
                violations.push(Violation::NonPositiveArea {
                    triangle: t,
                    area: g.area,
                });
            }
            let orientation = g.area.signum();
            for (i, te) in self.tri_edges[t].iter().enumerate() {
                let n_t = g.outward_normal(i);
                let n_e = self.edges[te.edge].normal;
                let dot = orientation * (n_t[0] * n_e[0] + n_t[1] * n_e[1]);
                if !((dot - te.sign).abs() <= 1e-12) {
                    violations.push(Violation::SignMismatch {
                        triangle: t,
                        edge: te.edge,
                        dot,
                    });
                }
            }
        }

        for (id, e) in self.edges.iter().enumerate() {
            let count = e.adjacent.len();
            if count == 0 || count > 2 {
                violations.push(Violation::EdgeValence { edge: id, count });
            }
            if e.is_boundary != (count == 1) {
                violations.push(Violation::BoundaryFlag { edge: id });
            }
            let norm = e.normal[0].hypot(e.normal[1]);
            if !((norm - 1.0).abs() <= 1e-14) {
                violations.push(Violation::NormalNotUnit { edge: id, norm });
            }
            let (pa, pb) = self.edge_points(id);
            let tangent = [(pb[0] - pa[0]) / e.length, (pb[1] - pa[1]) / e.length];
            let dot = tangent[0] * e.normal[0] + tangent[1] * e.normal[1];
            if !(dot.abs() <= 1e-14) {
                violations.push(Violation::NormalNotPerpendicular { edge: id, dot });
            }
            if count == 2 {
                let sum: f64 = e
                    .adjacent
                    .iter()
                    .map(|&t| self.sign_of(t, id).unwrap_or(0.0))
                    .sum();
                if sum != 0.0 {
                    violations.push(Violation::SignsDoNotCancel { edge: id, sum });
                }
            }
        }

        let characteristic = self.num_vertices() as i64 - self.num_edges() as i64
            + self.num_triangles() as i64
            + 1;
        if characteristic != 2 {
            violations.push(Violation::Euler { characteristic });
        }

        MeshReport { violations }
    }

    /// `sigma_{T,e}` for triangle `t` and global edge `e`, if adjacent.
    pub fn sign_of(&self, t: usize, e: usize) -> Option<f64> {
        self.tri_edges[t]
            .iter()
            .find(|te| te.edge == e)
            .map(|te| te.sign)
    }

    /// Writes the mesh in the `wgmesh 1` text format.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "wgmesh 1")?;
        writeln!(out, "V {}", self.vertices.len())?;
        for p in &self.vertices {
            writeln!(out, "{:?} {:?}", p[0], p[1])?;
        }
        writeln!(out, "T {}", self.triangles.len())?;
        for t in &self.triangles {
            writeln!(out, "{} {} {}", t[0], t[1], t[2])?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Reads a mesh in the `wgmesh 1` text format. Blank lines and lines
    /// starting with `#` are skipped. Edges are always rebuilt.
    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| match l {
                Ok(s) => {
                    let s = s.trim();
                    !s.is_empty() && !s.starts_with('#')
                }
                Err(_) => true,
            });
        let mut next = |what: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((n, Ok(s))) => Ok((n, s.trim().to_string())),
                Some((_, Err(e))) => Err(e.into()),
                None => Err(Error::MeshFormat {
                    line: 0,
                    message: format!("unexpected end of input, expected {what}"),
                }),
            }
        };
        let fail = |line: usize, message: String| Error::MeshFormat { line, message };

        let (n, header) = next("header")?;
        if header.split_whitespace().collect::<Vec<_>>() != ["wgmesh", "1"] {
            return Err(fail(n, format!("expected `wgmesh 1`, found `{header}`")));
        }

        let count = |n: usize, s: &str, tag: &str| -> Result<usize> {
            let mut it = s.split_whitespace();
            match (it.next(), it.next().map(str::parse::<usize>), it.next()) {
                (Some(t), Some(Ok(c)), None) if t == tag => Ok(c),
                _ => Err(fail(n, format!("expected `{tag} <count>`, found `{s}`"))),
            }
        };

        let (n, s) = next("vertex count")?;
        let nv = count(n, &s, "V")?;
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (n, s) = next("vertex")?;
            let vals: Vec<f64> = s
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| fail(n, format!("bad coordinate: {e}")))?;
            if vals.len() != 2 {
                return Err(fail(n, format!("expected `x y`, found `{s}`")));
            }
            vertices.push([vals[0], vals[1]]);
        }

        let (n, s) = next("triangle count")?;
        let nt = count(n, &s, "T")?;
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (n, s) = next("triangle")?;
            let vals: Vec<usize> = s
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| fail(n, format!("bad vertex index: {e}")))?;
            if vals.len() != 3 {
                return Err(fail(n, format!("expected `i j k`, found `{s}`")));
            }
            if let Some(v) = vals.iter().find(|&&v| v >= nv) {
                return Err(fail(n, format!("vertex index {v} out of range")));
            }
            triangles.push([vals[0], vals[1], vals[2]]);
        }

        Mesh::new(vertices, triangles)
    }
}

/// `n x n` squares of `(0,1)^2`, each cut by its negative-slope diagonal.
pub fn unit_square(n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "unit square mesh needs n >= 1".into(),
        ));
    }
    let step = 1.0 / n as f64;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([i as f64 * step, j as f64 * step]);
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (p00, p10, p01, p11) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
            triangles.push([p00, p10, p01]);
            triangles.push([p10, p11, p01]);
        }
    }
    Mesh::new(vertices, triangles)
}

/// Initial mesh of the L-shaped domain `(-1,1)^2 \ [0,1) x (-1,0]`: three unit
/// squares, each split by the diagonal through the reentrant corner, which
/// makes the mesh symmetric about the line `y = -x`.
pub fn lshape_initial() -> Mesh {
    let vertices = vec![
        [-1.0, -1.0], // 0
        [0.0, -1.0],  // 1
        [-1.0, 0.0],  // 2
        [0.0, 0.0],   // 3, reentrant corner
        [1.0, 0.0],   // 4
        [-1.0, 1.0],  // 5
        [0.0, 1.0],   // 6
        [1.0, 1.0],   // 7
    ];
    let triangles = vec![
        // (-1,0) x (-1,0), diagonal (-1,-1)-(0,0)
        [0, 1, 3],
        [0, 3, 2],
        // (-1,0) x (0,1), diagonal (0,0)-(-1,1)
        [2, 3, 5],
        [3, 6, 5],
        // (0,1) x (0,1), diagonal (0,0)-(1,1)
        [3, 4, 7],
        [3, 7, 6],
    ];
    Mesh::new(vertices, triangles).expect("static L-shape data is in range")
}

/// Uniform red refinement: every triangle is split into four congruent
/// children through its edge midpoints. Child orientation follows the parent.
pub fn refine_uniform(mesh: &Mesh) -> Mesh {
    let nv = mesh.num_vertices();
    let mut vertices = mesh.vertices.clone();
    vertices.extend(mesh.edges.iter().map(|e| {
        let (a, b) = (mesh.vertices[e.vertices[0]], mesh.vertices[e.vertices[1]]);
        [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
    }));
    let mut triangles = Vec::with_capacity(4 * mesh.num_triangles());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let te = &mesh.tri_edges[t];
        // local edge i joins tri[i] and tri[i+1]
        let m01 = nv + te[0].edge;
        let m12 = nv + te[1].edge;
        let m20 = nv + te[2].edge;
        triangles.push([tri[0], m01, m20]);
        triangles.push([m01, tri[1], m12]);
        triangles.push([m20, m12, tri[2]]);
        triangles.push([m01, m12, m20]);
    }
    Mesh::new(vertices, triangles).expect("refinement keeps indices in range")
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NonPositiveArea { triangle: usize, area: f64 },
    EdgeValence { edge: usize, count: usize },
    BoundaryFlag { edge: usize },
    NormalNotUnit { edge: usize, norm: f64 },
    NormalNotPerpendicular { edge: usize, dot: f64 },
    /// Stored `sigma_{T,e}` disagrees with the geometric `n_T . n_e`.
    SignMismatch { triangle: usize, edge: usize, dot: f64 },
    /// The two adjacent outward normals of an interior edge do not oppose.
    SignsDoNotCancel { edge: usize, sum: f64 },
    Euler { characteristic: i64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveArea { triangle, area } => {
                write!(f, "triangle {triangle}: non-positive signed area {area:e}")
            }
            Violation::EdgeValence { edge, count } => {
                write!(f, "edge {edge}: shared by {count} triangles")
            }
            Violation::BoundaryFlag { edge } => write!(f, "edge {edge}: boundary flag inconsistent"),
            Violation::NormalNotUnit { edge, norm } => {
                write!(f, "edge {edge}: normal has length {norm}")
            }
            Violation::NormalNotPerpendicular { edge, dot } => {
                write!(f, "edge {edge}: normal not perpendicular (dot {dot:e})")
            }
            Violation::SignMismatch { triangle, edge, dot } => {
                write!(f, "triangle {triangle}, edge {edge}: n_T . n_e = {dot}, stored sign disagrees")
            }
            Violation::SignsDoNotCancel { edge, sum } => {
                write!(f, "edge {edge}: adjacent orientation signs sum to {sum}")
            }
            Violation::Euler { characteristic } => {
                write!(f, "Euler characteristic V - E + F + 1 = {characteristic}, expected 2")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MeshReport {
    pub violations: Vec<Violation>,
}

impl MeshReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for MeshReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "mesh is valid");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}
