//! Gauss-Legendre rules on intervals and collapsed (Duffy) product rules on
//! triangles.

use crate::error::{Error, Result};
use crate::mesh::{ElementGeometry, Point};

/// Highest polynomial degree any rule in this module is built for.
pub const MAX_DEGREE: usize = 40;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending nodes.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess, refined by Newton on P_n.
        let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Rule on the reference interval `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct EdgeRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

/// Gauss rule with `ceil((degree + 1) / 2)` points, exact to `degree`.
pub fn edge_quadrature(degree: usize) -> Result<EdgeRule> {
    if degree > MAX_DEGREE {
        return Err(Error::UnsupportedDegree {
            requested: degree,
            max: MAX_DEGREE,
        });
    }
    let n = (degree + 2) / 2;
    let (points, weights) = gauss_legendre(n.max(1));
    Ok(EdgeRule {
        points,
        weights,
        degree,
    })
}

/// Quadrature points on a physical segment.
#[derive(Clone, Debug)]
pub struct EdgePoints {
    pub points: Vec<Point>,
    /// Reference parameter in `[-1, 1]`, `-1` at `a`.
    pub params: Vec<f64>,
    /// Physical weights, summing to the segment length.
    pub weights: Vec<f64>,
}

impl EdgeRule {
    pub fn on_segment(&self, a: Point, b: Point) -> EdgePoints {
        let half = 0.5 * crate::mesh::distance(a, b);
        let points = self
            .points
            .iter()
            .map(|&t| {
                let s = 0.5 * (t + 1.0);
                [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
            })
            .collect();
        EdgePoints {
            points,
            params: self.points.clone(),
            weights: self.weights.iter().map(|w| w * half).collect(),
        }
    }
}

/// Rule on the reference triangle `(0,0), (1,0), (0,1)`.
#[derive(Clone, Debug)]
pub struct TriRule {
    /// Reference coordinates `(s, t)`.
    pub points: Vec<[f64; 2]>,
    /// Weights summing to `1/2`.
    pub weights: Vec<f64>,
    pub degree: usize,
}

/// Collapsed Gauss product rule exact for polynomials of total degree
/// `degree`.
pub fn tri_quadrature(degree: usize) -> Result<TriRule> {
    if degree > MAX_DEGREE {
        return Err(Error::UnsupportedDegree {
            requested: degree,
            max: MAX_DEGREE,
        });
    }
    // The Duffy Jacobian (1 - u) adds one degree in u.
    let n = (degree + 3) / 2;
    let (x, w) = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for i in 0..n {
        let u = 0.5 * (x[i] + 1.0);
        for j in 0..n {
            let v = 0.5 * (x[j] + 1.0);
            points.push([u, v * (1.0 - u)]);
            weights.push(0.25 * w[i] * w[j] * (1.0 - u));
        }
    }
    Ok(TriRule {
        points,
        weights,
        degree,
    })
}

/// Quadrature points on a physical triangle.
#[derive(Clone, Debug)]
pub struct TriPoints {
    pub points: Vec<Point>,
    /// Physical weights, summing to the (unsigned) triangle area.
    pub weights: Vec<f64>,
}

impl TriRule {
    pub fn on_triangle(&self, geom: &ElementGeometry) -> TriPoints {
        let jac = 2.0 * geom.area.abs();
        TriPoints {
            points: self.points.iter().map(|p| geom.map(p[0], p[1])).collect(),
            weights: self.weights.iter().map(|w| w * jac).collect(),
        }
    }
}
