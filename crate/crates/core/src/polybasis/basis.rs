//! Scaled monomial bases on triangles and Legendre bases on edges.

use crate::mesh::{ElementGeometry, Point};

/// Dimension of `P_r` in two variables.
pub fn tri_dim(r: usize) -> usize {
    (r + 1) * (r + 2) / 2
}

/// Scaled monomials `((x - x_c) / h_T)^a ((y - y_c) / h_T)^b`, `a + b <= r`,
/// ordered by total degree and then by the power of `y`.
#[derive(Clone, Debug)]
pub struct TriBasis {
    center: Point,
    scale: f64,
    degree: usize,
    exponents: Vec<(usize, usize)>,
}

/// Values, gradients and Laplacians of every basis function at one point.
#[derive(Clone, Debug, Default)]
pub struct TriEval {
    pub values: Vec<f64>,
    pub gradients: Vec<[f64; 2]>,
    pub laplacians: Vec<f64>,
}

impl TriBasis {
    pub fn new(geom: &ElementGeometry, degree: usize) -> Self {
        Self::with_center(geom.centroid, geom.diameter, degree)
    }

    pub fn with_center(center: Point, scale: f64, degree: usize) -> Self {
        let exponents = (0..=degree)
            .flat_map(|d| (0..=d).map(move |j| (d - j, j)))
            .collect();
        Self {
            center,
            scale,
            degree,
            exponents,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self) -> &[(usize, usize)] {
        &self.exponents
    }

    fn powers(&self, p: Point) -> (Vec<f64>, Vec<f64>) {
        let xi = (p[0] - self.center[0]) / self.scale;
        let eta = (p[1] - self.center[1]) / self.scale;
        let mut px = vec![1.0; self.degree + 1];
        let mut py = vec![1.0; self.degree + 1];
        for i in 1..=self.degree {
            px[i] = px[i - 1] * xi;
            py[i] = py[i - 1] * eta;
        }
        (px, py)
    }

    pub fn values(&self, p: Point) -> Vec<f64> {
        let (px, py) = self.powers(p);
        self.exponents.iter().map(|&(a, b)| px[a] * py[b]).collect()
    }

    pub fn gradients(&self, p: Point) -> Vec<[f64; 2]> {
        let (px, py) = self.powers(p);
        let s = 1.0 / self.scale;
        self.exponents
            .iter()
            .map(|&(a, b)| {
                let dx = if a > 0 { a as f64 * px[a - 1] * py[b] * s } else { 0.0 };
                let dy = if b > 0 { b as f64 * px[a] * py[b - 1] * s } else { 0.0 };
                [dx, dy]
            })
            .collect()
    }

    pub fn laplacians(&self, p: Point) -> Vec<f64> {
        let (px, py) = self.powers(p);
        let s2 = 1.0 / (self.scale * self.scale);
        self.exponents
            .iter()
            .map(|&(a, b)| {
                let dxx = if a > 1 { (a * (a - 1)) as f64 * px[a - 2] * py[b] } else { 0.0 };
                let dyy = if b > 1 { (b * (b - 1)) as f64 * px[a] * py[b - 2] } else { 0.0 };
                (dxx + dyy) * s2
            })
            .collect()
    }

    pub fn eval(&self, points: &[Point]) -> Vec<TriEval> {
        points
            .iter()
            .map(|&p| TriEval {
                values: self.values(p),
                gradients: self.gradients(p),
                laplacians: self.laplacians(p),
            })
            .collect()
    }

    /// Evaluates `sum_i coeffs[i] phi_i(p)`.
    pub fn evaluate(&self, coeffs: &[f64], p: Point) -> f64 {
        self.values(p).iter().zip(coeffs).map(|(v, c)| v * c).sum()
    }
}

/// Legendre polynomials `P_0..=P_r` at `t` in `[-1, 1]`.
pub fn legendre_values(r: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(r + 1);
    out.push(1.0);
    if r >= 1 {
        out.push(t);
    }
    for j in 2..=r {
        let jf = j as f64;
        let next = ((2.0 * jf - 1.0) * t * out[j - 1] - (jf - 1.0) * out[j - 2]) / jf;
        out.push(next);
    }
    out
}

/// Legendre basis in the arclength parameter of an edge, mapped to `[-1, 1]`
/// with `-1` at the lower-indexed vertex.
#[derive(Clone, Copy, Debug)]
pub struct EdgeBasis {
    pub degree: usize,
    pub length: f64,
}

impl EdgeBasis {
    pub fn new(length: f64, degree: usize) -> Self {
        Self { degree, length }
    }

    pub fn dim(&self) -> usize {
        self.degree + 1
    }

    pub fn values(&self, t: f64) -> Vec<f64> {
        legendre_values(self.degree, t)
    }

    /// Diagonal of the edge mass matrix, `|e| / (2j + 1)`.
    pub fn mass_diagonal(&self) -> Vec<f64> {
        (0..=self.degree)
            .map(|j| self.length / (2 * j + 1) as f64)
            .collect()
    }

    pub fn evaluate(&self, coeffs: &[f64], t: f64) -> f64 {
        self.values(t).iter().zip(coeffs).map(|(v, c)| v * c).sum()
    }
}
