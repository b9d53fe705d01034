//! L2 projections onto `P_r(T)` and `P_r(e)`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::basis::{EdgeBasis, TriBasis};
use super::quadrature::{edge_quadrature, tri_quadrature, TriPoints};
use crate::error::{Error, Result};
use crate::mesh::{ElementGeometry, Point};

/// Mass matrices whose condition estimate exceeds this are rejected.
pub const MAX_MASS_CONDITION: f64 = 1e12;

/// Mass matrix of a triangle basis under the given quadrature points.
pub fn tri_mass_matrix(basis: &TriBasis, pts: &TriPoints) -> DMatrix<f64> {
    let n = basis.dim();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for (p, w) in pts.points.iter().zip(&pts.weights) {
        let v = basis.values(*p);
        for j in 0..n {
            let wj = w * v[j];
            for i in j..n {
                m[(i, j)] += wj * v[i];
            }
        }
    }
    m.fill_upper_triangle_with_lower_triangle();
    m
}

/// Cholesky factorization of a mass matrix, rejecting ill-conditioned ones.
pub fn factor_mass(m: DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    let eig = m.symmetric_eigenvalues();
    let (lo, hi) = (eig.min(), eig.max());
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition <= MAX_MASS_CONDITION) {
        return Err(Error::IllConditionedMass { condition });
    }
    Cholesky::new(m).ok_or(Error::IllConditionedMass { condition })
}

/// L2 projection onto `P_r(T)` with a fixed quadrature rule.
#[derive(Clone, Debug)]
pub struct TriProjector {
    basis: TriBasis,
    points: TriPoints,
    mass: DMatrix<f64>,
    factor: Cholesky<f64, Dyn>,
}

impl TriProjector {
    pub fn new(geom: &ElementGeometry, r: usize, quad_degree: usize) -> Result<Self> {
        let basis = TriBasis::new(geom, r);
        let points = tri_quadrature(quad_degree.max(2 * r))?.on_triangle(geom);
        let mass = tri_mass_matrix(&basis, &points);
        let factor = factor_mass(mass.clone())?;
        Ok(Self {
            basis,
            points,
            mass,
            factor,
        })
    }

    pub fn basis(&self) -> &TriBasis {
        &self.basis
    }

    pub fn mass(&self) -> &DMatrix<f64> {
        &self.mass
    }

    /// Moment vector `(f, phi_i)_T`.
    pub fn moments<F: Fn(Point) -> f64>(&self, f: F) -> DVector<f64> {
        let mut b = DVector::<f64>::zeros(self.basis.dim());
        for (p, w) in self.points.points.iter().zip(&self.points.weights) {
            let fv = w * f(*p);
            for (bi, v) in b.iter_mut().zip(self.basis.values(*p)) {
                *bi += fv * v;
            }
        }
        b
    }

    pub fn project<F: Fn(Point) -> f64>(&self, f: F) -> DVector<f64> {
        self.factor.solve(&self.moments(f))
    }
}

/// Coefficients of the L2 projection of `f` onto `P_r(T)` in the scaled
/// monomial basis.
pub fn project_tri<F: Fn(Point) -> f64>(
    f: F,
    r: usize,
    geom: &ElementGeometry,
    quad_degree: usize,
) -> Result<Vec<f64>> {
    Ok(TriProjector::new(geom, r, quad_degree)?
        .project(f)
        .as_slice()
        .to_vec())
}

/// Legendre coefficients of the L2 projection of `f` onto `P_r(e)` for the
/// segment from `a` to `b`. The edge mass matrix is diagonal, so each
/// coefficient is a single moment divided by `|e| / (2j + 1)`.
pub fn project_edge<F: Fn(Point) -> f64>(
    f: F,
    r: usize,
    a: Point,
    b: Point,
    quad_degree: usize,
) -> Result<Vec<f64>> {
    let pts = edge_quadrature(quad_degree.max(2 * r))?.on_segment(a, b);
    let basis = EdgeBasis::new(crate::mesh::distance(a, b), r);
    let mut c = vec![0.0; r + 1];
    for ((p, &t), w) in pts.points.iter().zip(&pts.params).zip(&pts.weights) {
        let fv = w * f(*p);
        for (cj, v) in c.iter_mut().zip(basis.values(t)) {
            *cj += fv * v;
        }
    }
    for (cj, m) in c.iter_mut().zip(basis.mass_diagonal()) {
        *cj /= m;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn element() -> ElementGeometry {
        ElementGeometry::new([[0.125, 0.25], [0.25, 0.25], [0.125, 0.375]])
    }

    fn random_poly(rng: &mut ChaCha8Rng, r: usize) -> impl Fn(Point) -> f64 {
        let c: Vec<f64> = (0..(r + 1) * (r + 1)).map(|_| rng.random_range(-1.0..1.0)).collect();
        move |p: Point| {
            let mut s = 0.0;
            for a in 0..=r {
                for b in 0..=(r - a) {
                    s += c[a * (r + 1) + b] * p[0].powi(a as i32) * p[1].powi(b as i32);
                }
            }
            s
        }
    }

    #[test]
    fn constants_are_reproduced() {
        let g = element();
        for r in 0..=4 {
            let c = project_tri(|_| 3.7, r, &g, 2 * r + 4).unwrap();
            let basis = TriBasis::new(&g, r);
            for p in [g.centroid, g.vertices[0], g.vertices[2]] {
                assert!((basis.evaluate(&c, p) - 3.7).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn polynomials_are_reproduced() {
        let g = element();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for r in 0..=4 {
            let f = random_poly(&mut rng, r);
            let c = project_tri(&f, r, &g, 2 * r + 4).unwrap();
            let basis = TriBasis::new(&g, r);
            for _ in 0..20 {
                let (s, t) = (rng.random_range(0.0..0.5), rng.random_range(0.0..0.5));
                let p = g.map(s, t);
                assert!((basis.evaluate(&c, p) - f(p)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn projection_error_is_orthogonal() {
        let g = element();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = 2;
        let f = random_poly(&mut rng, 4);
        let proj = TriProjector::new(&g, r, 12).unwrap();
        let c = proj.project(&f);
        let basis = proj.basis().clone();
        let resid = proj.moments(|p| f(p) - basis.evaluate(c.as_slice(), p));
        assert!(resid.amax() < 1e-12);
    }

    #[test]
    fn idempotent() {
        let g = element();
        let f = |p: Point| (PI * p[0]).sin() * (PI * p[1]).cos();
        let proj = TriProjector::new(&g, 3, 10).unwrap();
        let c1 = proj.project(f);
        let basis = proj.basis().clone();
        let c2 = proj.project(|p| basis.evaluate(c1.as_slice(), p));
        assert!((c1 - c2).amax() < 1e-12);

        let (a, b) = ([0.1, 0.2], [0.4, 0.3]);
        let e1 = project_edge(f, 2, a, b, 10).unwrap();
        let eb = EdgeBasis::new(crate::mesh::distance(a, b), 2);
        let lift = |p: Point| {
            let t = 2.0 * crate::mesh::distance(a, p) / eb.length - 1.0;
            eb.evaluate(&e1, t)
        };
        let e2 = project_edge(lift, 2, a, b, 10).unwrap();
        for (x, y) in e1.iter().zip(&e2) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn best_approximation_beats_interpolation() {
        // h = 1/8 element; compare against the quadratic Lagrange interpolant
        let g = element();
        let f = |p: Point| (PI * p[0]).sin() * (PI * p[1]).sin();
        let proj = TriProjector::new(&g, 2, 12).unwrap();
        let c = proj.project(f);
        let basis = proj.basis().clone();

        let [p0, p1, p2] = g.vertices;
        let mid = |a: Point, b: Point| [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        let nodes = [p0, p1, p2, mid(p0, p1), mid(p1, p2), mid(p2, p0)];
        let mut v = DMatrix::<f64>::zeros(6, 6);
        for (i, n) in nodes.iter().enumerate() {
            for (j, x) in basis.values(*n).into_iter().enumerate() {
                v[(i, j)] = x;
            }
        }
        let rhs = DVector::from_iterator(6, nodes.iter().map(|&n| f(n)));
        let interp = v.lu().solve(&rhs).unwrap();

        let pts = tri_quadrature(16).unwrap().on_triangle(&g);
        let err = |coef: &[f64]| -> f64 {
            pts.points
                .iter()
                .zip(&pts.weights)
                .map(|(p, w)| w * (f(*p) - basis.evaluate(coef, *p)).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        let e_proj = err(c.as_slice());
        let e_interp = err(interp.as_slice());
        assert!(e_proj <= e_interp, "{e_proj} > {e_interp}");
    }

    #[test]
    fn edge_projection_cases() {
        let (a, b) = ([0.0, 0.0], [0.3, 0.4]);
        let c = project_edge(|_| 2.5, 3, a, b, 6).unwrap();
        assert!((c[0] - 2.5).abs() < 1e-14);
        assert!(c[1..].iter().all(|x| x.abs() < 1e-14), "{c:?}");

        // linear in arclength: s = |p - a|, parameter t = 2 s / |e| - 1
        let c = project_edge(|p| 1.0 + 2.0 * p[0].hypot(p[1]), 1, a, b, 4).unwrap();
        // 1 + 2 s = 1 + (t + 1) * |e| = 1 + 0.5 + 0.5 t
        assert!((c[0] - 1.5).abs() < 1e-14, "{c:?}");
        assert!((c[1] - 0.5).abs() < 1e-14, "{c:?}");
    }

    #[test]
    fn edge_projection_matches_least_squares() {
        let (a, b) = ([0.2, 0.1], [0.7, 0.5]);
        let f = |p: Point| p[0] * p[0] * p[1];
        let c = project_edge(f, 1, a, b, 8).unwrap();
        // least-squares fit of c0 + c1 t on a fine rule (dense normal equations)
        let rule = edge_quadrature(30).unwrap();
        let mut ata = DMatrix::<f64>::zeros(2, 2);
        let mut atb = DVector::<f64>::zeros(2);
        for (&t, w) in rule.points.iter().zip(&rule.weights) {
            let s = 0.5 * (t + 1.0);
            let p = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            let row = [1.0, t];
            for i in 0..2 {
                for j in 0..2 {
                    ata[(i, j)] += w * row[i] * row[j];
                }
                atb[i] += w * row[i] * f(p);
            }
        }
        let ls = ata.lu().solve(&atb).unwrap();
        assert!((c[0] - ls[0]).abs() < 1e-12);
        assert!((c[1] - ls[1]).abs() < 1e-12);
    }

    #[test]
    fn degenerate_element_is_rejected() {
        let g = ElementGeometry::new([[0.0, 0.0], [1.0, 0.0], [0.5, 1e-9]]);
        let err = TriProjector::new(&g, 3, 8).unwrap_err();
        assert!(matches!(err, Error::IllConditionedMass { .. }));
    }
}
