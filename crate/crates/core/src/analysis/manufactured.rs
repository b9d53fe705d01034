//! Manufactured solutions of the benchmark problems.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mesh::{self, Mesh, Point};
use crate::solver::Problem;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    UnitSquare,
    LShape,
}

/// An exact solution together with the data derived from it:
/// `f = Δ²u`, `g = u|∂Ω`, `g_n = ∇u · n_Ω`.
#[derive(Clone, Copy)]
pub struct ManufacturedSolution {
    pub name: &'static str,
    pub domain: Domain,
    pub regularity: &'static str,
    u: fn(Point) -> f64,
    grad: fn(Point) -> [f64; 2],
    laplacian: fn(Point) -> f64,
    bilaplacian: fn(Point) -> f64,
}

impl fmt::Debug for ManufacturedSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManufacturedSolution")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish()
    }
}

impl ManufacturedSolution {
    pub fn u(&self, p: Point) -> f64 {
        (self.u)(p)
    }

    pub fn grad(&self, p: Point) -> [f64; 2] {
        (self.grad)(p)
    }

    pub fn laplacian(&self, p: Point) -> f64 {
        (self.laplacian)(p)
    }

    /// `f = Δ²u`.
    pub fn f(&self, p: Point) -> f64 {
        (self.bilaplacian)(p)
    }
}

impl Problem for ManufacturedSolution {
    fn load(&self, p: Point) -> f64 {
        self.f(p)
    }

    fn boundary_value(&self, p: Point) -> f64 {
        self.u(p)
    }

    fn boundary_flux(&self, p: Point, outward: [f64; 2]) -> f64 {
        let g = self.grad(p);
        g[0] * outward[0] + g[1] * outward[1]
    }
}

// p(t) = t²(1 − t)² and its derivatives
fn bump(t: f64) -> f64 {
    t * t * (1.0 - t) * (1.0 - t)
}
fn bump_d1(t: f64) -> f64 {
    2.0 * t * (1.0 - t) * (1.0 - 2.0 * t)
}
fn bump_d2(t: f64) -> f64 {
    2.0 - 12.0 * t + 12.0 * t * t
}
const BUMP_D4: f64 = 24.0;

// q(t) = t²(1 − t²)
fn q(t: f64) -> f64 {
    t * t * (1.0 - t * t)
}
fn q_d1(t: f64) -> f64 {
    2.0 * t - 4.0 * t * t * t
}
fn q_d2(t: f64) -> f64 {
    2.0 - 12.0 * t * t
}
const Q_D4: f64 = -24.0;

/// `u = x²(1−x)² y²(1−y)²`, clamped on the unit square.
pub const EXAMPLE_1: ManufacturedSolution = ManufacturedSolution {
    name: "x^2(1-x)^2 y^2(1-y)^2",
    domain: Domain::UnitSquare,
    regularity: "polynomial, u and its normal derivative vanish on the boundary",
    u: |p| bump(p[0]) * bump(p[1]),
    grad: |p| [bump_d1(p[0]) * bump(p[1]), bump(p[0]) * bump_d1(p[1])],
    laplacian: |p| bump_d2(p[0]) * bump(p[1]) + bump(p[0]) * bump_d2(p[1]),
    bilaplacian: |p| {
        BUMP_D4 * bump(p[1]) + 2.0 * bump_d2(p[0]) * bump_d2(p[1]) + bump(p[0]) * BUMP_D4
    },
};

/// `u = x²(1−x)² y²(1−y²)`; the normal derivative does not vanish at `y = 1`,
/// so the boundary data are inhomogeneous.
pub const EXAMPLE_1_VERBATIM: ManufacturedSolution = ManufacturedSolution {
    name: "x^2(1-x)^2 y^2(1-y^2)",
    domain: Domain::UnitSquare,
    regularity: "polynomial, inhomogeneous normal derivative on y = 1",
    u: |p| bump(p[0]) * q(p[1]),
    grad: |p| [bump_d1(p[0]) * q(p[1]), bump(p[0]) * q_d1(p[1])],
    laplacian: |p| bump_d2(p[0]) * q(p[1]) + bump(p[0]) * q_d2(p[1]),
    bilaplacian: |p| BUMP_D4 * q(p[1]) + 2.0 * bump_d2(p[0]) * q_d2(p[1]) + bump(p[0]) * Q_D4,
};

/// `u = sin(πx) sin(πy)` on the unit square.
pub const EXAMPLE_2: ManufacturedSolution = ManufacturedSolution {
    name: "sin(pi x) sin(pi y)",
    domain: Domain::UnitSquare,
    regularity: "analytic",
    u: |p| (PI * p[0]).sin() * (PI * p[1]).sin(),
    grad: |p| {
        [
            PI * (PI * p[0]).cos() * (PI * p[1]).sin(),
            PI * (PI * p[0]).sin() * (PI * p[1]).cos(),
        ]
    },
    laplacian: |p| -2.0 * PI * PI * (PI * p[0]).sin() * (PI * p[1]).sin(),
    bilaplacian: |p| 4.0 * PI.powi(4) * (PI * p[0]).sin() * (PI * p[1]).sin(),
};

/// Polar angle in `[0, 2π)`. On the L-shaped domain it lies in `[0, 3π/2]`.
fn angle(p: Point) -> f64 {
    let t = p[1].atan2(p[0]);
    if t < 0.0 {
        t + 2.0 * PI
    } else {
        t
    }
}

/// `u = r^{5/3} sin(5θ/3)` on the L-shaped domain. Harmonic, hence biharmonic
/// with `f = 0`; only `H^{8/3−ε}` near the reentrant corner.
pub const EXAMPLE_3: ManufacturedSolution = ManufacturedSolution {
    name: "r^(5/3) sin(5 theta / 3)",
    domain: Domain::LShape,
    regularity: "H^(8/3 - eps), singular at the reentrant corner",
    u: |p| {
        let r = p[0].hypot(p[1]);
        r.powf(5.0 / 3.0) * (5.0 * angle(p) / 3.0).sin()
    },
    // u_r e_r + (u_θ / r) e_θ = (5/3) r^{2/3} (sin(2θ/3), cos(2θ/3))
    grad: |p| {
        let r = p[0].hypot(p[1]);
        if r == 0.0 {
            return [0.0, 0.0];
        }
        let th = angle(p);
        let c = 5.0 / 3.0 * r.powf(2.0 / 3.0);
        [c * (2.0 * th / 3.0).sin(), c * (2.0 * th / 3.0).cos()]
    },
    laplacian: |_| 0.0,
    bilaplacian: |_| 0.0,
};

/// The benchmark problems, selectable by id.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Example {
    /// Clamped polynomial on the unit square (id `1`).
    One,
    /// The polynomial with `(1 − y²)` in place of `(1 − y)²` (id `1v`).
    OneVerbatim,
    /// Smooth trigonometric solution on the unit square (id `2`).
    Two,
    /// Corner singularity on the L-shaped domain (id `3`).
    Three,
}

impl Example {
    pub const ALL: [Example; 4] = [Example::One, Example::OneVerbatim, Example::Two, Example::Three];

    pub fn solution(self) -> &'static ManufacturedSolution {
        match self {
            Example::One => &EXAMPLE_1,
            Example::OneVerbatim => &EXAMPLE_1_VERBATIM,
            Example::Two => &EXAMPLE_2,
            Example::Three => &EXAMPLE_3,
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            Example::One => "1",
            Example::OneVerbatim => "1v",
            Example::Two => "2",
            Example::Three => "3",
        }
    }

    /// Mesh of refinement level `level >= 1`: the `n x n` unit square mesh
    /// with `n = 4 · 2^(level−1)`, or the initial L-shape mesh refined
    /// `level − 1` times.
    pub fn mesh(self, level: usize) -> Result<Mesh> {
        if level == 0 {
            return Err(Error::InvalidArgument("levels are numbered from 1".into()));
        }
        match self.solution().domain {
            Domain::UnitSquare => mesh::unit_square(4 << (level - 1)),
            Domain::LShape => {
                let mut m = mesh::lshape_initial();
                for _ in 1..level {
                    m = mesh::refine_uniform(&m);
                }
                Ok(m)
            }
        }
    }

    /// Nominal mesh size of a level: the side of the squares the triangles
    /// were cut from.
    pub fn nominal_h(self, level: usize) -> f64 {
        match self.solution().domain {
            Domain::UnitSquare => 1.0 / (4 << (level - 1)) as f64,
            Domain::LShape => 1.0 / (1 << (level - 1)) as f64,
        }
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Example {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(Example::One),
            "1v" | "1-verbatim" => Ok(Example::OneVerbatim),
            "2" => Ok(Example::Two),
            "3" => Ok(Example::Three),
            other => Err(Error::InvalidArgument(format!(
                "unknown example `{other}` (expected 1, 1v, 2 or 3)"
            ))),
        }
    }
}
