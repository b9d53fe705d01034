//! Global assembly, static condensation, and linear solves.

pub mod assemble;
pub mod condense;
pub mod dofmap;
pub mod function;
pub mod linsolve;
pub mod sparse;

pub use assemble::{assemble_full, GlobalSystem};
pub use condense::{check_equivalence, condense, CondensedSystem};
pub use dofmap::{DofMap, Slot};
pub use function::WgFunction;
pub use linsolve::{solve, SolveReport, SolverMethod};
pub use sparse::CsrMatrix;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point};
use crate::wg_element::{local_load, local_stiffness, ElementContext};

/// Data of a clamped biharmonic problem `Δ²u = f`, `u = g`, `∂u/∂n = g_n`.
pub trait Problem: Sync {
    fn load(&self, p: Point) -> f64;
    fn boundary_value(&self, p: Point) -> f64;
    /// `g_n(p)`, the derivative along the outward unit normal `outward`.
    fn boundary_flux(&self, p: Point, outward: [f64; 2]) -> f64;
}

/// `f = 0`, `g = 0`, `g_n = 0`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Homogeneous;

impl Problem for Homogeneous {
    fn load(&self, _: Point) -> f64 {
        0.0
    }
    fn boundary_value(&self, _: Point) -> f64 {
        0.0
    }
    fn boundary_flux(&self, _: Point, _: [f64; 2]) -> f64 {
        0.0
    }
}

/// Attaches the element id to per-element failures.
pub(crate) fn tag_element(t: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::IllConditionedMass { condition } => Error::DegenerateElement {
            element: t,
            condition,
        },
        other => other,
    }
}

/// Local stiffness `A` and load `F` of triangle `t`.
pub(crate) fn element_system<P: Problem + ?Sized>(
    mesh: &Mesh,
    k: usize,
    problem: &P,
    t: usize,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let ctx = ElementContext::from_mesh(mesh, t, k)?;
    let ops = local_stiffness(&ctx).map_err(tag_element(t))?;
    let load = local_load(&ctx, |p| problem.load(p)).map_err(tag_element(t))?;
    Ok((ops.stiffness, load))
}

/// Which linear system is formed and solved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Formulation {
    /// Interior and edge unknowns together.
    Full,
    /// Edge unknowns only, interiors recovered afterwards.
    #[default]
    Condensed,
}

/// Assembles and solves a problem with the chosen formulation and solver.
pub fn solve_problem<P: Problem + ?Sized>(
    mesh: &Mesh,
    k: usize,
    problem: &P,
    formulation: Formulation,
    method: SolverMethod,
    exec: crate::par::Execution,
) -> Result<(WgFunction, SolveReport)> {
    match formulation {
        Formulation::Full => assemble_full(mesh, k, problem, exec)?.solve(mesh, method),
        Formulation::Condensed => condense(mesh, k, problem, exec)?.solve(mesh, method, exec),
    }
}
