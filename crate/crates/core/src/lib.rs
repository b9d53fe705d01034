//! Weak Galerkin finite elements for the clamped biharmonic problem
//! `Δ²u = f`, `u = g`, `∂u/∂n = g_n` on two-dimensional triangular meshes.
//!
//! The crate provides both the full weak Galerkin system, coupling interior
//! and edge unknowns, and its statically condensed form, in which interior
//! unknowns are eliminated element by element and only the edge traces
//! `{v_b, v_n}` remain globally coupled.

// `!(x <= tol)` is used on purpose so that NaN fails every check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod mesh;
pub mod par;
pub mod polybasis;
pub mod solver;
pub mod wg_element;

pub use error::{Error, Result};
pub use mesh::Mesh;
pub use par::Execution;
