//! Polynomial spaces on triangles and edges, quadrature, and L2 projections.

pub mod basis;
pub mod project;
pub mod quadrature;

pub use basis::{legendre_values, tri_dim, EdgeBasis, TriBasis, TriEval};
pub use project::{project_edge, project_tri, TriProjector};
pub use quadrature::{edge_quadrature, tri_quadrature, EdgeRule, TriRule};
