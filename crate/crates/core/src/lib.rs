//! Mixed Dirichlet-Neumann problems on planar triangles.
//!
//! The triangle family, moving-plane geometry, structured meshes, a P1
//! finite element solver for the principal eigenpair and for semilinear
//! problems, and qualitative checks on the discrete solutions.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod fem;
pub mod geometry;
pub mod mesh;
pub mod qualify;
pub mod sweep;

pub use geometry::{make_triangle, make_triangle_deg, TriangleSpec, Vec2};
