//! Shared fixtures for the benchmarks.

use mixtri_core::mesh::{default_grading, generate, Mesh};
use mixtri_core::{make_triangle_deg, TriangleSpec};

/// The obtuse, non-isosceles reference triangle used throughout.
pub fn reference_triangle() -> TriangleSpec {
    make_triangle_deg(48.0, 33.0).expect("valid angles")
}

pub fn reference_mesh(n: usize) -> Mesh {
    let spec = reference_triangle();
    generate(&spec, n, default_grading(&spec)).expect("mesh")
}
