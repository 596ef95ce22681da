//! Machine-checkable versions of the qualitative properties of the
//! principal eigenfunction: monotonicity, symmetry, location of the maximum,
//! critical points, corner behaviour and moving-plane positivity.
//!
//! Strict inequalities are tested on cell barycenters away from the three
//! corners. A value passes when it clears zero up to `C·h` times the natural
//! scale of the quantity, with `C` = [`GRADIENT_TOLERANCE`].

mod angular;
mod corner;
mod critical;
mod maxloc;
mod monotone;
mod reflection;
mod report;
mod symmetry;

pub use angular::{angular_derivative, angular_value, arc_trace, ArcTrace};
pub use corner::{corner_fit, corner_fit_range, CornerFit, CornerModel, MIN_FIT_SAMPLES};
pub use critical::{critical_points, CriticalCluster, DEFAULT_GRAD_TOL, DEGENERACY_FACTOR};
pub use maxloc::{expected_max_class, locate_max, MaxClass, MaxLocation};
pub use monotone::{
    directional_monotonicity, directional_sign, middle_side_direction, normal_monotonicity_middle_side,
    tangential_neumann, Sign,
};
pub use reflection::{
    difference_quotient_coeff, reflection_positivity, sample_polygon, QuotientReport, ReflectionReport,
};
pub use report::{qualify_eigenfunction, reflection_grid, QualOptions, QualReport};
pub use symmetry::{symmetry_error, SymmetryReport};

use thiserror::Error;

use crate::geometry::{GeometryError, Vec2};
use crate::mesh::Mesh;

/// `C` in the `C·h` tolerance. Calibrated on the right isosceles triangle,
/// where the gradient is known in closed form (see the integration tests).
pub const GRADIENT_TOLERANCE: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QualifyError {
    #[error("moving domain is empty")]
    EmptyDomain,
    #[error("mesh is not mapped onto itself by x2 -> -x2")]
    AsymmetricMesh,
    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("field has {got} values, mesh has {expected} vertices")]
    FieldSize { got: usize, expected: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub type Result<T> = std::result::Result<T, QualifyError>;

/// Outcome of a one-signed check. For a "negative" check `worst_value` is
/// the largest sampled value and `pass ⇔ worst_value < tolerance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub pass: bool,
    pub worst_value: f64,
    pub worst_location: Vec2,
    pub tolerance: f64,
    pub excluded_radius: f64,
    /// Number of sampled points that entered the check.
    pub samples: usize,
}

impl Verdict {
    /// Distance by which the worst value clears the tolerance; negative when failing.
    pub fn margin(&self) -> f64 {
        self.tolerance - self.worst_value
    }

    /// Folds sample values that are expected negative.
    pub(crate) fn negative(
        values: impl IntoIterator<Item = (f64, Vec2)>,
        tolerance: f64,
        excluded_radius: f64,
    ) -> Self {
        let mut worst = f64::NEG_INFINITY;
        let mut at = Vec2::ZERO;
        let mut samples = 0;
        for (v, p) in values {
            samples += 1;
            if v > worst {
                worst = v;
                at = p;
            }
        }
        Verdict {
            pass: samples == 0 || worst < tolerance,
            worst_value: if samples == 0 { 0.0 } else { worst },
            worst_location: at,
            tolerance,
            excluded_radius,
            samples,
        }
    }
}

pub(crate) fn check_field(mesh: &Mesh, u: &[f64]) -> Result<()> {
    if u.len() != mesh.num_vertices() {
        return Err(QualifyError::FieldSize {
            got: u.len(),
            expected: mesh.num_vertices(),
        });
    }
    Ok(())
}

pub(crate) fn near_corner(mesh: &Mesh, p: Vec2, r: f64) -> bool {
    mesh.corners.iter().any(|c| c.dist(p) <= r)
}

pub(crate) fn sup_norm(u: &[f64]) -> f64 {
    u.iter().fold(0.0, |m, v| m.max(v.abs()))
}
