//! Triangle family, moving lines and moving domains.
//!
//! The triangle `OAB` has its Neumann vertex `O` at the origin and its
//! Dirichlet side `AB` on the vertical line `x₁ = 1`, with
//! `A = (1, −cot α)` below the axis and `B = (1, cot β)` above it.
//! All angles are radians.

mod clip;
mod point;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};
use std::fmt;

use thiserror::Error;

pub use clip::{
    cap_domain, clip_half_plane, convex_hull, moving_domain, moving_domain_full, BoundaryTag, MovingDomain,
    TaggedSegment, EMPTY_AREA, MERGE_TOL, TAG_TOL,
};
pub use point::{point_segment_distance, polygon_area, polygon_perimeter, signed_area, Vec2};

/// Tolerance for "right angle" and "isosceles" comparisons.
pub const ANGLE_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("angles outside the admissible range: {0}")]
    AngleDomain(String),
    #[error("parameter outside its domain: {0}")]
    ParamDomain(String),
    #[error("singular evaluation: {0}")]
    Singular(String),
    #[error("value must be positive, got {0}")]
    NonPositive(f64),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

/// One of the three sides of the triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Dirichlet,
    NeumannLower,
    NeumannUpper,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Dirichlet => "Dirichlet",
            Side::NeumannLower => "NeumannLower",
            Side::NeumannUpper => "NeumannUpper",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The `(α, β)` triangle with its derived quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleSpec {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub o: Vec2,
    pub a: Vec2,
    pub b: Vec2,
    /// Length of the lower Neumann side `OA`, `csc α`.
    pub phi0: f64,
    /// Length of the upper Neumann side `OB`, `csc β`.
    pub psi0: f64,
    /// Length of the Dirichlet side, `cot α + cot β`.
    pub dirichlet_len: f64,
}

/// Builds the triangle with mixed-vertex angles `alpha` (at `A`) and `beta` (at `B`).
pub fn make_triangle(alpha: f64, beta: f64) -> Result<TriangleSpec> {
    if !(alpha.is_finite() && beta.is_finite()) || alpha <= 0.0 || beta <= 0.0 || alpha + beta >= PI {
        return Err(GeometryError::AngleDomain(format!(
            "need α > 0, β > 0, α + β < π (got α = {alpha}, β = {beta})"
        )));
    }
    let cot_a = alpha.cos() / alpha.sin();
    let cot_b = beta.cos() / beta.sin();
    Ok(TriangleSpec {
        alpha,
        beta,
        gamma: PI - alpha - beta,
        o: Vec2::ZERO,
        a: Vec2::new(1.0, -cot_a),
        b: Vec2::new(1.0, cot_b),
        phi0: 1.0 / alpha.sin(),
        psi0: 1.0 / beta.sin(),
        dirichlet_len: cot_a + cot_b,
    })
}

/// Degree-valued convenience wrapper around [`make_triangle`].
pub fn make_triangle_deg(alpha_deg: f64, beta_deg: f64) -> Result<TriangleSpec> {
    make_triangle(alpha_deg.to_radians(), beta_deg.to_radians())
}

impl TriangleSpec {
    pub fn corners(&self) -> [Vec2; 3] {
        [self.o, self.a, self.b]
    }

    pub fn area(&self) -> f64 {
        0.5 * self.dirichlet_len
    }

    pub fn side_length(&self, side: Side) -> f64 {
        match side {
            Side::Dirichlet => self.dirichlet_len,
            Side::NeumannLower => self.phi0,
            Side::NeumannUpper => self.psi0,
        }
    }

    /// Endpoints of a side: `(O, A)`, `(O, B)` or `(A, B)`.
    pub fn side_endpoints(&self, side: Side) -> (Vec2, Vec2) {
        match side {
            Side::Dirichlet => (self.a, self.b),
            Side::NeumannLower => (self.o, self.a),
            Side::NeumannUpper => (self.o, self.b),
        }
    }

    pub fn diameter(&self) -> f64 {
        self.phi0.max(self.psi0).max(self.dirichlet_len)
    }

    pub fn is_isosceles(&self) -> bool {
        (self.alpha - self.beta).abs() <= ANGLE_EPS
    }

    pub fn min_angle(&self) -> f64 {
        self.alpha.min(self.beta).min(self.gamma)
    }

    /// Point-in-closed-triangle test with an absolute tolerance on the
    /// signed distances to the three sides.
    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        let c = self.corners();
        (0..3).all(|i| {
            let a = c[i];
            let b = c[(i + 1) % 3];
            let edge = b - a;
            edge.cross(p - a) / edge.norm() >= -tol
        })
    }

    /// Corner exponent `π/γ` of the leading singular term at `O`.
    pub fn corner_exponent(&self) -> f64 {
        PI / self.gamma
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexKind {
    Acute,
    Right,
    Obtuse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LongerSide {
    Lower,
    Upper,
    Equal,
}

impl LongerSide {
    pub fn side(self) -> Option<Side> {
        match self {
            LongerSide::Lower => Some(Side::NeumannLower),
            LongerSide::Upper => Some(Side::NeumannUpper),
            LongerSide::Equal => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub neumann_vertex: VertexKind,
    pub isosceles: bool,
    pub longer_neumann_side: LongerSide,
    /// Side with the middle of the three lengths; `None` when a tie makes it ambiguous.
    pub middle_side: Option<Side>,
}

pub fn classify(spec: &TriangleSpec) -> Classification {
    let neumann_vertex = if (spec.gamma - FRAC_PI_2).abs() <= ANGLE_EPS {
        VertexKind::Right
    } else if spec.gamma < FRAC_PI_2 {
        VertexKind::Acute
    } else {
        VertexKind::Obtuse
    };
    let isosceles = spec.is_isosceles();
    let longer_neumann_side = if isosceles {
        LongerSide::Equal
    } else if spec.phi0 > spec.psi0 {
        LongerSide::Lower
    } else {
        LongerSide::Upper
    };

    // Side lengths are proportional to the sines of the opposite angles, so
    // ties are decided on the angles with the same tolerance as `isosceles`.
    let mut sides = [
        (Side::Dirichlet, spec.gamma),
        (Side::NeumannLower, spec.beta),
        (Side::NeumannUpper, spec.alpha),
    ];
    let len = |s: Side| spec.side_length(s);
    sides.sort_by(|x, y| len(x.0).total_cmp(&len(y.0)));
    let tie = |i: usize, j: usize| (len(sides[i].0) - len(sides[j].0)).abs() <= ANGLE_EPS * len(sides[i].0).max(1.0);
    let middle_side = if tie(0, 1) || tie(1, 2) { None } else { Some(sides[1].0) };

    Classification {
        neumann_vertex,
        isosceles,
        longer_neumann_side,
        middle_side,
    }
}

/// The angle condition `max{α, β} ≥ min{π/4, 2α + 2β − π/2}`.
pub fn condition_13(alpha: f64, beta: f64) -> bool {
    alpha.max(beta) >= FRAC_PI_4.min(2.0 * alpha + 2.0 * beta - FRAC_PI_2)
}

/// Unit direction `e_θ = (cos θ, sin θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionVector {
    pub theta: f64,
    pub components: Vec2,
}

impl DirectionVector {
    pub fn new(theta: f64) -> Self {
        DirectionVector {
            theta,
            components: Vec2::polar(theta),
        }
    }
}

/// A line stored as a point on it and a unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub point: Vec2,
    pub normal: Vec2,
}

impl Line {
    pub fn new(point: Vec2, normal: Vec2) -> Self {
        Line {
            point,
            normal: normal.normalized(),
        }
    }

    pub fn through(p: Vec2, q: Vec2) -> Self {
        Line::new(p, (q - p).perp())
    }

    pub fn signed_distance(&self, x: Vec2) -> f64 {
        (x - self.point).dot(self.normal)
    }

    pub fn direction(&self) -> Vec2 {
        -self.normal.perp()
    }

    /// Mirror image of `x` across the line.
    pub fn reflect(&self, x: Vec2) -> Vec2 {
        x - self.normal * (2.0 * self.signed_distance(x))
    }

    /// Reflects a free vector (no translation part).
    pub fn reflect_vector(&self, v: Vec2) -> Vec2 {
        v - self.normal * (2.0 * v.dot(self.normal))
    }

    pub fn reflect_line(&self, other: &Line) -> Line {
        Line {
            point: self.reflect(other.point),
            normal: self.reflect_vector(other.normal),
        }
    }

    /// Intersection point, or `None` for (nearly) parallel lines.
    pub fn intersect(&self, other: &Line) -> Option<Vec2> {
        let det = self.normal.cross(other.normal);
        if det.abs() < 1e-14 {
            return None;
        }
        let c1 = self.normal.dot(self.point);
        let c2 = other.normal.dot(other.point);
        Some(Vec2::new(
            (c1 * other.normal.y - c2 * self.normal.y) / det,
            (self.normal.x * c2 - other.normal.x * c1) / det,
        ))
    }

    /// Whether two lines coincide as point sets, to within `tol`.
    pub fn coincides(&self, other: &Line, tol: f64) -> bool {
        self.normal.cross(other.normal).abs() <= tol && self.signed_distance(other.point).abs() <= tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineFamily {
    /// Lines through `P_λ` on the lower Neumann side.
    Lower,
    /// Lines through `Q_λ` on the upper Neumann side.
    Upper,
}

/// The moving line `T_{λ,ϑ}` (lower family) or `T̂_{λ,ϑ}` (upper family).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MovingLine {
    pub family: LineFamily,
    pub lambda: f64,
    pub vartheta: f64,
    pub base: Vec2,
    pub normal: DirectionVector,
}

impl MovingLine {
    /// Builds the line without range checks; used for derived parameters
    /// that may fall outside `[0, π]`.
    pub fn from_parameters(spec: &TriangleSpec, family: LineFamily, lambda: f64, vartheta: f64) -> Self {
        match family {
            LineFamily::Lower => MovingLine {
                family,
                lambda,
                vartheta,
                base: Vec2::new(lambda * spec.alpha.sin(), -lambda * spec.alpha.cos()),
                normal: DirectionVector::new(vartheta + spec.alpha),
            },
            LineFamily::Upper => MovingLine {
                family,
                lambda,
                vartheta,
                base: Vec2::new(lambda * spec.beta.sin(), lambda * spec.beta.cos()),
                normal: DirectionVector::new(-vartheta - spec.beta),
            },
        }
    }

    pub fn line(&self) -> Line {
        Line {
            point: self.base,
            normal: self.normal.components,
        }
    }

    /// Negative on the cap side (`(x − base)·normal < 0`).
    pub fn signed_distance(&self, x: Vec2) -> f64 {
        (x - self.base).dot(self.normal.components)
    }
}

pub fn moving_line(spec: &TriangleSpec, family: LineFamily, lambda: f64, vartheta: f64) -> Result<MovingLine> {
    if !(0.0..=PI).contains(&vartheta) {
        return Err(GeometryError::AngleDomain(format!("ϑ = {vartheta} not in [0, π]")));
    }
    if !(lambda >= 0.0) {
        return Err(GeometryError::AngleDomain(format!("λ = {lambda} must be ≥ 0")));
    }
    Ok(MovingLine::from_parameters(spec, family, lambda, vartheta))
}

pub fn reflect_point(line: &MovingLine, x: Vec2) -> Vec2 {
    line.line().reflect(x)
}

/// Carrier line of a triangle side.
pub fn side_line(spec: &TriangleSpec, side: Side) -> Line {
    let (p, q) = spec.side_endpoints(side);
    Line::through(p, q)
}

/// Largest `λ` for which the lower-family line `T_{λ,ϑ}` still meets the
/// closed triangle; the cap `Ω_{λ,ϑ}` is nonempty exactly for smaller `λ`.
pub fn lambda_max(spec: &TriangleSpec, vartheta: f64) -> Option<f64> {
    let s = vartheta.sin();
    if s.abs() < 1e-14 {
        return None;
    }
    // x ∈ T_{λ,ϑ}  ⇔  x·e_{ϑ+α} = −λ sin ϑ
    let n = Vec2::polar(vartheta + spec.alpha);
    spec.corners().iter().map(|v| -v.dot(n) / s).reduce(f64::max)
}

/// Parameters of the reflected upper-boundary line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HatCheck {
    pub lambda_hat: f64,
    pub vartheta_hat: f64,
    pub lambda_check: f64,
    pub vartheta_check: f64,
}

impl HatCheck {
    /// `T_{λ̌,ϑ̌}` as a lower-family line.
    pub fn check_line(&self, spec: &TriangleSpec) -> MovingLine {
        MovingLine::from_parameters(spec, LineFamily::Lower, self.lambda_check, self.vartheta_check)
    }

    /// `T̂_{λ̂,ϑ̂}` as an upper-family line.
    pub fn hat_line(&self, spec: &TriangleSpec) -> MovingLine {
        MovingLine::from_parameters(spec, LineFamily::Upper, self.lambda_hat, self.vartheta_hat)
    }
}

pub fn hat_check_map(spec: &TriangleSpec, lambda: f64, vartheta: f64) -> Result<HatCheck> {
    let g = spec.gamma;
    let den_hat = (vartheta - g).sin();
    let den_check = (2.0 * vartheta - g).sin();
    if den_hat.abs() < 1e-14 {
        return Err(GeometryError::Singular("λ̂: sin(ϑ − γ) vanishes".to_string()));
    }
    if den_check.abs() < 1e-14 {
        return Err(GeometryError::Singular("λ̌: sin(2ϑ − γ) vanishes".to_string()));
    }
    Ok(HatCheck {
        lambda_hat: lambda * vartheta.sin() / den_hat,
        vartheta_hat: PI - 2.0 * vartheta + 2.0 * g,
        lambda_check: lambda + lambda * g.sin() / den_check,
        vartheta_check: 2.0 * vartheta - g,
    })
}

/// Moving-plane thresholds. Fields on the `Φ` side are present only when
/// `α < π/2`, those on the `Ψ` side only when `β < π/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub phi1: Option<f64>,
    pub psi1: Option<f64>,
    pub phi2: Option<f64>,
    pub psi2: Option<f64>,
    pub alpha_star: Option<f64>,
    pub beta_star: Option<f64>,
}

fn star_angle(angle: f64) -> f64 {
    if angle >= FRAC_PI_4 {
        FRAC_PI_2
    } else if angle >= FRAC_PI_8 {
        3.0 * FRAC_PI_4
    } else {
        PI - 2.0 * angle
    }
}

pub fn thresholds(spec: &TriangleSpec) -> Thresholds {
    let g = spec.gamma;
    let (phi0, psi0) = (spec.phi0, spec.psi0);
    let alpha_ok = spec.alpha < FRAC_PI_2;
    let beta_ok = spec.beta < FRAC_PI_2;

    let alpha_star = alpha_ok.then(|| star_angle(spec.alpha));
    let beta_star = beta_ok.then(|| star_angle(spec.beta));

    let phi1 = alpha_ok.then(|| (0.5 * phi0).max(psi0 * g.cos()));
    let psi1 = beta_ok.then(|| (0.5 * psi0).max(phi0 * g.cos()));
    let phi2 = alpha_star.map(|s| ((s - g).sin() / s.sin() * psi0).max(phi0 / (1.0 + g.sin())));
    let psi2 = beta_star.map(|s| ((s - g).sin() / s.sin() * phi0).max(psi0 / (1.0 + g.sin())));

    Thresholds {
        phi1,
        psi1,
        phi2,
        psi2,
        alpha_star,
        beta_star,
    }
}

/// The `λ = Υ` making `T_{Υ,ϑ}`, `T_{φ,π/2}` and the Dirichlet line concurrent.
pub fn upsilon(spec: &TriangleSpec, phi: f64, vartheta: f64) -> Result<f64> {
    if (vartheta - FRAC_PI_2).abs() < 1e-14 || (vartheta - PI).abs() < 1e-14 {
        return Err(GeometryError::Singular(format!(
            "ϑ = {vartheta} is an endpoint of (π/2, π)"
        )));
    }
    if !(vartheta > FRAC_PI_2 && vartheta < PI) {
        return Err(GeometryError::ParamDomain(format!("ϑ = {vartheta} not in (π/2, π)")));
    }
    if (spec.alpha - FRAC_PI_2).abs() < 1e-14 {
        return Err(GeometryError::Singular("tan α is infinite".to_string()));
    }
    let cot = 1.0 / (PI - vartheta).tan();
    Ok(phi + (spec.phi0 - phi) * spec.alpha.tan() * cot)
}

/// Width `η = π/(2√c₀)` below which the narrow-domain maximum principle applies.
pub fn narrow_width(c0: f64) -> Result<f64> {
    if !(c0 > 0.0) {
        return Err(GeometryError::NonPositive(c0));
    }
    Ok(PI / (2.0 * c0.sqrt()))
}
