use crate::fem::gradient_field;
use crate::geometry::{classify, Side, TriangleSpec, Vec2};
use crate::mesh::Mesh;

use super::{check_field, near_corner, Result, Verdict, GRADIENT_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Positive,
}

fn grad_scale(grads: &[Vec2]) -> f64 {
    grads.iter().fold(0.0, |m, g| m.max(g.norm()))
}

/// Checks `∇u·e_θ < 0` on barycenters farther than `exclusion_radius` from the corners.
pub fn directional_monotonicity(mesh: &Mesh, u: &[f64], theta: f64, exclusion_radius: f64) -> Result<Verdict> {
    directional_sign(mesh, u, Vec2::polar(theta), exclusion_radius, Sign::Negative)
}

pub fn directional_sign(mesh: &Mesh, u: &[f64], dir: Vec2, exclusion_radius: f64, sign: Sign) -> Result<Verdict> {
    check_field(mesh, u)?;
    let grads = gradient_field(mesh, u);
    let s = match sign {
        Sign::Negative => 1.0,
        Sign::Positive => -1.0,
    };
    let tol = GRADIENT_TOLERANCE * mesh.h() * grad_scale(&grads);
    let values = grads.iter().enumerate().filter_map(|(c, g)| {
        let b = mesh.barycenter(c);
        (!near_corner(mesh, b, exclusion_radius)).then(|| (s * g.dot(dir), b))
    });
    Ok(Verdict::negative(values, tol, exclusion_radius))
}

/// Direction along which `u` must decrease: the inward normal of a Neumann
/// middle side, `e₀` when the Dirichlet side is the middle one or the middle
/// side is ambiguous.
pub fn middle_side_direction(spec: &TriangleSpec) -> Vec2 {
    match classify(spec).middle_side {
        Some(Side::NeumannLower) => Vec2::polar(spec.alpha),
        Some(Side::NeumannUpper) => Vec2::polar(-spec.beta),
        Some(Side::Dirichlet) | None => Vec2::new(1.0, 0.0),
    }
}

/// Monotonicity perpendicular to the middle side, with a `2h` exclusion radius.
pub fn normal_monotonicity_middle_side(mesh: &Mesh, u: &[f64], spec: &TriangleSpec) -> Result<Verdict> {
    directional_sign(mesh, u, middle_side_direction(spec), 2.0 * mesh.h(), Sign::Negative)
}

/// Sign of the derivative along a Neumann side, pointing away from `O`,
/// using the one-sided gradients of the cells that carry a boundary edge on it.
pub fn tangential_neumann(mesh: &Mesh, u: &[f64], side: Side, exclusion_radius: f64) -> Result<Verdict> {
    check_field(mesh, u)?;
    let grads = gradient_field(mesh, u);
    let (o, far) = match side {
        Side::NeumannLower => (mesh.corners[0], mesh.corners[1]),
        Side::NeumannUpper => (mesh.corners[0], mesh.corners[2]),
        Side::Dirichlet => (mesh.corners[1], mesh.corners[2]),
    };
    let t = (far - o).normalized();
    let mask = mesh.side_mask(side);
    let tol = GRADIENT_TOLERANCE * mesh.h() * grad_scale(&grads);
    let values = mesh.cells.iter().enumerate().filter_map(|(c, cell)| {
        let on_side = cell.iter().filter(|&&v| mask[v]).count() >= 2;
        let b = mesh.barycenter(c);
        (on_side && !near_corner(mesh, b, exclusion_radius)).then(|| (grads[c].dot(t), b))
    });
    Ok(Verdict::negative(values, tol, exclusion_radius))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_triangle_deg;
    use crate::mesh::generate;

    #[test]
    fn linear_fields() {
        let s = make_triangle_deg(50.0, 35.0).unwrap();
        let m = generate(&s, 12, 1.0).unwrap();
        let u: Vec<f64> = m.vertices.iter().map(|p| 1.0 - p.x).collect();
        let v = directional_monotonicity(&m, &u, 0.0, 0.0).unwrap();
        assert!(v.pass);
        assert!((v.worst_value + 1.0).abs() < 1e-12);
        assert_eq!(v.samples, m.cells.len());
        // along e_{π/2} the derivative vanishes: fails a strict check only beyond tolerance
        let v = directional_monotonicity(&m, &u, std::f64::consts::FRAC_PI_2, 0.0).unwrap();
        assert!(v.worst_value.abs() < 1e-12 && v.pass);
        let v = directional_sign(&m, &u, Vec2::new(-1.0, 0.0), 0.1, Sign::Positive).unwrap();
        assert!(v.pass && v.samples < m.cells.len());
        let v = directional_monotonicity(&m, &u, std::f64::consts::PI, 0.0).unwrap();
        assert!(!v.pass);
    }

    #[test]
    fn middle_direction() {
        // sides: lower csc 60, upper csc 30 = 2, Dirichlet 2.309
        let s = crate::geometry::make_triangle(std::f64::consts::FRAC_PI_3, std::f64::consts::FRAC_PI_6).unwrap();
        let d = middle_side_direction(&s);
        assert!(d.dist(Vec2::polar(-std::f64::consts::FRAC_PI_6)) < 1e-15);
        let b = 1.0 / 33f64.to_radians().tan();
        let s = make_triangle_deg(48.0, 33.0).unwrap();
        let d = middle_side_direction(&s);
        let e = Vec2::new(b, -1.0) * (1.0 / (1.0 + b * b).sqrt());
        assert!(d.dist(e) < 1e-15);
        let s = make_triangle_deg(30.0, 30.0).unwrap();
        assert_eq!(middle_side_direction(&s), Vec2::new(1.0, 0.0));
    }

    #[test]
    fn tangential_on_linear() {
        let s = make_triangle_deg(45.0, 45.0).unwrap();
        let m = generate(&s, 8, 1.0).unwrap();
        let u: Vec<f64> = m.vertices.iter().map(|p| 1.0 - p.x).collect();
        for side in [Side::NeumannLower, Side::NeumannUpper] {
            let v = tangential_neumann(&m, &u, side, 0.0).unwrap();
            assert_eq!(v.samples, 8);
            assert!((v.worst_value + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        }
    }
}
