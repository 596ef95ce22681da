use crate::fem::gradient_field;
use crate::mesh::Mesh;

use super::{check_field, near_corner, sup_norm, QualifyError, Result, Verdict, GRADIENT_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryReport {
    /// `max |u(x₁, x₂) − u(x₁, −x₂)|` over vertices.
    pub max_abs: f64,
    /// `max_abs / ‖u‖∞`.
    pub relative: f64,
    /// `x₂ ∂x₂u < 0` on barycenters off the axis, `2h` away from the corners.
    pub transverse: Verdict,
}

pub fn symmetry_error(mesh: &Mesh, u: &[f64]) -> Result<SymmetryReport> {
    check_field(mesh, u)?;
    let perm = mesh.mirror_permutation().ok_or(QualifyError::AsymmetricMesh)?;
    let max_abs = perm
        .iter()
        .enumerate()
        .map(|(i, &j)| (u[i] - u[j]).abs())
        .fold(0.0, f64::max);
    let scale = sup_norm(u);
    let relative = if scale > 0.0 { max_abs / scale } else { max_abs };

    let grads = gradient_field(mesh, u);
    let gmax = grads.iter().fold(0.0, |m: f64, g| m.max(g.norm()));
    let h = mesh.h();
    let r = 2.0 * h;
    let values = grads.iter().enumerate().filter_map(|(c, g)| {
        let b = mesh.barycenter(c);
        if near_corner(mesh, b, r) || b.y.abs() < 1e-12 {
            return None;
        }
        Some((b.y.signum() * g.y, b))
    });
    let transverse = Verdict::negative(values, GRADIENT_TOLERANCE * h * gmax, r);
    Ok(SymmetryReport {
        max_abs,
        relative,
        transverse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_triangle_deg;
    use crate::mesh::generate;

    #[test]
    fn even_and_odd_fields() {
        let s = make_triangle_deg(30.0, 30.0).unwrap();
        let m = generate(&s, 10, 1.3).unwrap();
        let even: Vec<f64> = m.vertices.iter().map(|p| 2.0 - p.x - p.y * p.y).collect();
        let r = symmetry_error(&m, &even).unwrap();
        assert_eq!(r.max_abs, 0.0);
        assert!(r.transverse.pass);
        let odd: Vec<f64> = m.vertices.iter().map(|p| 2.0 + 0.1 * p.y).collect();
        let r = symmetry_error(&m, &odd).unwrap();
        assert!(r.max_abs > 0.0 && !r.transverse.pass);
    }

    #[test]
    fn refuses_asymmetric_mesh() {
        let s = make_triangle_deg(48.0, 33.0).unwrap();
        let m = generate(&s, 6, 1.0).unwrap();
        let u = vec![0.0; m.num_vertices()];
        assert_eq!(symmetry_error(&m, &u), Err(QualifyError::AsymmetricMesh));
    }
}
