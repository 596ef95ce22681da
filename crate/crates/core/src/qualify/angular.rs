use crate::fem::{gradient_field, recovered_gradient, FieldSampler};
use crate::geometry::Vec2;
use crate::mesh::Mesh;

use super::{check_field, Result};

/// Per-cell `(x₁ − x̄₁)∂₂u − (x₂ − x̄₂)∂₁u` at the barycenters.
pub fn angular_derivative(mesh: &Mesh, u: &[f64], xbar: Vec2) -> Result<Vec<f64>> {
    check_field(mesh, u)?;
    Ok(gradient_field(mesh, u)
        .iter()
        .enumerate()
        .map(|(c, g)| angular_value(mesh.barycenter(c), xbar, *g))
        .collect())
}

/// Angular derivative at `x` for the gradient `g`.
pub fn angular_value(x: Vec2, xbar: Vec2, g: Vec2) -> f64 {
    let d = x - xbar;
    d.x * g.y - d.y * g.x
}

/// Angular derivative traced along a circular arc.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcTrace {
    pub angles: Vec<f64>,
    pub values: Vec<f64>,
    /// Sign changes among values above 1% of the largest magnitude.
    pub sign_changes: usize,
    /// Local index `l`: the number of nodal arcs, `sign_changes + 1`.
    pub index: usize,
}

/// Samples the arc `x̄ + r e_θ`, `θ ∈ (θ₀, θ₁)`, at cell midpoints of a
/// uniform split, using the recovered nodal gradient; points outside the
/// mesh are skipped.
pub fn arc_trace(
    mesh: &Mesh,
    u: &[f64],
    xbar: Vec2,
    radius: f64,
    theta0: f64,
    theta1: f64,
    samples: usize,
) -> Result<ArcTrace> {
    check_field(mesh, u)?;
    let grads = recovered_gradient(mesh, u);
    let sampler = FieldSampler::new(mesh);
    let mut angles = Vec::new();
    let mut values = Vec::new();
    for i in 0..samples {
        let th = theta0 + (i as f64 + 0.5) / samples as f64 * (theta1 - theta0);
        let d = Vec2::polar(th) * radius;
        if let Ok(g) = sampler.interpolate_vec(&grads, xbar + d) {
            angles.push(th);
            values.push(angular_value(xbar + d, xbar, g));
        }
    }
    let big = values.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    let mut last = 0.0;
    let mut sign_changes = 0;
    for &v in &values {
        if v.abs() <= 0.01 * big {
            continue;
        }
        if last != 0.0 && v.signum() != last {
            sign_changes += 1;
        }
        last = v.signum();
    }
    Ok(ArcTrace {
        angles,
        values,
        sign_changes,
        index: sign_changes + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_triangle_deg;
    use crate::mesh::generate;

    fn mesh() -> Mesh {
        generate(&make_triangle_deg(48.0, 33.0).unwrap(), 12, 1.0).unwrap()
    }

    #[test]
    fn hand_values() {
        let m = mesh();
        let u: Vec<f64> = m.vertices.iter().map(|p| p.x).collect();
        let r = angular_derivative(&m, &u, Vec2::ZERO).unwrap();
        for (c, v) in r.iter().enumerate() {
            assert!((v + m.barycenter(c).y).abs() < 1e-12);
        }
    }

    #[test]
    fn radial_field_has_no_angular_part() {
        // exact gradient of u(r) = exp(−r²) about x̄ at the barycenters
        let m = mesh();
        let xbar = Vec2::new(0.5, 0.1);
        for c in 0..m.cells.len() {
            let d = m.barycenter(c) - xbar;
            let g = d * (-2.0 * (-d.dot(d)).exp());
            assert!(angular_value(m.barycenter(c), xbar, g).abs() < 1e-12);
        }
        let u = vec![3.0; m.num_vertices()];
        assert!(angular_derivative(&m, &u, xbar)
            .unwrap()
            .iter()
            .all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn linear_in_the_field() {
        let m = mesh();
        let u: Vec<f64> = m.vertices.iter().map(|p| (3.0 * p.x).sin() + p.y * p.y).collect();
        let v: Vec<f64> = m.vertices.iter().map(|p| p.x * p.y - 0.2).collect();
        let w: Vec<f64> = u.iter().zip(&v).map(|(a, b)| 2.0 * a - 0.5 * b).collect();
        let xbar = Vec2::new(0.1, -0.3);
        let (ru, rv, rw) = (
            angular_derivative(&m, &u, xbar).unwrap(),
            angular_derivative(&m, &v, xbar).unwrap(),
            angular_derivative(&m, &w, xbar).unwrap(),
        );
        for i in 0..ru.len() {
            assert!((rw[i] - (2.0 * ru[i] - 0.5 * rv[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn arc_counts_sign_changes() {
        let s = make_triangle_deg(48.0, 33.0).unwrap();
        let m = generate(&s, 24, 1.0).unwrap();
        // r² cos(πφ/γ) about O keeps one sign on the arc
        let lo = s.alpha - std::f64::consts::FRAC_PI_2;
        let span = s.gamma;
        let u: Vec<f64> = m
            .vertices
            .iter()
            .map(|p| {
                let phi = p.y.atan2(p.x) - lo;
                p.norm().powi(2) * (std::f64::consts::PI * phi / span).cos()
            })
            .collect();
        let t = arc_trace(&m, &u, Vec2::ZERO, 0.4, lo, lo + span, 64).unwrap();
        assert_eq!(t.values.len(), 64);
        assert_eq!(t.sign_changes, 0);
        assert_eq!(t.index, 1);
        let u: Vec<f64> = m
            .vertices
            .iter()
            .map(|p| {
                let phi = p.y.atan2(p.x) - lo;
                p.norm().powi(2) * (2.0 * std::f64::consts::PI * phi / span).cos()
            })
            .collect();
        let t = arc_trace(&m, &u, Vec2::ZERO, 0.4, lo, lo + span, 64).unwrap();
        assert_eq!(t.sign_changes, 1);
    }
}
