use crate::fem::{FieldSampler, Nonlinearity};
use crate::geometry::{moving_domain, narrow_width, BoundaryTag, MovingDomain, TriangleSpec, Vec2};
use crate::mesh::Mesh;

use super::{check_field, sup_norm, QualifyError, Result, Verdict, GRADIENT_TOLERANCE};

/// Denominators below this switch the difference quotient to `f'(u)`.
const QUOTIENT_FLOOR: f64 = 1e-12;

/// Interior sample points of a convex polygon: centroids of a barycentric
/// lattice with `k` subdivisions on every fan triangle.
pub fn sample_polygon(poly: &[Vec2], k: usize) -> Vec<Vec2> {
    let mut out = Vec::new();
    if poly.len() < 3 || k == 0 {
        return out;
    }
    let p0 = poly[0];
    for w in poly[1..].windows(2) {
        let (e1, e2) = (w[0] - p0, w[1] - p0);
        for i in 0..k {
            for j in 0..k - i {
                let a = (i as f64 + 1.0 / 3.0) / k as f64;
                let b = (j as f64 + 1.0 / 3.0) / k as f64;
                out.push(p0 + e1 * a + e2 * b);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionReport {
    /// Smallest `u(x^λ) − u(x)` over the interior samples.
    pub min_w: f64,
    pub location: Vec2,
    /// `C·h·‖u‖∞`.
    pub tolerance: f64,
    pub pass: bool,
    pub samples: usize,
    /// Largest `|w|` on the moving line itself, where it vanishes identically.
    pub line_max_abs: f64,
}

impl ReflectionReport {
    /// The same outcome as a "negative" verdict on `−w`.
    pub fn verdict(&self) -> Verdict {
        Verdict {
            pass: self.pass,
            worst_value: -self.min_w,
            worst_location: self.location,
            tolerance: self.tolerance,
            excluded_radius: 0.0,
            samples: self.samples,
        }
    }
}

fn domain(spec: &TriangleSpec, lambda: f64, vartheta: f64, vartheta1: f64) -> Result<MovingDomain> {
    let d = moving_domain(spec, lambda, vartheta, vartheta1)?;
    if d.is_empty() {
        return Err(QualifyError::EmptyDomain);
    }
    Ok(d)
}

/// `w = u(x^{λ,ϑ}) − u(x)` on `D_{λ,ϑ,ϑ₁}`; passes when `min w ≥ −C·h·‖u‖∞`.
pub fn reflection_positivity(
    mesh: &Mesh,
    u: &[f64],
    spec: &TriangleSpec,
    lambda: f64,
    vartheta: f64,
    vartheta1: f64,
    samples: usize,
) -> Result<ReflectionReport> {
    check_field(mesh, u)?;
    let d = domain(spec, lambda, vartheta, vartheta1)?;
    let sampler = FieldSampler::new(mesh);
    reflection_with(&sampler, u, &d, samples)
}

pub(crate) fn reflection_with(
    sampler: &FieldSampler<'_>,
    u: &[f64],
    d: &MovingDomain,
    samples: usize,
) -> Result<ReflectionReport> {
    let mesh = sampler.mesh();
    let l = d.line.line();
    let eval = |x: Vec2| -> Result<f64> {
        let ux = sampler
            .interpolate(u, x)
            .map_err(|_| QualifyError::NotApplicable(format!("sample {x} outside mesh")))?;
        let uy = sampler
            .interpolate(u, l.reflect(x))
            .map_err(|_| QualifyError::NotApplicable(format!("reflection of {x} outside mesh")))?;
        Ok(uy - ux)
    };
    let mut min_w = f64::INFINITY;
    let mut location = Vec2::ZERO;
    let pts = sample_polygon(&d.polygon, samples);
    for &x in &pts {
        let w = eval(x)?;
        if w < min_w {
            min_w = w;
            location = x;
        }
    }
    let mut line_max_abs: f64 = 0.0;
    for s in d.segments.iter().filter(|s| s.tag == BoundaryTag::Gamma0) {
        for i in 0..=samples {
            let x = s.a.lerp(s.b, i as f64 / samples.max(1) as f64);
            line_max_abs = line_max_abs.max(eval(x)?.abs());
        }
    }
    let tolerance = GRADIENT_TOLERANCE * mesh.h() * sup_norm(u);
    Ok(ReflectionReport {
        min_w,
        location,
        tolerance,
        pass: min_w >= -tolerance,
        samples: pts.len(),
        line_max_abs,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuotientReport {
    pub points: Vec<Vec2>,
    pub values: Vec<f64>,
    /// `sup |c|` over the samples.
    pub bound: f64,
    /// Narrow-domain width for `bound`; `None` when the bound is zero.
    pub narrow_width: Option<f64>,
}

/// `c = (f(u^λ) − f(u)) / (u^λ − u)` on `D_{λ,ϑ,ϑ₁}`, with `f'(u)` where the
/// denominator is below `1e-12`.
#[allow(clippy::too_many_arguments)]
pub fn difference_quotient_coeff(
    mesh: &Mesh,
    u: &[f64],
    spec: &TriangleSpec,
    nl: &Nonlinearity,
    lambda: f64,
    vartheta: f64,
    vartheta1: f64,
    samples: usize,
) -> Result<QuotientReport> {
    check_field(mesh, u)?;
    let d = domain(spec, lambda, vartheta, vartheta1)?;
    let sampler = FieldSampler::new(mesh);
    let l = d.line.line();
    let points = sample_polygon(&d.polygon, samples);
    let mut values = Vec::with_capacity(points.len());
    for &x in &points {
        let a = sampler
            .interpolate(u, x)
            .map_err(|_| QualifyError::NotApplicable(format!("sample {x} outside mesh")))?;
        let b = sampler
            .interpolate(u, l.reflect(x))
            .map_err(|_| QualifyError::NotApplicable(format!("reflection of {x} outside mesh")))?;
        let c = if let Nonlinearity::Linear(mu) = nl {
            *mu
        } else if (b - a).abs() < QUOTIENT_FLOOR {
            nl.fprime(a)
        } else {
            (nl.f(b) - nl.f(a)) / (b - a)
        };
        values.push(c);
    }
    let bound = values.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    Ok(QuotientReport {
        points,
        values,
        bound,
        narrow_width: narrow_width(bound).ok(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_triangle_deg, polygon_area, signed_area};
    use crate::mesh::generate;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn samples_are_interior() {
        let poly = [
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(2.0, 1.0),
            Vec2::new(0.0, 1.0),
        ];
        let pts = sample_polygon(&poly, 5);
        assert_eq!(pts.len(), 2 * 15);
        assert!(pts.iter().all(|p| p.x > 0.0 && p.x < 2.0 && p.y > 0.0 && p.y < 1.0));
        assert!(polygon_area(&poly) > 0.0 && signed_area(poly[0], poly[1], poly[2]) > 0.0);
    }

    fn setup() -> (TriangleSpec, Mesh, Vec<f64>) {
        let s = make_triangle_deg(60.0, 40.0).unwrap();
        let m = generate(&s, 16, 1.0).unwrap();
        // decreasing in x₁: reflections towards O increase it
        let u: Vec<f64> = m.vertices.iter().map(|p| 1.0 - p.x * p.x).collect();
        (s, m, u)
    }

    #[test]
    fn monotone_field_is_reflection_positive() {
        let (s, m, u) = setup();
        let r = reflection_positivity(&m, &u, &s, 0.8 * s.phi0, FRAC_PI_2, 0.0, 8).unwrap();
        assert!(r.pass && r.min_w > -1e-12, "{r:?}");
        assert!(r.line_max_abs < 1e-12);
        assert!(r.verdict().pass);
        let beyond = 2.0 * s.phi0 + 10.0;
        assert_eq!(
            reflection_positivity(&m, &u, &s, beyond, FRAC_PI_2, 0.0, 8),
            Err(QualifyError::EmptyDomain)
        );
    }

    #[test]
    fn quotients() {
        let (s, m, u) = setup();
        let lam = 0.7 * s.phi0;
        let lin = difference_quotient_coeff(&m, &u, &s, &Nonlinearity::Linear(4.5), lam, FRAC_PI_2, 0.0, 6).unwrap();
        assert!(lin.values.iter().all(|&c| c == 4.5));
        assert_eq!(lin.bound, 4.5);
        let zero = difference_quotient_coeff(&m, &u, &s, &Nonlinearity::zero(), lam, FRAC_PI_2, 0.0, 6).unwrap();
        assert!(zero.values.iter().all(|&c| c == 0.0) && zero.narrow_width.is_none());

        let cube = difference_quotient_coeff(&m, &u, &s, &Nonlinearity::Power(3.0), lam, FRAC_PI_2, 0.0, 6).unwrap();
        let sampler = FieldSampler::new(&m);
        let d = moving_domain(&s, lam, FRAC_PI_2, 0.0).unwrap();
        let l = d.line.line();
        let mut sup: f64 = 0.0;
        for (x, c) in cube.points.iter().zip(&cube.values) {
            let a = sampler.interpolate(&u, *x).unwrap();
            let b = sampler.interpolate(&u, l.reflect(*x)).unwrap();
            let e = a * a + a * b + b * b;
            assert!((c - e).abs() < 1e-9 * e.max(1.0));
            sup = sup.max(e);
        }
        assert!((cube.bound - sup).abs() < 1e-9);
    }
}
