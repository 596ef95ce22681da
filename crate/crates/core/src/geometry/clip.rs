//! Half-plane clipping and the moving domains built from it.

use std::f64::consts::FRAC_PI_2;

use super::point::{point_segment_distance, polygon_area, Vec2};
use super::{GeometryError, Line, LineFamily, MovingLine, Result, Side, TriangleSpec};

/// Consecutive vertices closer than this are merged.
pub const MERGE_TOL: f64 = 1e-12;
/// Polygons with smaller area are reported empty.
pub const EMPTY_AREA: f64 = 1e-14;
/// Midpoint membership tolerance for boundary tags.
pub const TAG_TOL: f64 = 1e-10;

/// Keeps the part of a convex polygon with `(x − p)·n ≤ 0`.
pub fn clip_half_plane(poly: &[Vec2], p: Vec2, n: Vec2) -> Vec<Vec2> {
    let m = poly.len();
    if m == 0 {
        return Vec::new();
    }
    let sd: Vec<f64> = poly.iter().map(|&x| (x - p).dot(n)).collect();
    let mut out = Vec::with_capacity(m + 1);
    for i in 0..m {
        let j = (i + 1) % m;
        let (a, b) = (poly[i], poly[j]);
        let (da, db) = (sd[i], sd[j]);
        if da <= 0.0 {
            out.push(a);
        }
        if (da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0) {
            let t = da / (da - db);
            out.push(a.lerp(b, t));
        }
    }
    merge_close(out)
}

fn merge_close(poly: Vec<Vec2>) -> Vec<Vec2> {
    let mut out: Vec<Vec2> = Vec::with_capacity(poly.len());
    for p in poly {
        if out.last().is_none_or(|q| q.dist(p) > MERGE_TOL) {
            out.push(p);
        }
    }
    while out.len() > 1 && out[0].dist(out[out.len() - 1]) <= MERGE_TOL {
        out.pop();
    }
    out
}

/// Counterclockwise convex hull (monotone chain), collinear points dropped.
pub fn convex_hull(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Vec2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Vec2>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                if (b - a).cross(p - a) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Part of the boundary of a moving domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    /// On the moving line itself.
    Gamma0,
    /// On the Dirichlet side or its reflection.
    Gamma1,
    /// On the lower Neumann side, its reflection, or the second moving line.
    Gamma2A,
    /// On the upper Neumann side or its reflection.
    Gamma2B,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaggedSegment {
    pub a: Vec2,
    pub b: Vec2,
    pub tag: BoundaryTag,
}

impl TaggedSegment {
    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MovingDomain {
    /// Counterclockwise vertex ring; empty when the domain has no area.
    pub polygon: Vec<Vec2>,
    pub segments: Vec<TaggedSegment>,
    pub lambda: f64,
    pub vartheta: f64,
    pub vartheta1: f64,
    /// Set when `ϑ = π/2 − α`, the borderline case of the Dirichlet part.
    pub gamma1_equality: bool,
    pub line: MovingLine,
}

impl MovingDomain {
    pub fn is_empty(&self) -> bool {
        self.polygon.is_empty()
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.polygon)
    }

    pub fn tag_length(&self, tag: BoundaryTag) -> f64 {
        self.segments
            .iter()
            .filter(|s| s.tag == tag)
            .map(TaggedSegment::length)
            .sum()
    }

    pub fn reflected_polygon(&self) -> Vec<Vec2> {
        let l = self.line.line();
        self.polygon.iter().rev().map(|&p| l.reflect(p)).collect()
    }

    /// Whether the polygon together with its mirror image is convex.
    pub fn union_with_reflection_is_convex(&self, tol: f64) -> bool {
        if self.is_empty() {
            return true;
        }
        let mut pts = self.polygon.clone();
        pts.extend(self.reflected_polygon());
        let hull = polygon_area(&convex_hull(&pts));
        let sum = 2.0 * self.area();
        (hull - sum).abs() <= tol * hull.max(1.0)
    }
}

fn triangle_half_planes(corners: &[Vec2; 3]) -> [(Vec2, Vec2); 3] {
    // outward normals of a counterclockwise triangle
    std::array::from_fn(|i| {
        let a = corners[i];
        let b = corners[(i + 1) % 3];
        (a, -(b - a).perp())
    })
}

fn clip_to_triangle(mut poly: Vec<Vec2>, corners: &[Vec2; 3]) -> Vec<Vec2> {
    for (p, n) in triangle_half_planes(corners) {
        poly = clip_half_plane(&poly, p, n);
    }
    poly
}

fn finish(poly: Vec<Vec2>) -> Vec<Vec2> {
    if poly.len() < 3 || polygon_area(&poly) < EMPTY_AREA {
        Vec::new()
    } else {
        poly
    }
}

/// The cap `Ω_{λ,ϑ}`: the part of the triangle on the negative side of `T_{λ,ϑ}`.
pub fn cap_domain(spec: &TriangleSpec, lambda: f64, vartheta: f64) -> Result<Vec<Vec2>> {
    let line = super::moving_line(spec, LineFamily::Lower, lambda, vartheta)?;
    let poly = clip_half_plane(&spec.corners(), line.base, line.normal.components);
    Ok(finish(poly))
}

fn reflected_triangle(spec: &TriangleSpec, l: &Line) -> [Vec2; 3] {
    // reflection reverses orientation, so swap two corners to stay counterclockwise
    let c = spec.corners();
    [l.reflect(c[0]), l.reflect(c[2]), l.reflect(c[1])]
}

fn check_params(lambda: f64, vartheta: f64, vartheta1: f64) -> Result<()> {
    if !(lambda >= 0.0) {
        return Err(GeometryError::ParamDomain(format!("λ = {lambda} must be ≥ 0")));
    }
    if !(0.0 <= vartheta1 && vartheta1 < vartheta && vartheta <= std::f64::consts::PI) {
        return Err(GeometryError::ParamDomain(format!(
            "need 0 ≤ ϑ₁ < ϑ ≤ π (got ϑ₁ = {vartheta1}, ϑ = {vartheta})"
        )));
    }
    Ok(())
}

fn build(spec: &TriangleSpec, lambda: f64, vartheta: f64, vartheta1: Option<f64>) -> MovingDomain {
    let line = MovingLine::from_parameters(spec, LineFamily::Lower, lambda, vartheta);
    let l = line.line();
    let mut poly = clip_half_plane(&spec.corners(), line.base, line.normal.components);
    poly = clip_to_triangle(poly, &reflected_triangle(spec, &l));
    let second = vartheta1.map(|v1| MovingLine::from_parameters(spec, LineFamily::Lower, lambda, v1).line());
    if let Some(s) = second {
        poly = clip_half_plane(&poly, s.point, -s.normal);
    }
    let polygon = finish(poly);
    let segments = tag_segments(spec, &l, second.as_ref(), &polygon);
    MovingDomain {
        polygon,
        segments,
        lambda,
        vartheta,
        vartheta1: vartheta1.unwrap_or(0.0f64.max(2.0 * vartheta - std::f64::consts::PI)),
        gamma1_equality: (vartheta - (FRAC_PI_2 - spec.alpha)).abs() <= 1e-12,
        line,
    }
}

fn tag_segments(spec: &TriangleSpec, l: &Line, second: Option<&Line>, polygon: &[Vec2]) -> Vec<TaggedSegment> {
    let seg = |side: Side| spec.side_endpoints(side);
    let refl = |side: Side| {
        let (p, q) = spec.side_endpoints(side);
        (l.reflect(p), l.reflect(q))
    };
    let on_seg = |m: Vec2, (p, q): (Vec2, Vec2)| point_segment_distance(m, p, q);

    let m = polygon.len();
    (0..m)
        .map(|i| {
            let a = polygon[i];
            let b = polygon[(i + 1) % m];
            let mid = a.midpoint(b);
            let d0 = l.signed_distance(mid).abs();
            let d1 = on_seg(mid, seg(Side::Dirichlet)).min(on_seg(mid, refl(Side::Dirichlet)));
            let mut d2a = on_seg(mid, seg(Side::NeumannLower)).min(on_seg(mid, refl(Side::NeumannLower)));
            if let Some(s) = second {
                d2a = d2a.min(s.signed_distance(mid).abs());
            }
            let d2b = on_seg(mid, seg(Side::NeumannUpper)).min(on_seg(mid, refl(Side::NeumannUpper)));
            let ranked = [
                (d0, BoundaryTag::Gamma0),
                (d1, BoundaryTag::Gamma1),
                (d2a, BoundaryTag::Gamma2A),
                (d2b, BoundaryTag::Gamma2B),
            ];
            let tag = ranked
                .iter()
                .find(|(d, _)| *d <= TAG_TOL)
                .or_else(|| ranked.iter().min_by(|x, y| x.0.total_cmp(&y.0)))
                .map(|&(_, t)| t)
                .unwrap_or(BoundaryTag::Gamma0);
            TaggedSegment { a, b, tag }
        })
        .collect()
}

/// `D_{λ,ϑ,ϑ₁}`: points of the triangle whose mirror image across `T_{λ,ϑ}` stays in
/// the triangle, lying strictly between `T_{λ,ϑ}` and `T_{λ,ϑ₁}`.
pub fn moving_domain(spec: &TriangleSpec, lambda: f64, vartheta: f64, vartheta1: f64) -> Result<MovingDomain> {
    check_params(lambda, vartheta, vartheta1)?;
    Ok(build(spec, lambda, vartheta, Some(vartheta1)))
}

/// `D_{λ,ϑ}`: the same construction without the second line.
pub fn moving_domain_full(spec: &TriangleSpec, lambda: f64, vartheta: f64) -> Result<MovingDomain> {
    check_params(lambda, vartheta, 0.0f64.min(vartheta * 0.5))?;
    if vartheta <= 0.0 {
        return Err(GeometryError::ParamDomain(format!("ϑ = {vartheta} must be > 0")));
    }
    Ok(build(spec, lambda, vartheta, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{lambda_max, make_triangle, make_triangle_deg, polygon_perimeter};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn poly_contains(poly: &[Vec2], p: Vec2, tol: f64) -> bool {
        let m = poly.len();
        (0..m).all(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % m];
            (b - a).cross(p - a) / (b - a).norm() >= -tol
        })
    }

    #[test]
    fn clip_square() {
        let sq = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ];
        let half = clip_half_plane(&sq, Vec2::new(0.5, 0.0), Vec2::new(1.0, 0.0));
        assert_eq!(half.len(), 4);
        assert!((polygon_area(&half) - 0.5).abs() < 1e-15);
        let none = clip_half_plane(&sq, Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0));
        assert!(none.is_empty());
        let all = clip_half_plane(&sq, Vec2::new(2.0, 0.0), Vec2::new(1.0, 0.0));
        assert_eq!(all, sq.to_vec());
    }

    #[test]
    fn hull_of_square_with_interior_point() {
        let pts = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.3, 0.4),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(0.5, 0.0),
        ];
        let h = convex_hull(&pts);
        assert_eq!(h.len(), 4);
        assert!((polygon_area(&h) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn right_isosceles_corner_cap() {
        // λ = 0.6·√2, ϑ = π/2 cuts {x₁ − x₂ > 1.2}; the reflection x ↦ (x₂ + 1.2, x₁ − 1.2)
        // maps that cap into the triangle, so the domain is the whole cap.
        let s = make_triangle(FRAC_PI_4, FRAC_PI_4).unwrap();
        let d = moving_domain(&s, 0.6 * s.phi0, FRAC_PI_2, 0.0).unwrap();
        assert_eq!(d.polygon.len(), 3);
        assert!((d.area() - 0.16).abs() < 1e-14);
        for v in [Vec2::new(1.0, -1.0), Vec2::new(1.0, -0.2), Vec2::new(0.6, -0.6)] {
            assert!(d.polygon.iter().any(|p| p.dist(v) < 1e-14), "missing {v}");
        }
        assert!((d.tag_length(BoundaryTag::Gamma1) - 0.8).abs() < 1e-14);
        assert!((d.tag_length(BoundaryTag::Gamma0) - 0.4 * 2f64.sqrt()).abs() < 1e-14);
        assert!((d.tag_length(BoundaryTag::Gamma2A) - 0.4 * 2f64.sqrt()).abs() < 1e-14);

        // a smaller λ makes the reflected upper side bite: four vertices
        let d = moving_domain(&s, 0.3, 1.2, 0.0).unwrap();
        let cap = cap_domain(&s, 0.3, 1.2).unwrap();
        assert!(d.area() < polygon_area(&cap));
        assert!(d.polygon.len() >= 4);
    }

    #[test]
    fn beyond_lambda_max_is_empty() {
        let s = make_triangle_deg(60.0, 40.0).unwrap();
        for vt in [0.4, 1.0, FRAC_PI_2, 2.5] {
            let lm = lambda_max(&s, vt).unwrap();
            let d = moving_domain(&s, lm + 1e-9, vt, 0.0f64.max(2.0 * vt - PI)).unwrap();
            assert!(d.is_empty(), "ϑ = {vt}");
            assert!(d.segments.is_empty());
        }
    }

    #[test]
    fn canonical_second_angle_changes_nothing() {
        let s = make_triangle_deg(60.0, 40.0).unwrap();
        for vt in [0.3, 0.9, FRAC_PI_2, 2.0, 2.8] {
            let lm = lambda_max(&s, vt).unwrap();
            for k in 1..8 {
                let lam = lm * k as f64 / 8.0;
                let full = moving_domain_full(&s, lam, vt).unwrap();
                let part = moving_domain(&s, lam, vt, 0.0f64.max(2.0 * vt - PI)).unwrap();
                assert!((full.area() - part.area()).abs() <= 1e-13, "ϑ={vt} λ={lam}");
            }
        }
    }

    #[test]
    fn equality_flag() {
        let s = make_triangle_deg(60.0, 40.0).unwrap();
        let d = moving_domain(&s, 0.5, FRAC_PI_2 - s.alpha, 0.0).unwrap();
        assert!(d.gamma1_equality);
        let d = moving_domain(&s, 0.5, FRAC_PI_2, 0.0).unwrap();
        assert!(!d.gamma1_equality);
    }

    #[test]
    fn rejects_bad_parameters() {
        let s = make_triangle_deg(60.0, 40.0).unwrap();
        assert!(matches!(
            moving_domain(&s, -0.1, 1.0, 0.0),
            Err(GeometryError::ParamDomain(_))
        ));
        assert!(matches!(
            moving_domain(&s, 0.1, 1.0, 1.0),
            Err(GeometryError::ParamDomain(_))
        ));
        assert!(matches!(
            moving_domain(&s, 0.1, 3.5, 0.0),
            Err(GeometryError::ParamDomain(_))
        ));
    }

    proptest! {
        #[test]
        fn domain_invariants(a in 0.15..1.45f64, b in 0.15..1.45f64,
                             vt in 0.05..PI, lfrac in 0.0..1.0f64, v1frac in 0.0..1.0f64) {
            prop_assume!(a + b < PI - 0.15);
            let s = make_triangle(a, b).unwrap();
            let lm = lambda_max(&s, vt).unwrap().max(0.0);
            let lam = lm * lfrac;
            let v1_lo = 0.0f64.max(2.0 * vt - PI);
            let v1 = v1_lo + (vt - v1_lo) * 0.999 * v1frac;
            let d = moving_domain(&s, lam, vt, v1).unwrap();
            if d.is_empty() {
                return Ok(());
            }
            prop_assert!(d.area() > EMPTY_AREA);
            // convex, counterclockwise
            let m = d.polygon.len();
            for i in 0..m {
                let p = d.polygon[i];
                let q = d.polygon[(i + 1) % m];
                let r = d.polygon[(i + 2) % m];
                prop_assert!((q - p).cross(r - q) >= -1e-12);
            }
            // nesting D ⊆ Ω_{λ,ϑ} ⊆ Ω
            let cap = cap_domain(&s, lam, vt).unwrap();
            for &p in &d.polygon {
                prop_assert!(poly_contains(&cap, p, 1e-10));
                prop_assert!(s.contains(p, 1e-10));
            }
            // tags partition the boundary
            let total: f64 = d.segments.iter().map(TaggedSegment::length).sum();
            let per = polygon_perimeter(&d.polygon);
            prop_assert!((total - per).abs() <= 1e-10 * per);
            prop_assert!(d.tag_length(BoundaryTag::Gamma0) > 0.0);
            prop_assert!(d.union_with_reflection_is_convex(1e-9));
            // larger second angle gives a smaller domain
            let v1b = v1 + 0.5 * (vt - v1);
            let d2 = moving_domain(&s, lam, vt, v1b).unwrap();
            prop_assert!(d2.area() <= d.area() + 1e-13);
            for &p in &d2.polygon {
                prop_assert!(poly_contains(&d.polygon, p, 1e-10));
            }
            // the Dirichlet part stays on the Dirichlet side past the borderline angle
            if lam > 0.0 && vt >= FRAC_PI_2 - a {
                for seg in d.segments.iter().filter(|g| g.tag == BoundaryTag::Gamma1) {
                    prop_assert!(point_segment_distance(seg.a.midpoint(seg.b), s.a, s.b) <= 1e-10);
                }
            }
        }
    }
}
