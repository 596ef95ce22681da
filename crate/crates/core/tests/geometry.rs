use std::f64::consts::{FRAC_PI_2, PI};

use mixtri_core::geometry::{
    condition_13, make_triangle, moving_domain, side_line, thresholds, upsilon, Line, LineFamily, MovingLine, Side,
};
use mixtri_oracle::{brute_concurrency, RawLine};
use proptest::prelude::*;

fn raw(l: &Line) -> RawLine {
    let d = l.direction();
    ((l.point.x, l.point.y), (d.x, d.y))
}

fn concurrent(spec: &mixtri_core::TriangleSpec, lam: f64, phi: f64, vt: f64) -> bool {
    let moving = MovingLine::from_parameters(spec, LineFamily::Lower, lam, vt).line();
    let vertical = MovingLine::from_parameters(spec, LineFamily::Lower, phi, FRAC_PI_2).line();
    let dirichlet = side_line(spec, Side::Dirichlet);
    brute_concurrency([raw(&moving), raw(&vertical), raw(&dirichlet)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn upsilon_makes_three_lines_concurrent(
        a in 0.2..1.4f64, b in 0.2..1.4f64, frac in 0.05..0.95f64, vt in 1.65..3.0f64,
    ) {
        let spec = make_triangle(a, b).unwrap();
        let phi = frac * spec.phi0;
        let lam = upsilon(&spec, phi, vt).unwrap();
        prop_assert!(concurrent(&spec, lam, phi, vt));
        prop_assert!(!concurrent(&spec, lam + 1e-6, phi, vt));
        prop_assert!(!concurrent(&spec, lam - 1e-6, phi, vt));
    }

    #[test]
    fn boundary_tags_cover_the_moving_domain(
        a in 0.2..1.4f64, b in 0.2..1.4f64, frac in 0.0..1.0f64, vt in 0.2..2.9f64, vt1 in 0.0..1.0f64,
    ) {
        let spec = make_triangle(a, b).unwrap();
        let d = moving_domain(&spec, frac * spec.phi0, vt, vt1 * vt);
        if let Ok(d) = d {
            if !d.is_empty() {
                let per = mixtri_core::geometry::polygon_perimeter(&d.polygon);
                let tagged: f64 = d.segments.iter().map(|s| s.length()).sum();
                prop_assert!((per - tagged).abs() <= 1e-10 * per);
            }
        }
    }
}

#[test]
fn threshold_inequalities_on_a_fine_grid() {
    for i in 1..=1000 {
        let alpha = FRAC_PI_2 * i as f64 / 1001.0;
        for beta in [0.05, 0.3, 0.7, 1.2, 1.5] {
            if alpha + beta >= PI - 1e-3 {
                continue;
            }
            let spec = make_triangle(alpha, beta).unwrap();
            let t = thresholds(&spec);
            let star = t.alpha_star.unwrap();
            assert!(
                PI - 2.0 * alpha <= star + 1e-15 && star < PI - alpha,
                "α={alpha}: α*={star}"
            );
            assert!(t.phi2.unwrap() < spec.phi0, "α={alpha} β={beta}");
        }
    }
}

#[test]
fn condition_13_truth_table() {
    let deg = |x: f64| x.to_radians();
    for (a, b, expect) in [
        (48.0, 33.0, true),
        (60.0, 10.0, true),
        (30.0, 30.0, true),
        (20.0, 20.0, true),
        (44.0, 10.0, true),
        (40.0, 35.0, false),
        (44.0, 40.0, false),
        (35.0, 35.0, false),
    ] {
        assert_eq!(condition_13(deg(a), deg(b)), expect, "({a}, {b})");
        assert_eq!(condition_13(deg(b), deg(a)), expect, "({b}, {a})");
    }
}
