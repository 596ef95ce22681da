//! The gradient tolerance constant against the exact eigenfunction of the
//! right-isosceles triangle.

use mixtri_core::fem::{gradient_field, solve_eigen, EigenOptions};
use mixtri_core::make_triangle_deg;
use mixtri_core::mesh::generate;
use mixtri_core::qualify::GRADIENT_TOLERANCE;
use mixtri_oracle::CenteredRightIsosceles;

/// `sup |∇u_h − ∇u| / (h · max|∇u_h|)` over cells away from the corners.
fn error_ratio(n: usize) -> f64 {
    let spec = make_triangle_deg(45.0, 45.0).unwrap();
    let m = generate(&spec, n, 1.0).unwrap();
    let u = solve_eigen(&m, &EigenOptions::default()).unwrap().u;
    let g = gradient_field(&m, &u);
    let gmax = g.iter().fold(0.0f64, |a, v| a.max(v.norm()));
    let h = m.h();
    let exact = CenteredRightIsosceles;
    let mut worst = 0.0f64;
    for (c, gc) in g.iter().enumerate() {
        let b = m.barycenter(c);
        if m.corners.iter().any(|k| k.dist(b) <= 2.0 * h) {
            continue;
        }
        let (gx, gy) = exact.gradient(b.x, b.y);
        worst = worst.max((gc.x - gx).hypot(gc.y - gy));
    }
    worst / (h * gmax)
}

#[test]
fn constant_covers_the_observed_error_without_slack_beyond_two() {
    let ratios: Vec<f64> = [16, 32, 64].into_iter().map(error_ratio).collect();
    for (n, r) in [16, 32, 64].iter().zip(&ratios) {
        assert!(*r < GRADIENT_TOLERANCE, "n={n}: ratio {r}");
        assert!(GRADIENT_TOLERANCE < 2.0 * r, "n={n}: ratio {r}");
    }
    // settled to first order: the ratio barely moves between refinements
    assert!((ratios[2] - ratios[1]).abs() < 0.02, "{ratios:?}");
}
