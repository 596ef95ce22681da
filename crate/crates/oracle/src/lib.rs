//! Reference answers for small problems.
//!
//! Nothing here shares code with `mixtri-core`: matrices arrive dense,
//! lines arrive as raw coordinates.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use thiserror::Error;

/// Largest system accepted by [`dense_smallest_eigenpair`].
pub const MAX_DENSE_DIM: usize = 2000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("dimension {0} exceeds the dense limit {MAX_DENSE_DIM}")]
    TooLarge(usize),
    #[error("lines {0} and {1} are parallel")]
    ParallelLines(usize, usize),
    #[error("mass matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrices have mismatched shapes")]
    Shape,
}

fn to_matrix(a: &[Vec<f64>]) -> DMatrix<f64> {
    let n = a.len();
    DMatrix::from_fn(n, n, |i, j| a[i][j])
}

/// Eigenvalues in ascending order with their eigenvectors as columns.
pub fn symmetric_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let e = SymmetricEigen::new(to_matrix(a));
    let n = a.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| e.eigenvalues[i].total_cmp(&e.eigenvalues[j]));
    let vals = order.iter().map(|&i| e.eigenvalues[i]).collect();
    let vecs = (0..n)
        .map(|r| order.iter().map(|&c| e.eigenvectors[(r, c)]).collect())
        .collect();
    (vals, vecs)
}

/// Smallest eigenpair of `K u = μ M u` for dense symmetric `K` and SPD `M`,
/// by Cholesky reduction to a standard problem and a full symmetric
/// eigendecomposition. The vector satisfies `uᵀ M u = 1` and has a positive
/// component sum.
pub fn dense_smallest_eigenpair(k: &[Vec<f64>], m: &[Vec<f64>]) -> Result<(f64, Vec<f64>), OracleError> {
    let n = k.len();
    if n > MAX_DENSE_DIM {
        return Err(OracleError::TooLarge(n));
    }
    if m.len() != n || k.iter().chain(m).any(|r| r.len() != n) || n == 0 {
        return Err(OracleError::Shape);
    }
    let l = Cholesky::new(to_matrix(m)).ok_or(OracleError::NotPositiveDefinite)?.l();
    // C = L⁻¹ K L⁻ᵀ
    let w = l
        .solve_lower_triangular(&to_matrix(k))
        .ok_or(OracleError::NotPositiveDefinite)?;
    let c = l
        .solve_lower_triangular(&w.transpose())
        .ok_or(OracleError::NotPositiveDefinite)?;
    let c = (&c + c.transpose()) * 0.5;
    let e = SymmetricEigen::new(c);
    let idx = e.eigenvalues.imin();
    let y = e.eigenvectors.column(idx).into_owned();
    let mut u = l
        .transpose()
        .solve_upper_triangular(&y)
        .ok_or(OracleError::NotPositiveDefinite)?;
    if u.sum() < 0.0 {
        u.neg_mut();
    }
    Ok((e.eigenvalues[idx], u.iter().copied().collect()))
}

/// The mixed problem on the right isosceles triangle with Neumann legs.
///
/// Reflecting across both legs turns it into the Dirichlet problem on a
/// square, whose first mode is a product of cosines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RightIsosceles {
    /// Leg length.
    pub legs: f64,
}

impl RightIsosceles {
    pub fn mu(&self) -> f64 {
        PI * PI / (self.legs * self.legs)
    }

    /// Value at leg coordinates `(s, t)`, each in `[0, legs]` with
    /// `s + t ≤ legs`; normalized to unit L² norm.
    pub fn value_legs(&self, s: f64, t: f64) -> f64 {
        let k = PI / self.legs;
        (2.0f64).sqrt() / self.legs * ((k * s).cos() + (k * t).cos())
    }

    /// Gradient in leg coordinates.
    pub fn gradient_legs(&self, s: f64, t: f64) -> (f64, f64) {
        let k = PI / self.legs;
        let a = -(2.0f64).sqrt() / self.legs * k;
        (a * (k * s).sin(), a * (k * t).sin())
    }
}

/// Legs 1 on the coordinate axes, Dirichlet hypotenuse `x + y = 1`:
/// `μ = π²` and `u = √2 (cos πx + cos πy)`.
pub fn closed_form_right_isosceles() -> (f64, impl Fn(f64, f64) -> f64) {
    let r = RightIsosceles { legs: 1.0 };
    (r.mu(), move |x, y| r.value_legs(x, y))
}

/// Same problem placed with the Neumann vertex at the origin and the
/// hypotenuse on `x₁ = 1` (legs `√2`), so `μ = π²/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenteredRightIsosceles;

impl CenteredRightIsosceles {
    const R: RightIsosceles = RightIsosceles {
        legs: std::f64::consts::SQRT_2,
    };

    fn legs_coords(x: f64, y: f64) -> (f64, f64) {
        // the legs run along (1, −1) and (1, 1)
        let r = std::f64::consts::FRAC_1_SQRT_2;
        ((x - y) * r, (x + y) * r)
    }

    pub fn mu(&self) -> f64 {
        Self::R.mu()
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        let (s, t) = Self::legs_coords(x, y);
        Self::R.value_legs(s, t)
    }

    pub fn gradient(&self, x: f64, y: f64) -> (f64, f64) {
        let (s, t) = Self::legs_coords(x, y);
        let (gs, gt) = Self::R.gradient_legs(s, t);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        ((gs + gt) * r, (gt - gs) * r)
    }
}

/// A line given by a point and a direction.
pub type RawLine = ((f64, f64), (f64, f64));

fn intersect(a: RawLine, b: RawLine) -> Option<(f64, f64)> {
    let ((px, py), (dx, dy)) = a;
    let ((qx, qy), (ex, ey)) = b;
    let det = dx * (-ey) - dy * (-ex);
    let scale = (dx.hypot(dy)) * (ex.hypot(ey));
    if det.abs() <= 1e-14 * scale {
        return None;
    }
    let (rx, ry) = (qx - px, qy - py);
    let s = (rx * (-ey) - ry * (-ex)) / det;
    Some((px + s * dx, py + s * dy))
}

/// Whether three lines pass through one point, to within `1e-10`.
pub fn brute_concurrency(lines: [RawLine; 3]) -> Result<bool, OracleError> {
    let p01 = intersect(lines[0], lines[1]).ok_or(OracleError::ParallelLines(0, 1))?;
    let p02 = intersect(lines[0], lines[2]).ok_or(OracleError::ParallelLines(0, 2))?;
    intersect(lines[1], lines[2]).ok_or(OracleError::ParallelLines(1, 2))?;
    Ok((p01.0 - p02.0).hypot(p01.1 - p02.1) <= 1e-10)
}

/// The point shared by the first two lines.
pub fn intersection(a: RawLine, b: RawLine) -> Result<(f64, f64), OracleError> {
    intersect(a, b).ok_or(OracleError::ParallelLines(0, 1))
}
