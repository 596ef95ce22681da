use rayon::prelude::*;

use crate::fem::solve_eigen;
use crate::geometry::{make_triangle, TriangleSpec, Vec2};
use crate::mesh::{default_grading, generate};
use crate::qualify::{directional_sign, locate_max, MaxClass, Sign, Verdict};

use super::{in_pool, Result, SweepError, SweepOptions};

/// Triangle `O, (1, ta), (1, tb)`: `cot α = −ta`, `cot β = tb`.
pub fn path_triangle(a: f64, b: f64, t: f64) -> Result<TriangleSpec> {
    let alpha = (-t * a).recip().atan();
    let beta = (t * b).recip().atan();
    Ok(make_triangle(alpha, beta)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeformationStep {
    pub t: f64,
    pub spec: TriangleSpec,
    /// Eigenvalue with `∫u² = 1`.
    pub mu: f64,
    /// `(tb, −1)·∇u < 0` away from the corners.
    pub monotone: Verdict,
    pub max_class: MaxClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeformationPath {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub steps: Vec<DeformationStep>,
}

impl DeformationPath {
    /// Largest `t` whose verdict fails.
    pub fn last_failure(&self) -> Option<f64> {
        self.steps
            .iter()
            .filter(|s| !s.monotone.pass)
            .map(|s| s.t)
            .reduce(f64::max)
    }

    pub fn all_pass(&self) -> bool {
        self.steps.iter().all(|s| s.monotone.pass)
    }

    /// Largest `|μ_{i+1} − μ_i| / μ_i` between neighbouring steps.
    pub fn max_relative_jump(&self) -> f64 {
        self.steps
            .windows(2)
            .map(|w| (w[1].mu - w[0].mu).abs() / w[0].mu)
            .fold(0.0, f64::max)
    }
}

fn check_params(a: f64, b: f64, t_grid: &[f64]) -> Result<()> {
    if !(b > -a && -a > 0.0 && -a * b > 1.0) {
        return Err(SweepError::ParamDomain(format!(
            "need b > -a > 0 and -ab > 1, got a = {a}, b = {b}"
        )));
    }
    if t_grid.is_empty() {
        return Err(SweepError::ParamDomain("empty t grid".into()));
    }
    if t_grid.iter().any(|t| !t.is_finite() || *t < 1.0) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SweepError::ParamDomain("t grid must be increasing and >= 1".into()));
    }
    Ok(())
}

fn step(a: f64, b: f64, t: f64, n: usize, opts: &SweepOptions) -> Result<DeformationStep> {
    let spec = path_triangle(a, b, t)?;
    let mesh = generate(&spec, n, opts.grading.unwrap_or_else(|| default_grading(&spec)))?;
    let eig = solve_eigen(&mesh, &opts.eigen)?;
    let dir = Vec2::new(t * b, -1.0).normalized();
    let monotone = directional_sign(&mesh, &eig.u, dir, 2.0 * mesh.h(), Sign::Negative)?;
    let max_class = locate_max(&mesh, &eig.u, &spec)?.class;
    Ok(DeformationStep {
        t,
        spec,
        mu: eig.mu,
        monotone,
        max_class,
    })
}

/// Solves along `t_grid` for the family `O, (1, ta), (1, tb)`.
pub fn continuation_t(a: f64, b: f64, t_grid: &[f64], n: usize, opts: &SweepOptions) -> Result<DeformationPath> {
    check_params(a, b, t_grid)?;
    let steps = in_pool(opts.workers, || {
        t_grid
            .par_iter()
            .map(|&t| step(a, b, t, n, opts))
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(DeformationPath { a, b, n, steps })
}
