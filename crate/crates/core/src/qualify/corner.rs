use std::f64::consts::FRAC_PI_2;

use crate::fem::{assemble, dot};
use crate::geometry::TriangleSpec;
use crate::mesh::Mesh;

use super::maxloc::least_squares;
use super::{check_field, QualifyError, Result};

pub const MIN_FIT_SAMPLES: usize = 30;

/// `u ≈ c₀ − c₁ r^ω cos(ωφ) − ½c₂r²` near `O`, `φ` measured from the lower side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerFit {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub omega: f64,
    /// Root mean square misfit over the samples.
    pub residual: f64,
    pub samples: usize,
}

struct Sample {
    r: f64,
    phi: f64,
    u: f64,
}

/// Radial profiles used by the fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CornerModel {
    /// `1`, `r^ω cos(ωφ)` and `r²`: the bare expansion.
    Power,
    /// Separated solutions of `Δu + k²u = 0` with Neumann data on both sides:
    /// `J₀(kr)`, `J_ω(kr) cos(ωφ)` and `J_{2ω}(kr) cos(2ωφ)`, scaled to leading
    /// power one. Removes the `r^{ω+2}` bias of the bare expansion.
    Helmholtz { k: f64 },
}

/// `r^ν Σ (−1)^m (kr/2)^{2m} / (m! (ν+1)⋯(ν+m))`, i.e. `J_ν(kr)` over its leading coefficient.
fn bessel_profile(nu: f64, k: f64, r: f64) -> f64 {
    let x2 = 0.25 * k * k * r * r;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..40 {
        term *= -x2 / (m as f64 * (nu + m as f64));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    r.powf(nu) * sum
}

fn fit_linear(samples: &[Sample], omega: f64, model: CornerModel) -> Option<([f64; 3], f64)> {
    let rows: Vec<[f64; 3]> = samples
        .iter()
        .map(|s| match model {
            CornerModel::Power => [1.0, -s.r.powf(omega) * (omega * s.phi).cos(), -0.5 * s.r * s.r],
            CornerModel::Helmholtz { k } => [
                bessel_profile(0.0, k, s.r),
                -bessel_profile(omega, k, s.r) * (omega * s.phi).cos(),
                bessel_profile(2.0 * omega, k, s.r) * (2.0 * omega * s.phi).cos(),
            ],
        })
        .collect();
    let rhs: Vec<f64> = samples.iter().map(|s| s.u).collect();
    let c = least_squares::<3>(&rows, &rhs)?;
    let ss: f64 = rows
        .iter()
        .zip(&rhs)
        .map(|(r, y)| (r[0] * c[0] + r[1] * c[1] + r[2] * c[2] - y).powi(2))
        .sum();
    Some((c, (ss / samples.len() as f64).sqrt()))
}

/// Rayleigh quotient `uᵀKu / uᵀMu`.
fn rayleigh(mesh: &Mesh, u: &[f64]) -> Option<f64> {
    let (k, m) = assemble(mesh).ok()?;
    let q = dot(u, &k.matvec(u)) / dot(u, &m.matvec(u));
    q.is_finite().then_some(q)
}

fn require_obtuse(spec: &TriangleSpec) -> Result<()> {
    if spec.gamma <= FRAC_PI_2 {
        return Err(QualifyError::NotApplicable(format!(
            "Neumann vertex angle {:.6} rad is not obtuse",
            spec.gamma
        )));
    }
    Ok(())
}

/// Fit over nodes with `h ≤ r ≤ r_window`, Helmholtz modes with the wavenumber
/// of the field's Rayleigh quotient.
pub fn corner_fit(mesh: &Mesh, u: &[f64], spec: &TriangleSpec, r_window: f64) -> Result<CornerFit> {
    check_field(mesh, u)?;
    require_obtuse(spec)?;
    let k2 = rayleigh(mesh, u).ok_or_else(|| QualifyError::IllConditioned("zero field".into()))?;
    corner_fit_range(
        mesh,
        u,
        spec,
        mesh.h(),
        r_window,
        CornerModel::Helmholtz { k: k2.max(0.0).sqrt() },
    )
}

/// Fit over nodes with `r_min ≤ r ≤ r_max`; `ω` by golden section on
/// `[1, 2]`, the coefficients by linear least squares for each trial `ω`.
pub fn corner_fit_range(
    mesh: &Mesh,
    u: &[f64],
    spec: &TriangleSpec,
    r_min: f64,
    r_max: f64,
    model: CornerModel,
) -> Result<CornerFit> {
    check_field(mesh, u)?;
    require_obtuse(spec)?;
    let o = mesh.corners[0];
    let phi_lower = spec.alpha - FRAC_PI_2;
    let samples: Vec<Sample> = mesh
        .vertices
        .iter()
        .zip(u)
        .filter_map(|(&p, &v)| {
            let d = p - o;
            let r = d.norm();
            (r >= r_min && r <= r_max).then(|| Sample {
                r,
                phi: d.y.atan2(d.x) - phi_lower,
                u: v,
            })
        })
        .collect();
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(QualifyError::IllConditioned(format!(
            "{} samples in r ∈ [{r_min}, {r_max}], need {MIN_FIT_SAMPLES}",
            samples.len()
        )));
    }
    let cost = |w: f64| fit_linear(&samples, w, model).map_or(f64::INFINITY, |(_, r)| r);

    // coarse scan brackets the minimum, golden section refines it
    let steps = 50;
    let grid: Vec<f64> = (0..=steps).map(|i| 1.0 + i as f64 / steps as f64).collect();
    let best = (0..=steps)
        .min_by(|&a, &b| cost(grid[a]).total_cmp(&cost(grid[b])))
        .unwrap();
    let (mut a, mut b) = (grid[best.saturating_sub(1)], grid[(best + 1).min(steps)]);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (cost(x1), cost(x2));
    while b - a > 1e-10 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = cost(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = cost(x2);
        }
    }
    let omega = 0.5 * (a + b);
    let (c, residual) = fit_linear(&samples, omega, model)
        .ok_or_else(|| QualifyError::IllConditioned("singular normal equations".into()))?;
    let c2 = match model {
        CornerModel::Power => c[2],
        CornerModel::Helmholtz { k } => 0.5 * c[0] * k * k,
    };
    Ok(CornerFit {
        c0: c[0],
        c1: c[1],
        c2,
        omega,
        residual,
        samples: samples.len(),
    })
}
