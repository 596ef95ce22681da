//! Parameter sweeps over the triangle family: phase diagrams of the maximum
//! location over `(α, β)`, and the deformation path `O, (1, ta), (1, tb)`.

mod csv_io;
mod path;
mod svg;

pub use csv_io::{emit_csv, parse_csv, read_csv, write_csv, CSV_HEADER};
pub use path::{continuation_t, path_triangle, DeformationPath, DeformationStep};
pub use svg::{emit_svg_phase, phase_svg};

use std::path::PathBuf;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::fem::{solve_eigen, EigenOptions, EigenResult, FemError};
use crate::geometry::{condition_13, make_triangle_deg, GeometryError, TriangleSpec, Vec2};
use crate::mesh::{default_grading, generate, Mesh, MeshError};
use crate::qualify::{qualify_eigenfunction, MaxClass, QualOptions, QualReport, QualifyError};

/// Records with a smallest angle below this many degrees are flagged thin.
pub const THIN_ANGLE_DEG: f64 = 5.0;
/// Neumann angles within this many degrees of each other count as equal in sweeps.
pub const GRID_ISO_TOL_DEG: f64 = 2.0;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("parameters out of range: {0}")]
    ParamDomain(String),
    #[error("no records to write")]
    EmptyRecords,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Qualify(#[from] QualifyError),
}

pub type Result<T> = std::result::Result<T, SweepError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Mesh grading; `None` picks the default for each triangle.
    pub grading: Option<f64>,
    pub eigen: EigenOptions,
    pub qual: QualOptions,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            grading: None,
            eigen: EigenOptions::default(),
            qual: QualOptions {
                reflection_grid: 0,
                iso_tol: GRID_ISO_TOL_DEG.to_radians(),
                ..QualOptions::default()
            },
            workers: None,
        }
    }
}

/// One solved and qualified triangle.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub spec: TriangleSpec,
    pub mesh: Mesh,
    pub eigen: EigenResult,
    pub report: QualReport,
}

/// Mesh, solve and qualify one triangle.
pub fn analyze(spec: &TriangleSpec, n: usize, opts: &SweepOptions) -> Result<Analysis> {
    let grading = opts.grading.unwrap_or_else(|| default_grading(spec));
    let mesh = generate(spec, n, grading)?;
    let eigen = solve_eigen(&mesh, &opts.eigen)?;
    let report = qualify_eigenfunction(&mesh, &eigen.u, spec, Some(eigen.mu), &opts.qual)?;
    Ok(Analysis {
        spec: *spec,
        mesh,
        eigen,
        report,
    })
}

/// One grid point of a sweep. Angles are kept in degrees, as printed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub alpha_deg: f64,
    pub beta_deg: f64,
    pub gamma_deg: f64,
    pub mu: Option<f64>,
    pub max_class: Option<MaxClass>,
    pub max_point: Option<Vec2>,
    pub cond13: bool,
    /// Smallest `−∂x₁u` over the checked barycenters.
    pub min_normal_slope: Option<f64>,
    /// Relative mirror error, isosceles triangles only.
    pub symmetry_err: Option<f64>,
    /// Fitted corner exponent, obtuse Neumann vertex only.
    pub omega_fit: Option<f64>,
    pub thin: bool,
    pub error: Option<String>,
    /// Wall time; not written to CSV.
    pub runtime: Duration,
}

impl SweepRecord {
    fn blank(alpha_deg: f64, beta_deg: f64) -> Self {
        let gamma_deg = 180.0 - alpha_deg - beta_deg;
        SweepRecord {
            alpha_deg,
            beta_deg,
            gamma_deg,
            mu: None,
            max_class: None,
            max_point: None,
            cond13: condition_13(alpha_deg.to_radians(), beta_deg.to_radians()),
            min_normal_slope: None,
            symmetry_err: None,
            omega_fit: None,
            thin: alpha_deg.min(beta_deg).min(gamma_deg) < THIN_ANGLE_DEG,
            error: None,
            runtime: Duration::ZERO,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha_deg.to_radians()
    }

    pub fn beta(&self) -> f64 {
        self.beta_deg.to_radians()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma_deg.to_radians()
    }

    /// Class the maximum must have: at `O` unless the Neumann vertex is obtuse
    /// and the Neumann angles differ by more than `iso_tol_deg`.
    pub fn expected_class(&self, iso_tol_deg: f64) -> MaxClass {
        if self.gamma_deg > 90.0 && (self.alpha_deg - self.beta_deg).abs() > iso_tol_deg {
            MaxClass::LongerNeumannInterior
        } else {
            MaxClass::NeumannVertex
        }
    }
}

/// Solves one grid point; failures land in the `error` field.
pub fn sweep_point(alpha_deg: f64, beta_deg: f64, n: usize, opts: &SweepOptions) -> SweepRecord {
    let start = Instant::now();
    let mut rec = SweepRecord::blank(alpha_deg, beta_deg);
    let outcome = make_triangle_deg(alpha_deg, beta_deg)
        .map_err(SweepError::from)
        .and_then(|spec| analyze(&spec, n, opts));
    match outcome {
        Ok(a) => {
            let r = &a.report;
            rec.mu = Some(a.eigen.mu);
            rec.max_class = Some(r.max_location.class);
            rec.max_point = Some(r.max_location.point);
            rec.min_normal_slope = Some(-r.monotone_dirichlet_normal.worst_value);
            rec.symmetry_err = r.symmetry.as_ref().map(|s| s.relative);
            rec.omega_fit = r.corner_fit.as_ref().ok().map(|f| f.omega);
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec.runtime = start.elapsed();
    rec
}

/// `k` equally spaced angles in `[lo, hi]` degrees on both axes, keeping the
/// pairs with `α + β < max_sum`.
pub fn angle_grid(lo_deg: f64, hi_deg: f64, k: usize, max_sum_deg: f64) -> Vec<(f64, f64)> {
    let axis: Vec<f64> = match k {
        0 => Vec::new(),
        1 => vec![lo_deg],
        _ => (0..k)
            .map(|i| lo_deg + (hi_deg - lo_deg) * i as f64 / (k - 1) as f64)
            .collect(),
    };
    axis.iter()
        .flat_map(|&a| axis.iter().map(move |&b| (a, b)))
        .filter(|(a, b)| a + b < max_sum_deg)
        .collect()
}

fn in_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .map_err(|e| SweepError::ParamDomain(format!("worker pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Every grid point in parallel; records come back in input order.
pub fn sweep_angles(grid: &[(f64, f64)], n: usize, opts: &SweepOptions) -> Result<Vec<SweepRecord>> {
    if grid.is_empty() {
        return Err(SweepError::ParamDomain("empty grid".into()));
    }
    in_pool(opts.workers, || {
        grid.par_iter().map(|&(a, b)| sweep_point(a, b, n, opts)).collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        let g = angle_grid(10.0, 80.0, 15, 170.0);
        assert_eq!(g.len(), 225);
        assert_eq!(g[1], (10.0, 15.0));
        assert_eq!(angle_grid(10.0, 80.0, 4, 100.0).len(), 6 + 4);
        assert!(angle_grid(10.0, 80.0, 0, 170.0).is_empty());
    }

    #[test]
    fn records_follow_input_order_and_keep_errors() {
        let grid = [(50.0, 50.0), (100.0, 90.0), (48.0, 33.0)];
        let opts = SweepOptions {
            workers: Some(3),
            ..SweepOptions::default()
        };
        let recs = sweep_angles(&grid, 32, &opts).unwrap();
        assert_eq!(recs.len(), 3);
        for (r, &(a, b)) in recs.iter().zip(&grid) {
            assert_eq!((r.alpha_deg, r.beta_deg), (a, b));
        }
        assert!(recs[0].error.is_none() && recs[0].symmetry_err.is_some() && recs[0].omega_fit.is_none());
        assert!(recs[1].error.is_some() && recs[1].mu.is_none());
        assert!(recs[2].omega_fit.is_some() && recs[2].symmetry_err.is_none());
        assert!(matches!(sweep_angles(&[], 12, &opts), Err(SweepError::ParamDomain(_))));
    }

    #[test]
    fn thin_and_expected() {
        let r = SweepRecord::blank(3.0, 60.0);
        assert!(r.thin);
        assert_eq!(r.expected_class(2.0), MaxClass::LongerNeumannInterior);
        assert_eq!(
            SweepRecord::blank(40.0, 41.0).expected_class(2.0),
            MaxClass::NeumannVertex
        );
        assert_eq!(
            SweepRecord::blank(60.0, 40.0).expected_class(2.0),
            MaxClass::NeumannVertex
        );
        assert!(!SweepRecord::blank(40.0, 40.0).thin);
    }
}
