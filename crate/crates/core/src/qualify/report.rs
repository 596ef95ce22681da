use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use crate::fem::FieldSampler;
use crate::geometry::{classify, lambda_max, moving_domain, thresholds, LongerSide, Side, TriangleSpec, VertexKind};
use crate::mesh::Mesh;

use super::reflection::reflection_with;
use super::{
    arc_trace, corner_fit, critical_points, directional_monotonicity, expected_max_class, locate_max,
    normal_monotonicity_middle_side, symmetry_error, tangential_neumann, ArcTrace, CornerFit, CriticalCluster,
    MaxClass, MaxLocation, ReflectionReport, Result, SymmetryReport, Verdict, DEFAULT_GRAD_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualOptions {
    pub grad_tol: f64,
    /// Outer radius of the corner fit annulus.
    pub corner_window: f64,
    /// Points per axis of the `(λ, ϑ)` reflection grid; 0 skips the check.
    pub reflection_grid: usize,
    /// Lattice subdivisions per fan triangle of the moving domain.
    pub reflection_samples: usize,
    /// Neumann angles closer than this count as equal.
    pub iso_tol: f64,
}

impl Default for QualOptions {
    fn default() -> Self {
        QualOptions {
            grad_tol: DEFAULT_GRAD_TOL,
            corner_window: 0.25,
            reflection_grid: 4,
            reflection_samples: 6,
            iso_tol: 1e-9,
        }
    }
}

/// All qualitative checks on one discrete solution.
#[derive(Debug, Clone, PartialEq)]
pub struct QualReport {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub n: usize,
    pub h: f64,
    pub mu: Option<f64>,
    /// `∂x₁u < 0`; required when the Neumann vertex is not obtuse or the sides are equal.
    pub monotone_dirichlet_normal: Verdict,
    pub dirichlet_normal_required: bool,
    pub monotone_middle_normal: Verdict,
    pub symmetry: Option<SymmetryReport>,
    pub max_location: MaxLocation,
    pub expected_max_class: MaxClass,
    pub critical_points: Vec<CriticalCluster>,
    pub corner_fit: std::result::Result<CornerFit, String>,
    /// Angular derivative about `O` on a circle of radius `corner_window / 2`.
    pub corner_index: Option<ArcTrace>,
    /// Worst reflection over the grid, when one was run.
    pub reflection: Option<ReflectionReport>,
    /// Tangential derivative away from `O` on the Neumann sides along which `u` must decrease.
    pub tangential_neumann: Vec<(Side, Verdict)>,
}

fn lemma_grid(spec: &TriangleSpec, k: usize) -> Vec<(f64, f64)> {
    let t = thresholds(spec);
    let (Some(phi2), Some(star)) = (t.phi2, t.alpha_star) else {
        return Vec::new();
    };
    let lo = (FRAC_PI_2 - spec.alpha).max(1e-3);
    let mut out = Vec::new();
    for i in 0..k {
        let vt = if k == 1 {
            star
        } else {
            lo + (star - lo) * i as f64 / (k - 1) as f64
        };
        let Some(lm) = lambda_max(spec, vt) else { continue };
        for j in 0..k {
            out.push((phi2 + (lm - phi2) * j as f64 / k as f64, vt));
        }
    }
    out
}

/// `(λ, ϑ)` pairs on which `w > 0` is expected on the full moving domain:
/// `ϑ ∈ [π/2 − α, α*]`, `λ ∈ [Φ₂, λ_M(ϑ))`, `k` values of each.
pub fn reflection_grid(spec: &TriangleSpec, k: usize) -> Vec<(f64, f64)> {
    lemma_grid(spec, k)
}

impl QualReport {
    pub fn non_vertex_clusters(&self) -> impl Iterator<Item = &CriticalCluster> {
        self.critical_points.iter().filter(|c| !c.near_vertex)
    }

    /// Expected critical structure: one non-degenerate cluster inside the
    /// longer Neumann side when the maximum leaves the vertex, none otherwise.
    pub fn critical_ok(&self) -> bool {
        let found: Vec<_> = self.non_vertex_clusters().collect();
        match self.expected_max_class {
            MaxClass::LongerNeumannInterior => {
                found.len() == 1 && found[0].nondegenerate && found[0].side == self.max_location.side
            }
            _ => found.is_empty(),
        }
    }

    pub fn symmetry_ok(&self) -> bool {
        self.symmetry.is_none_or(|s| s.relative <= 1e-8 && s.transverse.pass)
    }

    /// Every check that the theory makes a claim about passes.
    pub fn all_pass(&self) -> bool {
        (!self.dirichlet_normal_required || self.monotone_dirichlet_normal.pass)
            && self.monotone_middle_normal.pass
            && self.symmetry_ok()
            && self.max_location.class == self.expected_max_class
            && self.critical_ok()
            && self.reflection.is_none_or(|r| r.pass)
            && self.tangential_neumann.iter().all(|(_, v)| v.pass)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("alpha_deg", format!("{}", self.alpha.to_degrees()));
        kv("beta_deg", format!("{}", self.beta.to_degrees()));
        kv("gamma_deg", format!("{}", self.gamma.to_degrees()));
        kv("mesh.n", self.n.to_string());
        kv("mesh.h", format!("{:e}", self.h));
        if let Some(mu) = self.mu {
            kv("mu", format!("{mu:.15e}"));
        }
        let verdict = |name: &str, v: &Verdict, kv: &mut dyn FnMut(&str, String)| {
            kv(&format!("{name}.pass"), v.pass.to_string());
            kv(&format!("{name}.worst_value"), format!("{:e}", v.worst_value));
            kv(
                &format!("{name}.worst_location"),
                format!("{} {}", v.worst_location.x, v.worst_location.y),
            );
            kv(&format!("{name}.tolerance"), format!("{:e}", v.tolerance));
            kv(&format!("{name}.excluded_radius"), format!("{:e}", v.excluded_radius));
            kv(&format!("{name}.samples"), v.samples.to_string());
        };
        verdict("monotone_dirichlet_normal", &self.monotone_dirichlet_normal, &mut kv);
        kv(
            "monotone_dirichlet_normal.required",
            self.dirichlet_normal_required.to_string(),
        );
        verdict("monotone_middle_normal", &self.monotone_middle_normal, &mut kv);
        if let Some(sym) = &self.symmetry {
            kv("symmetry.max_abs", format!("{:e}", sym.max_abs));
            kv("symmetry.relative", format!("{:e}", sym.relative));
            verdict("symmetry.transverse", &sym.transverse, &mut kv);
        }
        let m = &self.max_location;
        kv("max_location.class", m.class.to_string());
        kv("max_location.expected", self.expected_max_class.to_string());
        kv("max_location.point", format!("{} {}", m.point.x, m.point.y));
        kv("max_location.value", format!("{:e}", m.value));
        kv("max_location.distance_to_vertex", format!("{:e}", m.distance_to_vertex));
        kv(
            "max_location.side",
            m.side.map_or("none".to_string(), |s| s.to_string()),
        );
        kv("max_location.local_h", format!("{:e}", m.local_h));
        let clusters: Vec<_> = self.non_vertex_clusters().collect();
        kv("critical_points.count", clusters.len().to_string());
        kv(
            "critical_points.vertex_clusters",
            (self.critical_points.len() - clusters.len()).to_string(),
        );
        for (i, c) in clusters.iter().enumerate() {
            kv(
                &format!("critical_points.{i}.center"),
                format!("{} {}", c.center.x, c.center.y),
            );
            kv(
                &format!("critical_points.{i}.side"),
                c.side.map_or("none".to_string(), |s| s.to_string()),
            );
            kv(&format!("critical_points.{i}.cells"), c.cells.len().to_string());
            kv(&format!("critical_points.{i}.curvature"), format!("{:e}", c.curvature));
            kv(
                &format!("critical_points.{i}.nondegenerate"),
                c.nondegenerate.to_string(),
            );
        }
        kv("critical_points.ok", self.critical_ok().to_string());
        match &self.corner_fit {
            Ok(f) => {
                kv("corner_fit.c0", format!("{:e}", f.c0));
                kv("corner_fit.c1", format!("{:e}", f.c1));
                kv("corner_fit.c2", format!("{:e}", f.c2));
                kv("corner_fit.omega", format!("{}", f.omega));
                kv(
                    "corner_fit.expected_omega",
                    format!("{}", std::f64::consts::PI / self.gamma),
                );
                kv("corner_fit.residual", format!("{:e}", f.residual));
                kv("corner_fit.samples", f.samples.to_string());
            }
            Err(e) => kv("corner_fit.skipped", e.clone()),
        }
        if let Some(t) = &self.corner_index {
            kv("corner_index.sign_changes", t.sign_changes.to_string());
            kv("corner_index.l", t.index.to_string());
        }
        if let Some(r) = &self.reflection {
            kv("reflection_positivity.pass", r.pass.to_string());
            kv("reflection_positivity.min_w", format!("{:e}", r.min_w));
            kv(
                "reflection_positivity.location",
                format!("{} {}", r.location.x, r.location.y),
            );
            kv("reflection_positivity.tolerance", format!("{:e}", r.tolerance));
            kv("reflection_positivity.line_max_abs", format!("{:e}", r.line_max_abs));
        }
        for (side, v) in &self.tangential_neumann {
            verdict(&format!("tangential_neumann.{side}"), v, &mut kv);
        }
        kv("all_pass", self.all_pass().to_string());
        s
    }
}

/// Runs every check applicable to `spec` on the field `u`.
pub fn qualify_eigenfunction(
    mesh: &Mesh,
    u: &[f64],
    spec: &TriangleSpec,
    mu: Option<f64>,
    opts: &QualOptions,
) -> Result<QualReport> {
    let h = mesh.h();
    let class = classify(spec);
    let obtuse = class.neumann_vertex == VertexKind::Obtuse;
    let equal = (spec.alpha - spec.beta).abs() <= opts.iso_tol;
    let expected = expected_max_class(spec, opts.iso_tol);

    let monotone_dirichlet_normal = directional_monotonicity(mesh, u, 0.0, 2.0 * h)?;
    let monotone_middle_normal = normal_monotonicity_middle_side(mesh, u, spec)?;
    let symmetry = if class.isosceles {
        symmetry_error(mesh, u).ok()
    } else {
        None
    };
    let max_location = locate_max(mesh, u, spec)?;
    let critical = critical_points(mesh, u, opts.grad_tol)?;
    let corner = corner_fit(mesh, u, spec, opts.corner_window).map_err(|e| e.to_string());
    let corner_index = if obtuse {
        // one mesh size off each side, where the recovered gradient is one-sided
        let radius = 0.5 * opts.corner_window;
        let trim = (mesh.h() / radius).min(0.25 * spec.gamma);
        let lo = spec.alpha - FRAC_PI_2 + trim;
        arc_trace(mesh, u, spec.o, radius, lo, lo + spec.gamma - 2.0 * trim, 64).ok()
    } else {
        None
    };

    let mut reflection: Option<ReflectionReport> = None;
    if opts.reflection_grid > 0 {
        let sampler = FieldSampler::new(mesh);
        for (lam, vt) in reflection_grid(spec, opts.reflection_grid) {
            let Ok(d) = moving_domain(spec, lam, vt, 0.0) else {
                continue;
            };
            if d.is_empty() {
                continue;
            }
            let r = reflection_with(&sampler, u, &d, opts.reflection_samples)?;
            if reflection.is_none_or(|w| r.min_w < w.min_w) {
                reflection = Some(ReflectionReport {
                    line_max_abs: r.line_max_abs.max(reflection.map_or(0.0, |w| w.line_max_abs)),
                    ..r
                });
            } else if let Some(w) = reflection.as_mut() {
                w.line_max_abs = w.line_max_abs.max(r.line_max_abs);
            }
        }
    }

    let monotone_sides: Vec<Side> = match class.longer_neumann_side {
        _ if !obtuse || equal => vec![Side::NeumannLower, Side::NeumannUpper],
        LongerSide::Lower => vec![Side::NeumannUpper],
        LongerSide::Upper => vec![Side::NeumannLower],
        LongerSide::Equal => vec![Side::NeumannLower, Side::NeumannUpper],
    };
    let tangential = monotone_sides
        .into_iter()
        .map(|s| tangential_neumann(mesh, u, s, 2.0 * h).map(|v| (s, v)))
        .collect::<Result<Vec<_>>>()?;

    Ok(QualReport {
        alpha: spec.alpha,
        beta: spec.beta,
        gamma: spec.gamma,
        n: mesh.n,
        h,
        mu,
        monotone_dirichlet_normal,
        dirichlet_normal_required: !obtuse || equal,
        monotone_middle_normal,
        symmetry,
        max_location,
        expected_max_class: expected,
        critical_points: critical,
        corner_fit: corner,
        corner_index,
        reflection,
        tangential_neumann: tangential,
    })
}
