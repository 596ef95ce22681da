use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;
use std::path::PathBuf;

use mixtri_core::fem::{
    power_initial_guess, solve_eigen, solve_semilinear, EigenOptions, FemError, Nonlinearity, SemilinearResult,
};
use mixtri_core::geometry::{classify, condition_13, moving_domain, thresholds, Line, TriangleSpec, VertexKind};
use mixtri_core::mesh::{default_grading, generate, validate, Mesh};
use mixtri_core::qualify::{
    directional_monotonicity, normal_monotonicity_middle_side, symmetry_error, MaxClass, QualOptions, QualReport,
    Verdict,
};
use mixtri_core::sweep::{
    analyze, angle_grid, continuation_t, phase_svg, sweep_angles, write_csv, Analysis, SweepOptions, GRID_ISO_TOL_DEG,
};
use mixtri_core::Vec2;

use crate::args::{ContinueArgs, GeomArgs, SemilinearArgs, SweepArgs, VerifyArgs};
use crate::config::Settings;
use crate::output::OutDir;
use crate::CliError;

/// What a subcommand hands back to `run`.
#[derive(Debug)]
pub struct Outcome {
    pub pass: bool,
    pub dir: PathBuf,
    /// Printed to standard output.
    pub summary: String,
}

fn kv(s: &mut String, k: &str, v: impl std::fmt::Display) {
    let _ = writeln!(s, "{k} = {v}");
}

fn opt(x: Option<f64>) -> String {
    x.map_or("none".to_string(), |v| v.to_string())
}

fn pt(p: Vec2) -> String {
    format!("{} {}", p.x, p.y)
}

fn verdict_line(v: &Verdict) -> String {
    format!(
        "{} worst={:e} tol={:e} at=({}, {}) samples={}",
        if v.pass { "pass" } else { "FAIL" },
        v.worst_value,
        v.tolerance,
        v.worst_location.x,
        v.worst_location.y,
        v.samples
    )
}

fn sweep_options(s: &Settings, qual: QualOptions) -> SweepOptions {
    SweepOptions {
        grading: s.grading,
        eigen: EigenOptions {
            tol: s.tol,
            seed: s.seed,
            ..EigenOptions::default()
        },
        qual,
        workers: s.workers,
    }
}

fn single_options(s: &Settings, reflection_grid: usize) -> SweepOptions {
    sweep_options(
        s,
        QualOptions {
            reflection_grid,
            ..QualOptions::default()
        },
    )
}

fn mesh_for(s: &Settings, spec: &TriangleSpec) -> Result<Mesh, CliError> {
    Ok(generate(spec, s.n, s.grading.unwrap_or_else(|| default_grading(spec)))?)
}

// ---- geom ----

fn geom_svg(spec: &TriangleSpec, poly: &[Vec2], line: &Line) -> String {
    let reflected: Vec<Vec2> = poly.iter().map(|&p| line.reflect(p)).collect();
    let all: Vec<Vec2> = spec.corners().into_iter().chain(reflected.iter().copied()).collect();
    let (mut lo, mut hi) = (all[0], all[0]);
    for p in &all {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
    let (size, margin) = (480.0, 24.0);
    let k = size / span;
    let map = |p: Vec2| (margin + (p.x - lo.x) * k, margin + (hi.y - p.y) * k);
    let points = |ps: &[Vec2]| {
        ps.iter()
            .map(|&p| {
                let (x, y) = map(p);
                format!("{x:.3},{y:.3}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    let w = (hi.x - lo.x) * k + 2.0 * margin;
    let h = (hi.y - lo.y) * k + 2.0 * margin;
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{w:.0}" height="{h:.0}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<polygon points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        points(&spec.corners())
    );
    // Dirichlet side drawn heavier
    let (a, b) = (map(spec.a), map(spec.b));
    let _ = writeln!(
        s,
        r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black" stroke-width="4"/>"#,
        a.0, a.1, b.0, b.1
    );
    if !poly.is_empty() {
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="#4575b4" fill-opacity="0.35" stroke="#4575b4"/>"##,
            points(poly)
        );
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="none" stroke="#d73027" stroke-dasharray="5 3"/>"##,
            points(&reflected)
        );
    }
    let d = line.direction() * (2.0 * span);
    let (p, q) = (map(line.point - d), map(line.point + d));
    let _ = writeln!(
        s,
        r##"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#d73027" stroke-width="1.5"/>"##,
        p.0, p.1, q.0, q.1
    );
    s.push_str("</svg>\n");
    s
}

pub fn geom(s: &Settings, g: &GeomArgs) -> Result<Outcome, CliError> {
    let spec = s.spec()?;
    let c = classify(&spec);
    let t = thresholds(&spec);
    let lambda = g.lambda.or(t.phi1).unwrap_or(0.5 * spec.phi0);
    let (th, th1) = (g.theta_deg.to_radians(), g.theta1_deg.to_radians());
    let d = moving_domain(&spec, lambda, th, th1)?;

    let mut r = String::new();
    kv(&mut r, "alpha_deg", spec.alpha.to_degrees());
    kv(&mut r, "beta_deg", spec.beta.to_degrees());
    kv(&mut r, "gamma_deg", spec.gamma.to_degrees());
    kv(&mut r, "vertex.o", pt(spec.o));
    kv(&mut r, "vertex.a", pt(spec.a));
    kv(&mut r, "vertex.b", pt(spec.b));
    kv(&mut r, "side.lower", spec.phi0);
    kv(&mut r, "side.upper", spec.psi0);
    kv(&mut r, "side.dirichlet", spec.dirichlet_len);
    kv(&mut r, "neumann_vertex", format!("{:?}", c.neumann_vertex));
    kv(&mut r, "isosceles", c.isosceles);
    kv(&mut r, "longer_neumann_side", format!("{:?}", c.longer_neumann_side));
    kv(
        &mut r,
        "middle_side",
        c.middle_side.map_or("ambiguous".to_string(), |m| m.to_string()),
    );
    kv(&mut r, "cond13", condition_13(spec.alpha, spec.beta));
    kv(&mut r, "corner_exponent", PI / spec.gamma);
    kv(&mut r, "threshold.phi1", opt(t.phi1));
    kv(&mut r, "threshold.psi1", opt(t.psi1));
    kv(&mut r, "threshold.phi2", opt(t.phi2));
    kv(&mut r, "threshold.psi2", opt(t.psi2));
    kv(&mut r, "threshold.alpha_star", opt(t.alpha_star));
    kv(&mut r, "threshold.beta_star", opt(t.beta_star));
    kv(&mut r, "domain.lambda", lambda);
    kv(&mut r, "domain.theta", th);
    kv(&mut r, "domain.theta1", th1);
    kv(&mut r, "domain.empty", d.is_empty());
    for (i, p) in d.polygon.iter().enumerate() {
        kv(&mut r, &format!("domain.vertex.{i}"), pt(*p));
    }
    for (i, sg) in d.segments.iter().enumerate() {
        kv(
            &mut r,
            &format!("domain.segment.{i}"),
            format!("{} {} {:?}", pt(sg.a), pt(sg.b), sg.tag),
        );
    }

    let mut out = OutDir::create(&s.out, "geom", &s.label())?;
    out.write("geom.txt", &r)?;
    out.write("geom.svg", geom_svg(&spec, &d.polygon, &d.line.line()))?;
    Ok(Outcome {
        pass: true,
        dir: out.finish()?,
        summary: r,
    })
}

// ---- mesh ----

pub fn mesh(s: &Settings) -> Result<Outcome, CliError> {
    let spec = s.spec()?;
    let m = mesh_for(s, &spec)?;
    let v = validate(&m);
    let mut r = String::new();
    kv(&mut r, "n", m.n);
    kv(&mut r, "grading", m.grading);
    kv(&mut r, "vertices", m.num_vertices());
    kv(&mut r, "cells", m.cells.len());
    kv(&mut r, "h", m.h());
    kv(&mut r, "min_angle_deg", v.min_angle.to_degrees());
    kv(&mut r, "max_aspect", v.max_aspect);
    kv(&mut r, "valid", v.is_valid());
    for (i, viol) in v.violations.iter().enumerate() {
        kv(&mut r, &format!("violation.{i}"), format!("{viol:?}"));
    }
    let mut out = OutDir::create(&s.out, "mesh", &s.label())?;
    out.write("mesh.txt", m.to_text())?;
    out.write("validation.txt", &r)?;
    Ok(Outcome {
        pass: v.is_valid(),
        dir: out.finish()?,
        summary: r,
    })
}

// ---- eigen ----

fn eigen_text(a: &Analysis) -> String {
    let mut r = String::new();
    kv(&mut r, "mu", a.eigen.mu);
    kv(&mut r, "residual", format!("{:e}", a.eigen.residual));
    kv(&mut r, "iterations", a.eigen.iterations);
    kv(&mut r, "vertices", a.mesh.num_vertices());
    kv(&mut r, "h", a.mesh.h());
    r
}

pub fn eigen(s: &Settings) -> Result<Outcome, CliError> {
    let spec = s.spec()?;
    let a = analyze(&spec, s.n, &single_options(s, QualOptions::default().reflection_grid))?;
    let text = eigen_text(&a);
    let report = a.report.to_text();
    let mut out = OutDir::create(&s.out, "eigen", &s.label())?;
    out.write("eigen.txt", &text)?;
    out.write("report.txt", &report)?;
    Ok(Outcome {
        pass: a.report.all_pass(),
        dir: out.finish()?,
        summary: text + &report,
    })
}

// ---- semilinear ----

/// Checks the theory asserts for a positive solution of `Δu + f(u) = 0`.
fn semilinear_claims(m: &Mesh, u: &[f64], spec: &TriangleSpec) -> Result<Vec<(String, bool, String)>, CliError> {
    let c = classify(spec);
    let h = m.h();
    let mut out = Vec::new();
    if c.neumann_vertex != VertexKind::Obtuse || c.isosceles {
        let v = directional_monotonicity(m, u, 0.0, 2.0 * h)?;
        out.push(("monotone_dirichlet_normal".into(), v.pass, verdict_line(&v)));
    } else if condition_13(spec.alpha, spec.beta) {
        let v = normal_monotonicity_middle_side(m, u, spec)?;
        out.push(("monotone_middle_normal".into(), v.pass, verdict_line(&v)));
    }
    if c.isosceles {
        let sym = symmetry_error(m, u)?;
        let ok = sym.relative <= 1e-8 && sym.transverse.pass;
        out.push((
            "symmetry".into(),
            ok,
            format!(
                "relative={:e} transverse: {}",
                sym.relative,
                verdict_line(&sym.transverse)
            ),
        ));
    }
    Ok(out)
}

fn initial_guess(m: &Mesh, nl: &Nonlinearity, phi: &[f64], mu1: f64) -> Result<Vec<f64>, CliError> {
    let top = phi.iter().fold(0.0, |a: f64, v| a.max(*v));
    Ok(match nl {
        Nonlinearity::Power(p) => power_initial_guess(m, phi, mu1, *p)?,
        Nonlinearity::Logistic(_, b) => phi.iter().map(|v| 0.5 * b * v / top).collect(),
        _ => phi.to_vec(),
    })
}

pub fn semilinear(s: &Settings, a: &SemilinearArgs) -> Result<Outcome, CliError> {
    let spec = s.spec()?;
    let nl = Nonlinearity::parse(&a.f)?;
    let m = mesh_for(s, &spec)?;
    let eig = solve_eigen(
        &m,
        &EigenOptions {
            tol: s.tol,
            seed: s.seed,
            ..EigenOptions::default()
        },
    )?;
    let u0 = initial_guess(&m, &nl, &eig.u, eig.mu)?;
    let (res, sign_changing): (SemilinearResult, bool) = match solve_semilinear(&m, &nl, &u0, s.tol, a.max_iter) {
        Ok(r) => (r, false),
        Err(FemError::NegativeBranch(r)) => (*r, true),
        Err(e) => return Err(e.into()),
    };
    let mut r = String::new();
    kv(&mut r, "f", &a.f);
    kv(&mut r, "mu1", eig.mu);
    kv(&mut r, "iterations", res.iterations);
    for (i, n) in res.newton_history.iter().enumerate() {
        kv(&mut r, &format!("newton.{i}"), format!("{n:e}"));
    }
    let (imax, umax) = res
        .u
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
    kv(&mut r, "max", umax);
    kv(&mut r, "max_point", pt(m.vertices[imax]));
    let positive = res.positivity && !sign_changing;
    kv(&mut r, "check.positive", if positive { "pass" } else { "FAIL" });
    let mut pass = positive;
    if positive {
        for (name, ok, detail) in semilinear_claims(&m, &res.u, &spec)? {
            kv(&mut r, &format!("check.{name}"), detail);
            pass &= ok;
        }
    }
    kv(&mut r, "all_pass", pass);
    let mut out = OutDir::create(&s.out, "semilinear", &s.label())?;
    out.write("semilinear.txt", &r)?;
    Ok(Outcome {
        pass,
        dir: out.finish()?,
        summary: r,
    })
}

// ---- verify ----

/// Relative tolerance on the fitted corner exponent.
pub const OMEGA_REL_TOL: f64 = 0.02;

/// Named pass/fail lines for one analysed triangle.
pub fn verify_checks(spec: &TriangleSpec, rep: &QualReport) -> Vec<(String, bool, String)> {
    let mut c = Vec::new();
    let mut add = |name: &str, ok: bool, detail: String| c.push((name.to_string(), ok, detail));
    if rep.dirichlet_normal_required {
        add(
            "monotone_dirichlet_normal",
            rep.monotone_dirichlet_normal.pass,
            verdict_line(&rep.monotone_dirichlet_normal),
        );
    }
    add(
        "monotone_middle_normal",
        rep.monotone_middle_normal.pass,
        verdict_line(&rep.monotone_middle_normal),
    );
    if let Some(sym) = &rep.symmetry {
        add(
            "symmetry",
            rep.symmetry_ok(),
            format!(
                "relative={:e} transverse: {}",
                sym.relative,
                verdict_line(&sym.transverse)
            ),
        );
    }
    let m = &rep.max_location;
    add(
        "max_location",
        m.class == rep.expected_max_class,
        format!(
            "got {} expected {} at ({}, {}) local_h={:e}",
            m.class, rep.expected_max_class, m.point.x, m.point.y, m.local_h
        ),
    );
    add(
        "critical_points",
        rep.critical_ok(),
        format!("non_vertex_clusters={}", rep.non_vertex_clusters().count()),
    );
    if let Some(refl) = &rep.reflection {
        add(
            "reflection",
            refl.pass,
            format!(
                "min_w={:e} tol={:e} line_max_abs={:e}",
                refl.min_w, refl.tolerance, refl.line_max_abs
            ),
        );
    }
    for (side, v) in &rep.tangential_neumann {
        add(&format!("tangential_{side}"), v.pass, verdict_line(v));
    }
    if spec.gamma > FRAC_PI_2 {
        let expected = PI / spec.gamma;
        match &rep.corner_fit {
            Ok(f) => add(
                "corner_exponent",
                ((f.omega - expected) / expected).abs() < OMEGA_REL_TOL,
                format!("omega={} expected={expected} residual={:e}", f.omega, f.residual),
            ),
            Err(e) => add("corner_exponent", false, e.clone()),
        }
        if (spec.alpha - spec.beta).abs() > 1e-9 {
            match &rep.corner_index {
                Some(t) => add(
                    "corner_index",
                    t.index == 1,
                    format!("l={} sign_changes={}", t.index, t.sign_changes),
                ),
                None => add("corner_index", false, "no trace".into()),
            }
        }
    }
    if (spec.alpha - spec.beta).abs() < 1e-12 && (spec.gamma - FRAC_PI_2).abs() < 1e-12 {
        // legs √2: the product of cosines gives π²/2
        let exact = PI * PI / 2.0;
        let mu = rep.mu.unwrap_or(f64::NAN);
        add(
            "closed_form_mu",
            ((mu - exact) / exact).abs() < 5e-3,
            format!("mu={mu} exact={exact}"),
        );
    }
    c
}

pub fn verify(s: &Settings, v: &VerifyArgs) -> Result<Outcome, CliError> {
    let spec = s.spec()?;
    let a = analyze(&spec, s.n, &single_options(s, v.reflection_grid))?;
    let checks = verify_checks(&spec, &a.report);
    let mut r = eigen_text(&a);
    let pass = checks.iter().all(|c| c.1);
    for (name, ok, detail) in &checks {
        let _ = writeln!(r, "check.{name} = {} {detail}", if *ok { "PASS" } else { "FAIL" });
    }
    kv(&mut r, "max_class", a.report.max_location.class);
    kv(&mut r, "all_pass", pass);
    let mut out = OutDir::create(&s.out, "verify", &s.label())?;
    out.write("verify.txt", &r)?;
    out.write("report.txt", a.report.to_text())?;
    Ok(Outcome {
        pass,
        dir: out.finish()?,
        summary: r,
    })
}

// ---- sweep ----

pub fn sweep(s: &Settings, a: &SweepArgs) -> Result<Outcome, CliError> {
    let grid = angle_grid(a.lo_deg, a.hi_deg, a.k, a.max_sum_deg);
    if grid.is_empty() {
        return Err(CliError::Usage("the sweep grid is empty".into()));
    }
    let recs = sweep_angles(&grid, s.n, &sweep_options(s, SweepOptions::default().qual))?;
    let mut csv = Vec::new();
    write_csv(&recs, &mut csv)?;
    let svg = phase_svg(&recs)?;

    let mut r = String::new();
    kv(&mut r, "records", recs.len());
    kv(&mut r, "thin", recs.iter().filter(|x| x.thin).count());
    let errors: Vec<_> = recs.iter().filter(|x| x.error.is_some()).collect();
    kv(&mut r, "errors", errors.len());
    let mismatched: Vec<_> = recs
        .iter()
        .filter(|x| !x.thin && x.error.is_none() && x.max_class != Some(x.expected_class(GRID_ISO_TOL_DEG)))
        .collect();
    kv(&mut r, "mismatches", mismatched.len());
    for x in &mismatched {
        kv(
            &mut r,
            &format!("mismatch.{}x{}", x.alpha_deg, x.beta_deg),
            format!(
                "got {} expected {}",
                x.max_class.unwrap_or(MaxClass::Other),
                x.expected_class(GRID_ISO_TOL_DEG)
            ),
        );
    }
    for x in &errors {
        kv(
            &mut r,
            &format!("error.{}x{}", x.alpha_deg, x.beta_deg),
            x.error.as_deref().unwrap_or(""),
        );
    }
    let label = format!("{}-{}_k{}", a.lo_deg, a.hi_deg, a.k);
    let mut out = OutDir::create(&s.out, "sweep", &label)?;
    out.write("sweep.csv", &csv)?;
    out.write("phase.svg", &svg)?;
    out.write("summary.txt", &r)?;
    Ok(Outcome {
        pass: mismatched.is_empty() && errors.is_empty(),
        dir: out.finish()?,
        summary: r,
    })
}

// ---- continue ----

pub fn t_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(CliError::Usage(format!("bad t range {start}..{stop} step {step}")));
    }
    let k = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=k).map(|i| start + step * i as f64).collect())
}

pub fn continuation(s: &Settings, a: &ContinueArgs) -> Result<Outcome, CliError> {
    let ts = t_grid(a.t_start, a.t_stop, a.t_step)?;
    let path = continuation_t(a.a, a.b, &ts, s.n, &single_options(s, 0))?;
    let mut csv = String::from("t,alpha_deg,beta_deg,gamma_deg,mu,monotone,worst,tolerance,max_class\n");
    for st in &path.steps {
        let _ = writeln!(
            csv,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e},{:.16e},{}",
            st.t,
            st.spec.alpha.to_degrees(),
            st.spec.beta.to_degrees(),
            st.spec.gamma.to_degrees(),
            st.mu,
            st.monotone.pass,
            st.monotone.worst_value,
            st.monotone.tolerance,
            st.max_class
        );
    }
    let mut r = String::new();
    kv(&mut r, "a", a.a);
    kv(&mut r, "b", a.b);
    kv(&mut r, "steps", path.steps.len());
    kv(&mut r, "all_pass", path.all_pass());
    kv(&mut r, "last_failure", opt(path.last_failure()));
    kv(&mut r, "max_relative_jump", path.max_relative_jump());
    let mut out = OutDir::create(&s.out, "continue", &format!("a{}_b{}", a.a, a.b))?;
    out.write("path.csv", &csv)?;
    out.write("summary.txt", &r)?;
    Ok(Outcome {
        pass: path.all_pass(),
        dir: out.finish()?,
        summary: r,
    })
}
