use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Mixed Dirichlet-Neumann problems on triangles: geometry, meshes, eigenpairs,
/// semilinear solves and checks of their qualitative behaviour.
///
/// The triangle has the Neumann vertex O at the origin and the Dirichlet side on
/// x1 = 1; ALPHA and BETA are the angles at its lower and upper end.
/// Exit status: 0 when every check passes, 2 when a check fails, 1 on errors.
#[derive(Debug, Parser)]
#[command(name = "mixtri", version, max_term_width = 100)]
pub struct Cli {
    #[command(flatten)]
    pub globals: Globals,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Globals {
    /// Angle at the lower mixed vertex, degrees
    #[arg(long, global = true, value_name = "DEG")]
    pub alpha_deg: Option<f64>,
    /// Angle at the upper mixed vertex, degrees
    #[arg(long, global = true, value_name = "DEG")]
    pub beta_deg: Option<f64>,
    /// Subdivisions per side [default: 64]
    #[arg(long, global = true, value_name = "N")]
    pub n: Option<usize>,
    /// Radial grading exponent towards O [default: 2γ/π for obtuse γ, else 1]
    #[arg(long, global = true, value_name = "S")]
    pub grading: Option<f64>,
    /// Solver tolerance [default: 1e-8]
    #[arg(long, global = true, value_name = "TOL")]
    pub tol: Option<f64>,
    /// Seed of the starting vector [default: 0]
    #[arg(long, global = true, value_name = "SEED")]
    pub seed: Option<u64>,
    /// Output root [default: out]
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps [default: all cores]
    #[arg(long, global = true, value_name = "K")]
    pub workers: Option<usize>,
    /// File of `key = value` lines with defaults for the flags above
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Triangle data, thresholds and one moving domain, with an SVG drawing
    Geom(GeomArgs),
    /// Generate, validate and export the mesh
    Mesh,
    /// Principal eigenpair and its qualitative report
    Eigen,
    /// Positive solution of Δu + f(u) = 0 by Newton's method
    Semilinear(SemilinearArgs),
    /// Every check that applies to one triangle
    Verify(VerifyArgs),
    /// Maximum location over a grid of (α, β)
    Sweep(SweepArgs),
    /// Eigenpairs along the family O, (1, ta), (1, tb)
    Continue(ContinueArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GeomArgs {
    /// Distance of the moving line from O [default: the first threshold, or half of |OA|]
    #[arg(long, value_name = "L")]
    pub lambda: Option<f64>,
    /// Direction angle of the moving line, degrees
    #[arg(long, value_name = "DEG", default_value_t = 90.0)]
    pub theta_deg: f64,
    /// Angle of the second cut, degrees
    #[arg(long, value_name = "DEG", default_value_t = 0.0)]
    pub theta1_deg: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SemilinearArgs {
    /// Nonlinearity: linear:MU, power:P or logistic:A,B
    #[arg(long = "f", value_name = "SPEC")]
    pub f: String,
    /// Newton iteration limit
    #[arg(long, value_name = "K", default_value_t = 50)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Points per axis of the (λ, ϑ) reflection grid
    #[arg(long, value_name = "K", default_value_t = 4)]
    pub reflection_grid: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Smallest angle on each axis, degrees
    #[arg(long, value_name = "DEG", default_value_t = 10.0)]
    pub lo_deg: f64,
    /// Largest angle on each axis, degrees
    #[arg(long, value_name = "DEG", default_value_t = 80.0)]
    pub hi_deg: f64,
    /// Angles per axis
    #[arg(long, value_name = "K", default_value_t = 15)]
    pub k: usize,
    /// Keep pairs with α + β below this, degrees
    #[arg(long, value_name = "DEG", default_value_t = 170.0)]
    pub max_sum_deg: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ContinueArgs {
    /// Lower vertex height per unit t (negative)
    #[arg(long, value_name = "A", default_value_t = -1.1, allow_negative_numbers = true)]
    pub a: f64,
    /// Upper vertex height per unit t
    #[arg(long, value_name = "B", default_value_t = 1.2)]
    pub b: f64,
    /// First t
    #[arg(long, value_name = "T", default_value_t = 1.0)]
    pub t_start: f64,
    /// Last t
    #[arg(long, value_name = "T", default_value_t = 5.0)]
    pub t_stop: f64,
    /// Step in t
    #[arg(long, value_name = "DT", default_value_t = 0.25)]
    pub t_step: f64,
}
