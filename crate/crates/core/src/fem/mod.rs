//! P1 finite elements: assembly, the principal mixed eigenpair and damped
//! Newton for `Δu + f(u) = 0`, `u = 0` on the Dirichlet side, natural
//! Neumann conditions elsewhere.

mod assemble;
mod band_lu;
mod cg;
mod eigen;
mod field;
mod newton;
mod nonlinearity;
mod order;
mod skyline;
mod sparse;

use thiserror::Error;

pub use assemble::{
    apply_dirichlet, assemble, assemble_with, barycentric_gradients, element_mass, element_stiffness, MassKind,
    ReducedSystem,
};
pub use band_lu::BandLu;
pub use cg::pcg;
pub use eigen::{smallest_eigenpair, solve_eigen, EigenOptions, EigenResult};
pub use field::{gradient_field, interpolate, recovered_gradient, FieldSampler, Location};
pub use newton::{power_initial_guess, solve_semilinear, SemilinearResult};
pub use nonlinearity::{Nonlinearity, ScalarFn};
pub use order::{bandwidth, reverse_cuthill_mckee};
pub use skyline::SkylineCholesky;
pub use sparse::{dot, norm2, SparseOperator};

#[derive(Debug, Error)]
pub enum FemError {
    #[error("cell {cell} has non-positive area {area}")]
    DegenerateCell { cell: usize, area: f64 },
    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("Newton converged to a sign-changing solution")]
    NegativeBranch(Box<SemilinearResult>),
    #[error("point ({x}, {y}) lies outside the mesh")]
    OutsideDomain { x: f64, y: f64 },
    #[error("matrix not positive definite at pivot {pivot} (value {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("matrix numerically singular at pivot {pivot}")]
    SingularMatrix { pivot: usize },
    #[error("{0}")]
    Param(String),
}

/// Systems up to this size are factored directly; larger ones use PCG.
pub const DIRECT_SOLVER_LIMIT: usize = 200_000;

/// Solver for a fixed symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub enum SpdSolver {
    Direct(SkylineCholesky),
    Iterative(SparseOperator),
}

impl SpdSolver {
    pub fn new(a: &SparseOperator) -> Result<Self, FemError> {
        if a.dim <= DIRECT_SOLVER_LIMIT {
            Ok(SpdSolver::Direct(SkylineCholesky::factor(a)?))
        } else {
            Ok(SpdSolver::Iterative(a.clone()))
        }
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, FemError> {
        match self {
            SpdSolver::Direct(f) => Ok(f.solve(b)),
            SpdSolver::Iterative(a) => pcg(a, b, 1e-12, 20 * a.dim.max(100)),
        }
    }
}
