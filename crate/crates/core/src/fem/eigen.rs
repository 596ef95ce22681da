//! Principal eigenpair of `K u = μ M u` by inverse iteration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mesh::Mesh;

use super::assemble::{apply_dirichlet, assemble_with, MassKind};
use super::sparse::{dot, norm2, SparseOperator};
use super::{FemError, SpdSolver};

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub mu: f64,
    /// Reduced vector from [`smallest_eigenpair`]; full nodal field (zero on
    /// the Dirichlet side) from [`solve_eigen`].
    pub u: Vec<f64>,
    /// `‖K u − μ M u‖ / ‖M u‖`.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub mass: MassKind,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            tol: 1e-8,
            max_iter: 1000,
            seed: 0,
            mass: MassKind::Consistent,
        }
    }
}

fn m_normalize(m: &SparseOperator, x: &mut [f64]) -> Vec<f64> {
    let mut mx = m.matvec(x);
    let s = dot(x, &mx).sqrt();
    for v in x.iter_mut() {
        *v /= s;
    }
    for v in mx.iter_mut() {
        *v /= s;
    }
    mx
}

/// Smallest eigenpair of the pencil `(K, M)`, normalized to `uᵀ M u = 1`
/// with a positive component sum.
pub fn smallest_eigenpair(
    k: &SparseOperator,
    m: &SparseOperator,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<EigenResult, FemError> {
    if !(tol > 0.0) {
        return Err(FemError::Param(format!("tolerance {tol} must be positive")));
    }
    let n = k.dim;
    if n == 0 {
        return Err(FemError::Param("empty system".into()));
    }
    let solver = SpdSolver::new(k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n).map(|_| 1.0 + 0.01 * (rng.random::<f64>() - 0.5)).collect();
    let mut mx = m_normalize(m, &mut x);
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let mut y = solver.solve(&mx)?;
        let my = m_normalize(m, &mut y);
        let ky = k.matvec(&y);
        let mu = dot(&y, &ky);
        let r: Vec<f64> = ky.iter().zip(&my).map(|(a, b)| a - mu * b).collect();
        residual = norm2(&r) / norm2(&my);
        x = y;
        mx = my;
        if residual <= tol {
            if x.iter().sum::<f64>() < 0.0 {
                x.iter_mut().for_each(|v| *v = -*v);
            }
            return Ok(EigenResult {
                mu,
                u: x,
                residual,
                iterations: it,
            });
        }
    }
    Err(FemError::NoConvergence {
        iterations: max_iter,
        residual,
    })
}

/// Assembles, reduces and solves on a mesh; returns the full nodal field.
pub fn solve_eigen(mesh: &Mesh, opts: &EigenOptions) -> Result<EigenResult, FemError> {
    let (k, m) = assemble_with(mesh, opts.mass)?;
    let red = apply_dirichlet(&k, &m, mesh);
    let r = smallest_eigenpair(&red.k, &red.m, opts.tol, opts.max_iter, opts.seed)?;
    Ok(EigenResult {
        u: red.embed(&r.u),
        ..r
    })
}
