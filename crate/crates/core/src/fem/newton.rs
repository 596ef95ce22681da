//! Damped Newton for `K u = M f(u)` on the non-Dirichlet nodes.

use crate::mesh::Mesh;

use super::assemble::{apply_dirichlet, assemble};
use super::band_lu::BandLu;
use super::nonlinearity::Nonlinearity;
use super::sparse::{dot, norm2, SparseOperator};
use super::FemError;

/// Halvings tried before a Newton step is declared failed.
const MAX_HALVINGS: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct SemilinearResult {
    /// Full nodal field.
    pub u: Vec<f64>,
    /// `‖F(u_k)‖` for every accepted iterate, starting with the initial guess.
    pub newton_history: Vec<f64>,
    /// Every non-Dirichlet nodal value is positive.
    pub positivity: bool,
    pub iterations: usize,
}

fn residual(k: &SparseOperator, m: &SparseOperator, free: &[usize], nl: &Nonlinearity, u: &[f64]) -> (Vec<f64>, f64) {
    let ku = k.matvec(u);
    let fu: Vec<f64> = u.iter().map(|&v| nl.f(v)).collect();
    let mf = m.matvec(&fu);
    let r: Vec<f64> = free.iter().map(|&i| ku[i] - mf[i]).collect();
    let scale = norm2(&free.iter().map(|&i| ku[i]).collect::<Vec<_>>());
    (r, scale)
}

/// Solves `Δu + f(u) = 0` starting from `u0` (which must vanish on the
/// Dirichlet side). Converged when `‖F‖ ≤ tol·‖F(u0)‖`, or when `‖F‖` is
/// below `tol` times `‖K u‖`, which covers an initial guess that already solves.
pub fn solve_semilinear(
    mesh: &Mesh,
    nl: &Nonlinearity,
    u0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<SemilinearResult, FemError> {
    if u0.len() != mesh.num_vertices() {
        return Err(FemError::Param(format!(
            "initial guess has {} values, mesh has {} vertices",
            u0.len(),
            mesh.num_vertices()
        )));
    }
    let mask = mesh.dirichlet_mask();
    if u0.iter().zip(&mask).any(|(&v, &d)| d && v != 0.0) {
        return Err(FemError::Param(
            "initial guess must vanish on the Dirichlet side".into(),
        ));
    }
    let (k, m) = assemble(mesh)?;
    let red = apply_dirichlet(&k, &m, mesh);
    let free = red.free.clone();

    let mut u = u0.to_vec();
    let (mut r, mut scale) = residual(&k, &m, &free, nl, &u);
    let mut rn = norm2(&r);
    let r0 = rn;
    let mut history = vec![rn];
    let converged = |rn: f64, scale: f64| rn <= tol * r0 || rn <= tol * scale;

    let mut iterations = 0;
    while !converged(rn, scale) {
        if iterations == max_iter {
            return Err(FemError::NoConvergence {
                iterations,
                residual: rn / r0.max(f64::MIN_POSITIVE),
            });
        }
        iterations += 1;
        let fp: Vec<f64> = free.iter().map(|&i| nl.fprime(u[i])).collect();
        let jac = red.k.add_scaled(-1.0, &red.m.scale_columns(&fp));
        let delta = BandLu::factor(&jac)?.solve(&r);

        let mut tau = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let mut trial = u.clone();
            for (q, &i) in free.iter().enumerate() {
                trial[i] -= tau * delta[q];
            }
            let (rt, st) = residual(&k, &m, &free, nl, &trial);
            let rtn = norm2(&rt);
            if rtn < rn {
                u = trial;
                r = rt;
                rn = rtn;
                scale = st;
                accepted = true;
                break;
            }
            tau *= 0.5;
        }
        if !accepted {
            return Err(FemError::NoConvergence {
                iterations,
                residual: rn / r0.max(f64::MIN_POSITIVE),
            });
        }
        history.push(rn);
    }

    let umax = free.iter().map(|&i| u[i].abs()).fold(0.0, f64::max);
    let positivity = umax > 0.0 && free.iter().all(|&i| u[i] > 0.0);
    // roundoff-sized values relative to the problem scale carry no sign
    let floor = 1e-10 * umax.max(u0.iter().fold(0.0, |m: f64, v| m.max(v.abs())));
    let below = free.iter().any(|&i| u[i] < -floor);
    let above = free.iter().any(|&i| u[i] > floor);
    let result = SemilinearResult {
        u,
        newton_history: history,
        positivity,
        iterations,
    };
    if below && above {
        return Err(FemError::NegativeBranch(Box::new(result)));
    }
    Ok(result)
}

/// Multiple `c φ` of an `M`-normalized eigenfunction `φ` (eigenvalue `μ₁`)
/// balancing `c μ₁ = c^p φᵀ M φ^p`.
pub fn power_initial_guess(mesh: &Mesh, phi: &[f64], mu1: f64, p: f64) -> Result<Vec<f64>, FemError> {
    if !(p > 1.0) {
        return Err(FemError::Param(format!("power {p} must exceed 1")));
    }
    let (_, m) = assemble(mesh)?;
    let phip: Vec<f64> = phi.iter().map(|&v| v.abs().powf(p - 1.0) * v).collect();
    let num = mu1 * dot(phi, &m.matvec(phi));
    let den = dot(phi, &m.matvec(&phip));
    if !(den > 0.0) {
        return Err(FemError::Param("eigenfunction has no positive mass".into()));
    }
    let c = (num / den).powf(1.0 / (p - 1.0));
    Ok(phi.iter().map(|&v| c * v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{solve_eigen, EigenOptions};
    use crate::geometry::make_triangle;
    use crate::mesh::generate;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_6};

    fn setup(n: usize) -> (Mesh, f64, Vec<f64>) {
        let s = make_triangle(FRAC_PI_3, FRAC_PI_6).unwrap();
        let mesh = generate(&s, n, 1.0).unwrap();
        let opts = EigenOptions {
            tol: 1e-11,
            ..Default::default()
        };
        let e = solve_eigen(&mesh, &opts).unwrap();
        (mesh, e.mu, e.u)
    }

    #[test]
    fn linear_with_eigenfunction_needs_no_step() {
        let (mesh, mu, phi) = setup(12);
        let r = solve_semilinear(&mesh, &Nonlinearity::Linear(mu), &phi, 1e-8, 5).unwrap();
        assert!(r.iterations <= 1);
        let ratio = r.u[0] / phi[0];
        for (a, b) in r.u.iter().zip(&phi) {
            assert!((a - ratio * b).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let (mesh, _, phi) = setup(8);
        let r = solve_semilinear(&mesh, &Nonlinearity::zero(), &phi, 1e-10, 10).unwrap();
        assert!(r.u.iter().all(|v| v.abs() < 1e-12));
        assert!(!r.positivity);
    }

    #[test]
    fn cubic_converges_quadratically() {
        let (mesh, mu, phi) = setup(16);
        let u0 = power_initial_guess(&mesh, &phi, mu, 3.0).unwrap();
        let r = solve_semilinear(&mesh, &Nonlinearity::Power(3.0), &u0, 1e-12, 50).unwrap();
        assert!(r.positivity);
        let h = &r.newton_history;
        assert!(h.len() >= 3, "{h:?}");
        // last steps: r_{k+1} ≤ C r_k² with a moderate C
        let k = h.len() - 2;
        let c = h[k + 1] / (h[k] * h[k]);
        assert!(c < 1e3 || h[k + 1] < 1e-13, "{h:?}");
        assert!(*h.last().unwrap() <= 1e-12 * h[0]);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        use rand::{Rng, SeedableRng};
        let (mesh, mu, phi) = setup(8);
        let nl = Nonlinearity::Power(3.0);
        let u = power_initial_guess(&mesh, &phi, mu, 3.0).unwrap();
        let (k, m) = assemble(&mesh).unwrap();
        let red = apply_dirichlet(&k, &m, &mesh);
        let fp: Vec<f64> = red.free.iter().map(|&i| nl.fprime(u[i])).collect();
        let jac = red.k.add_scaled(-1.0, &red.m.scale_columns(&fp));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let dir: Vec<f64> = (0..red.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let eps = 1e-6;
        let mut up = u.clone();
        let mut um = u.clone();
        for (q, &i) in red.free.iter().enumerate() {
            up[i] += eps * dir[q];
            um[i] -= eps * dir[q];
        }
        let (rp, _) = residual(&k, &m, &red.free, &nl, &up);
        let (rm, _) = residual(&k, &m, &red.free, &nl, &um);
        let fd: Vec<f64> = rp.iter().zip(&rm).map(|(a, b)| (a - b) / (2.0 * eps)).collect();
        let jd = jac.matvec(&dir);
        let err: Vec<f64> = fd.iter().zip(&jd).map(|(a, b)| a - b).collect();
        assert!(norm2(&err) <= 1e-5 * norm2(&jd));
    }

    #[test]
    fn rejects_bad_initial_guess() {
        let (mesh, _, _) = setup(4);
        let ones = vec![1.0; mesh.num_vertices()];
        assert!(matches!(
            solve_semilinear(&mesh, &Nonlinearity::Power(3.0), &ones, 1e-8, 5),
            Err(FemError::Param(_))
        ));
    }
}
