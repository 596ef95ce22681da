//! Jacobi-preconditioned conjugate gradients.

use super::sparse::{dot, norm2, SparseOperator};
use super::FemError;

pub fn pcg(a: &SparseOperator, b: &[f64], rel_tol: f64, max_iter: usize) -> Result<Vec<f64>, FemError> {
    let n = a.dim;
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d != 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Ok(x);
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for _ in 0..max_iter {
        a.matvec_into(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rn = norm2(&r);
        if rn <= rel_tol * bnorm {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(FemError::NoConvergence {
        iterations: max_iter,
        residual: norm2(&r) / bnorm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converges_on_spd() {
        let n = 100;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 + 0.01 * i as f64));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let a = SparseOperator::from_triplets(n, t);
        let x_true: Vec<f64> = (0..n).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let x = pcg(&a, &a.matvec(&x_true), 1e-12, 1000).unwrap();
        for (p, q) in x.iter().zip(&x_true) {
            assert!((p - q).abs() < 1e-9);
        }
        assert!(matches!(
            pcg(&a, &a.matvec(&x_true), 1e-12, 2),
            Err(FemError::NoConvergence { .. })
        ));
    }
}
