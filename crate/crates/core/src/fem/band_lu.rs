//! Banded LU with partial pivoting for the nonsymmetric Newton systems.

use super::order::{bandwidth, reverse_cuthill_mckee};
use super::sparse::SparseOperator;
use super::FemError;

/// Factorization of `P A Pᵀ` where `P` is the Cuthill-McKee reordering of the
/// symmetrized pattern. Row `i` stores columns `i − kl ..= i + kl + ku`; the
/// extra `kl` columns hold fill-in from row interchanges.
#[derive(Debug, Clone)]
pub struct BandLu {
    perm: Vec<usize>,
    kl: usize,
    width: usize,
    data: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandLu {
    pub fn factor(a: &SparseOperator) -> Result<Self, FemError> {
        let n = a.dim;
        let perm = reverse_cuthill_mckee(a);
        let kl = bandwidth(a, &perm);
        let ku = kl;
        let width = 2 * kl + ku + 1;
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut data = vec![0.0; n * width];
        let idx = |i: usize, c: usize| i * width + c + kl - i;
        for old in 0..n {
            let i = inv[old];
            for (c, v) in a.row(old) {
                data[idx(i, inv[c])] += v;
            }
        }

        let scale = data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut pivots = vec![0; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = data[idx(k, k)].abs();
            for r in k + 1..=last_row {
                let v = data[idx(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if !(best > 1e-300_f64.max(scale * 1e-15)) {
                return Err(FemError::SingularMatrix { pivot: k });
            }
            pivots[k] = p;
            let last_col = (k + kl + ku).min(n - 1);
            if p != k {
                for c in k..=last_col {
                    data.swap(idx(k, c), idx(p, c));
                }
            }
            let piv = data[idx(k, k)];
            for r in k + 1..=last_row {
                let m = data[idx(r, k)] / piv;
                data[idx(r, k)] = m;
                if m != 0.0 {
                    for c in k + 1..=last_col {
                        data[idx(r, c)] -= m * data[idx(k, c)];
                    }
                }
            }
        }
        Ok(BandLu {
            perm,
            kl,
            width,
            data,
            pivots,
        })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.perm.len();
        let kl = self.kl;
        let w = self.width;
        let idx = |i: usize, c: usize| i * w + c + kl - i;
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                y.swap(k, p);
            }
            let yk = y[k];
            for r in k + 1..=(k + kl).min(n.saturating_sub(1)) {
                y[r] -= self.data[idx(r, k)] * yk;
            }
        }
        for k in (0..n).rev() {
            let last_col = (k + 2 * kl).min(n - 1);
            let mut s = y[k];
            for c in k + 1..=last_col {
                s -= self.data[idx(k, c)] * y[c];
            }
            y[k] = s / self.data[idx(k, k)];
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}
