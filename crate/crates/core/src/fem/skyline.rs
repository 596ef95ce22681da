//! Envelope (skyline) Cholesky factorization for sparse SPD matrices.

use super::order::reverse_cuthill_mckee;
use super::sparse::SparseOperator;
use super::FemError;

/// `P A Pᵀ = L Lᵀ` with `L` stored row by row from the first nonzero column.
#[derive(Debug, Clone)]
pub struct SkylineCholesky {
    perm: Vec<usize>,
    first: Vec<usize>,
    offset: Vec<usize>,
    l: Vec<f64>,
}

impl SkylineCholesky {
    pub fn factor(a: &SparseOperator) -> Result<Self, FemError> {
        let n = a.dim;
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for old in 0..n {
            let i = inv[old];
            for (c, _) in a.row(old) {
                let j = inv[c];
                if j < first[i] {
                    first[i] = j;
                }
            }
        }
        let mut offset = vec![0usize; n + 1];
        for i in 0..n {
            offset[i + 1] = offset[i] + (i - first[i] + 1);
        }
        let mut l = vec![0.0; offset[n]];
        for old in 0..n {
            let i = inv[old];
            for (c, v) in a.row(old) {
                let j = inv[c];
                if j <= i {
                    l[offset[i] + j - first[i]] = v;
                }
            }
        }

        for i in 0..n {
            let fi = first[i];
            let row_i = offset[i];
            for j in fi..=i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let row_j = offset[j];
                let mut s = l[row_i + j - fi];
                let li = &l[row_i + k0 - fi..row_i + j - fi];
                let lj = &l[row_j + k0 - fj..row_j + j - fj];
                s -= li.iter().zip(lj).map(|(x, y)| x * y).sum::<f64>();
                if j < i {
                    l[row_i + j - fi] = s / l[row_j + j - fj];
                } else {
                    if !(s > 0.0) {
                        return Err(FemError::NotPositiveDefinite { pivot: i, value: s });
                    }
                    l[row_i + i - fi] = s.sqrt();
                }
            }
        }
        Ok(SkylineCholesky { perm, first, offset, l })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Stored entries of the factor.
    pub fn envelope_size(&self) -> usize {
        self.l.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.l[self.offset[i]..self.offset[i + 1]];
            let s: f64 = row[..i - fi].iter().zip(&y[fi..i]).map(|(a, b)| a * b).sum();
            y[i] = (y[i] - s) / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.l[self.offset[i]..self.offset[i + 1]];
            y[i] /= row[i - fi];
            let yi = y[i];
            for (k, &lik) in row[..i - fi].iter().enumerate() {
                y[fi + k] -= lik * yi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}
