//! P1 stiffness and mass assembly, Dirichlet reduction.

use crate::geometry::{signed_area, Vec2};
use crate::mesh::Mesh;

use super::sparse::SparseOperator;
use super::FemError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MassKind {
    #[default]
    Consistent,
    /// Row-sum lumping, diagonal.
    Lumped,
}

/// Gradients of the three barycentric coordinates.
pub fn barycentric_gradients(p: [Vec2; 3]) -> Result<[Vec2; 3], f64> {
    let area = signed_area(p[0], p[1], p[2]);
    if !(area > 0.0) {
        return Err(area);
    }
    let inv = 1.0 / (2.0 * area);
    Ok(std::array::from_fn(|i| {
        let a = p[(i + 1) % 3];
        let b = p[(i + 2) % 3];
        Vec2::new((a.y - b.y) * inv, (b.x - a.x) * inv)
    }))
}

pub fn element_stiffness(p: [Vec2; 3]) -> Result<[[f64; 3]; 3], f64> {
    let g = barycentric_gradients(p)?;
    let area = signed_area(p[0], p[1], p[2]);
    Ok(std::array::from_fn(|i| std::array::from_fn(|j| area * g[i].dot(g[j]))))
}

pub fn element_mass(p: [Vec2; 3], kind: MassKind) -> [[f64; 3]; 3] {
    let area = signed_area(p[0], p[1], p[2]);
    std::array::from_fn(|i| {
        std::array::from_fn(|j| match kind {
            MassKind::Consistent => area / 12.0 * if i == j { 2.0 } else { 1.0 },
            MassKind::Lumped => {
                if i == j {
                    area / 3.0
                } else {
                    0.0
                }
            }
        })
    })
}

/// Stiffness and consistent mass matrices.
pub fn assemble(mesh: &Mesh) -> Result<(SparseOperator, SparseOperator), FemError> {
    assemble_with(mesh, MassKind::Consistent)
}

pub fn assemble_with(mesh: &Mesh, mass: MassKind) -> Result<(SparseOperator, SparseOperator), FemError> {
    let n = mesh.num_vertices();
    let mut kt = Vec::with_capacity(9 * mesh.cells.len());
    let mut mt = Vec::with_capacity(9 * mesh.cells.len());
    for (c, cell) in mesh.cells.iter().enumerate() {
        let p = mesh.cell_points(c);
        let ke = element_stiffness(p).map_err(|area| FemError::DegenerateCell { cell: c, area })?;
        let me = element_mass(p, mass);
        for i in 0..3 {
            for j in 0..3 {
                kt.push((cell[i], cell[j], ke[i][j]));
                if me[i][j] != 0.0 {
                    mt.push((cell[i], cell[j], me[i][j]));
                }
            }
        }
    }
    Ok((
        SparseOperator::from_triplets(n, kt),
        SparseOperator::from_triplets(n, mt),
    ))
}

/// Operators restricted to the non-Dirichlet nodes.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub k: SparseOperator,
    pub m: SparseOperator,
    /// `free[r]` is the mesh vertex of reduced index `r`.
    pub free: Vec<usize>,
    pub full_dim: usize,
}

impl ReducedSystem {
    /// Re-embeds a reduced field, with zeros on Dirichlet nodes.
    pub fn embed(&self, reduced: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.full_dim];
        for (r, &v) in self.free.iter().enumerate() {
            full[v] = reduced[r];
        }
        full
    }

    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.free.iter().map(|&v| full[v]).collect()
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }
}

pub fn apply_dirichlet(k: &SparseOperator, m: &SparseOperator, mesh: &Mesh) -> ReducedSystem {
    let mask = mesh.dirichlet_mask();
    let free: Vec<usize> = (0..mesh.num_vertices()).filter(|&v| !mask[v]).collect();
    ReducedSystem {
        k: k.submatrix(&free),
        m: m.submatrix(&free),
        free,
        full_dim: mesh.num_vertices(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_triangle, make_triangle_deg};
    use crate::mesh::generate;
    use std::f64::consts::FRAC_PI_4;

    fn unit() -> [Vec2; 3] {
        [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)]
    }

    #[test]
    fn unit_right_element() {
        let k = element_stiffness(unit()).unwrap();
        let expect = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((k[i][j] - expect[i][j]).abs() < 1e-15);
            }
        }
        let m = element_mass(unit(), MassKind::Consistent);
        assert!((m[0][0] - 2.0 / 24.0).abs() < 1e-16 && (m[0][1] - 1.0 / 24.0).abs() < 1e-16);
        let l = element_mass(unit(), MassKind::Lumped);
        assert!((l[1][1] - 1.0 / 6.0).abs() < 1e-16 && l[1][2] == 0.0);
        assert!(element_stiffness([unit()[0], unit()[2], unit()[1]]).is_err());
    }

    #[test]
    fn constants_are_in_the_kernel() {
        let s = make_triangle_deg(48.0, 33.0).unwrap();
        let mesh = generate(&s, 9, 1.3).unwrap();
        let (k, m) = assemble(&mesh).unwrap();
        let c = vec![2.5; mesh.num_vertices()];
        assert!(k.matvec(&c).iter().all(|v| v.abs() < 1e-12));
        let mc: f64 = m.matvec(&c).iter().zip(&c).map(|(a, b)| a * b).sum();
        assert!((mc - 6.25 * s.area()).abs() < 1e-12);
        assert!(k.asymmetry() < 1e-13 && m.asymmetry() < 1e-13);
        let (_, ml) = assemble_with(&mesh, MassKind::Lumped).unwrap();
        let ml_total: f64 = ml.values.iter().sum();
        assert!((ml_total - s.area()).abs() < 1e-12);
    }

    #[test]
    fn reduction() {
        let s = make_triangle(FRAC_PI_4, FRAC_PI_4).unwrap();
        let mesh = generate(&s, 1, 1.0).unwrap();
        let (k, m) = assemble(&mesh).unwrap();
        let r = apply_dirichlet(&k, &m, &mesh);
        assert_eq!(r.dim(), 1);
        assert_eq!(r.free, vec![0]);
        let full = r.embed(&[3.0]);
        assert_eq!(full, vec![3.0, 0.0, 0.0]);
        assert_eq!(r.restrict(&full), vec![3.0]);
    }
}
