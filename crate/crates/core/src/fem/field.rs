//! Gradients and point evaluation of P1 fields.

use crate::geometry::Vec2;
use crate::mesh::Mesh;

use super::assemble::barycentric_gradients;
use super::FemError;

/// Barycentric inclusion tolerance for point location.
pub const LOCATE_TOL: f64 = 1e-10;

/// Constant gradient of the P1 interpolant on every cell.
pub fn gradient_field(mesh: &Mesh, u: &[f64]) -> Vec<Vec2> {
    mesh.cells
        .iter()
        .enumerate()
        .map(|(c, cell)| match barycentric_gradients(mesh.cell_points(c)) {
            Ok(g) => g[0] * u[cell[0]] + g[1] * u[cell[1]] + g[2] * u[cell[2]],
            Err(_) => Vec2::ZERO,
        })
        .collect()
}

/// Nodal gradient: area-weighted average of the cell gradients around each vertex.
pub fn recovered_gradient(mesh: &Mesh, u: &[f64]) -> Vec<Vec2> {
    let cell_grads = gradient_field(mesh, u);
    let mut sum = vec![Vec2::ZERO; mesh.num_vertices()];
    let mut weight = vec![0.0; mesh.num_vertices()];
    for (c, cell) in mesh.cells.iter().enumerate() {
        let a = mesh.cell_area(c);
        for &v in cell {
            sum[v] += cell_grads[c] * a;
            weight[v] += a;
        }
    }
    sum.iter()
        .zip(&weight)
        .map(|(&g, &w)| if w > 0.0 { g * (1.0 / w) } else { Vec2::ZERO })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Location {
    pub cell: usize,
    pub bary: [f64; 3],
}

/// Point locator over a uniform bucket grid.
#[derive(Debug, Clone)]
pub struct FieldSampler<'m> {
    mesh: &'m Mesh,
    lo: Vec2,
    cell_size: Vec2,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

fn bary(p: [Vec2; 3], x: Vec2) -> [f64; 3] {
    let d = (p[1] - p[0]).cross(p[2] - p[0]);
    let l1 = (x - p[0]).cross(p[2] - p[0]) / d;
    let l2 = (p[1] - p[0]).cross(x - p[0]) / d;
    [1.0 - l1 - l2, l1, l2]
}

impl<'m> FieldSampler<'m> {
    pub fn new(mesh: &'m Mesh) -> Self {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &mesh.vertices {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let side = ((mesh.cells.len() as f64).sqrt().ceil() as usize).max(1);
        let (nx, ny) = (side, side);
        let span = hi - lo;
        let cell_size = Vec2::new((span.x / nx as f64).max(1e-300), (span.y / ny as f64).max(1e-300));
        let mut buckets = vec![Vec::new(); nx * ny];
        let mut s = FieldSampler {
            mesh,
            lo,
            cell_size,
            nx,
            ny,
            buckets: Vec::new(),
        };
        for c in 0..mesh.cells.len() {
            let p = mesh.cell_points(c);
            let bl = Vec2::new(p[0].x.min(p[1].x).min(p[2].x), p[0].y.min(p[1].y).min(p[2].y));
            let tr = Vec2::new(p[0].x.max(p[1].x).max(p[2].x), p[0].y.max(p[1].y).max(p[2].y));
            let (i0, j0) = s.bucket(bl);
            let (i1, j1) = s.bucket(tr);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    buckets[j * nx + i].push(c);
                }
            }
        }
        s.buckets = buckets;
        s
    }

    fn bucket(&self, p: Vec2) -> (usize, usize) {
        let fx = ((p.x - self.lo.x) / self.cell_size.x).floor();
        let fy = ((p.y - self.lo.y) / self.cell_size.y).floor();
        (
            (fx.max(0.0) as usize).min(self.nx - 1),
            (fy.max(0.0) as usize).min(self.ny - 1),
        )
    }

    pub fn mesh(&self) -> &'m Mesh {
        self.mesh
    }

    /// Cell containing `x` (largest smallest barycentric coordinate wins).
    pub fn locate(&self, x: Vec2) -> Option<Location> {
        let (i, j) = self.bucket(x);
        let mut best: Option<(f64, Location)> = None;
        for &c in &self.buckets[j * self.nx + i] {
            let b = bary(self.mesh.cell_points(c), x);
            let worst = b[0].min(b[1]).min(b[2]);
            if worst >= -LOCATE_TOL && best.is_none_or(|(w, _)| worst > w) {
                best = Some((worst, Location { cell: c, bary: b }));
            }
        }
        best.map(|(_, l)| l)
    }

    pub fn interpolate(&self, u: &[f64], x: Vec2) -> Result<f64, FemError> {
        let loc = self.locate(x).ok_or(FemError::OutsideDomain { x: x.x, y: x.y })?;
        let cell = self.mesh.cells[loc.cell];
        Ok(loc.bary[0] * u[cell[0]] + loc.bary[1] * u[cell[1]] + loc.bary[2] * u[cell[2]])
    }
}

impl FieldSampler<'_> {
    /// Linear interpolation of a nodal vector field.
    pub fn interpolate_vec(&self, g: &[Vec2], x: Vec2) -> Result<Vec2, FemError> {
        let loc = self.locate(x).ok_or(FemError::OutsideDomain { x: x.x, y: x.y })?;
        let cell = self.mesh.cells[loc.cell];
        Ok(g[cell[0]] * loc.bary[0] + g[cell[1]] * loc.bary[1] + g[cell[2]] * loc.bary[2])
    }
}

/// One-off evaluation; build a [`FieldSampler`] for repeated queries.
pub fn interpolate(mesh: &Mesh, u: &[f64], x: Vec2) -> Result<f64, FemError> {
    FieldSampler::new(mesh).interpolate(u, x)
}
