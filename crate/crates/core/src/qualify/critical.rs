use crate::fem::gradient_field;
use crate::geometry::{Side, Vec2};
use crate::mesh::Mesh;

use super::maxloc::{least_squares, side_chain};
use super::{check_field, near_corner, sup_norm, Result};

/// Default threshold on `|∇u| / max|∇u|` for a low-gradient cell.
pub const DEFAULT_GRAD_TOL: f64 = 0.05;
/// A critical point is non-degenerate when its fitted second derivative
/// exceeds this multiple of `‖u‖∞ / diam²`.
pub const DEGENERACY_FACTOR: f64 = 1e-3;

/// Connected set of low-gradient cells standing for one critical point.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalCluster {
    pub cells: Vec<usize>,
    /// Barycenter of the cell with the smallest gradient.
    pub center: Vec2,
    /// Neumann side touched by a vertex of the cluster.
    pub side: Option<Side>,
    /// Touches the `3h` neighbourhood of a corner: a smear of the corner, not
    /// a critical point of its own.
    pub near_vertex: bool,
    /// Tangential second derivative for side clusters, Hessian determinant otherwise.
    pub curvature: f64,
    pub nondegenerate: bool,
}

fn side_curvature(mesh: &Mesh, u: &[f64], side: Side, center: Vec2) -> Option<f64> {
    let chain = side_chain(mesh, side);
    let o = mesh.vertices[chain[0]];
    let sc = center.dist(o);
    let mut near: Vec<(f64, usize)> = chain
        .iter()
        .map(|&v| ((mesh.vertices[v].dist(o) - sc).abs(), v))
        .collect();
    near.sort_by(|a, b| a.0.total_cmp(&b.0));
    near.truncate(7);
    if near.len() < 3 {
        return None;
    }
    let rows: Vec<[f64; 3]> = near
        .iter()
        .map(|&(_, v)| {
            let s = mesh.vertices[v].dist(o) - sc;
            [1.0, s, s * s]
        })
        .collect();
    let rhs: Vec<f64> = near.iter().map(|&(_, v)| u[v]).collect();
    least_squares::<3>(&rows, &rhs).map(|c| 2.0 * c[2])
}

fn interior_curvature(mesh: &Mesh, u: &[f64], cells: &[usize], neighbors: &[Vec<usize>]) -> Option<f64> {
    let mut verts: Vec<usize> = cells
        .iter()
        .flat_map(|&c| std::iter::once(c).chain(neighbors[c].iter().copied()))
        .flat_map(|c| mesh.cells[c])
        .collect();
    verts.sort_unstable();
    verts.dedup();
    if verts.len() < 6 {
        return None;
    }
    let c = verts.iter().fold(Vec2::ZERO, |s, &v| s + mesh.vertices[v]) * (1.0 / verts.len() as f64);
    let rows: Vec<[f64; 6]> = verts
        .iter()
        .map(|&v| {
            let d = mesh.vertices[v] - c;
            [1.0, d.x, d.y, d.x * d.x, d.x * d.y, d.y * d.y]
        })
        .collect();
    let rhs: Vec<f64> = verts.iter().map(|&v| u[v]).collect();
    let k = least_squares::<6>(&rows, &rhs)?;
    Some(4.0 * k[3] * k[5] - k[4] * k[4])
}

/// Clusters of cells with `|∇u| ≤ grad_tol·max|∇u|`, outside `2h` of the corners.
pub fn critical_points(mesh: &Mesh, u: &[f64], grad_tol: f64) -> Result<Vec<CriticalCluster>> {
    check_field(mesh, u)?;
    let grads = gradient_field(mesh, u);
    let gmax = grads.iter().fold(0.0, |m: f64, g| m.max(g.norm()));
    let h = mesh.h();
    let low: Vec<bool> = (0..mesh.cells.len())
        .map(|c| grads[c].norm() <= grad_tol * gmax && !near_corner(mesh, mesh.barycenter(c), 2.0 * h))
        .collect();
    let neighbors = mesh.cell_neighbors();
    let masks = [Side::NeumannLower, Side::NeumannUpper].map(|s| (s, mesh.side_mask(s)));
    let diam = mesh
        .corners
        .iter()
        .flat_map(|a| mesh.corners.iter().map(move |b| a.dist(*b)))
        .fold(0.0, f64::max);
    let threshold = DEGENERACY_FACTOR * sup_norm(u) / (diam * diam);

    let mut seen = vec![false; mesh.cells.len()];
    let mut out = Vec::new();
    for start in 0..mesh.cells.len() {
        if !low[start] || seen[start] {
            continue;
        }
        let mut cells = vec![start];
        seen[start] = true;
        let mut k = 0;
        while k < cells.len() {
            for &nb in &neighbors[cells[k]] {
                if low[nb] && !seen[nb] {
                    seen[nb] = true;
                    cells.push(nb);
                }
            }
            k += 1;
        }
        cells.sort_unstable();
        let best = *cells
            .iter()
            .min_by(|&&a, &&b| grads[a].norm().total_cmp(&grads[b].norm()))
            .unwrap();
        let center = mesh.barycenter(best);
        let near_vertex = cells.iter().any(|&c| near_corner(mesh, mesh.barycenter(c), 3.0 * h));
        let mut counts = [0usize; 2];
        for &c in &cells {
            for (i, (_, mask)) in masks.iter().enumerate() {
                if mesh.cells[c].iter().any(|&v| mask[v]) {
                    counts[i] += 1;
                }
            }
        }
        let side = if counts[0] == 0 && counts[1] == 0 {
            None
        } else if counts[0] >= counts[1] {
            Some(masks[0].0)
        } else {
            Some(masks[1].0)
        };
        let (curvature, nondegenerate) = match side {
            Some(s) => {
                let k = side_curvature(mesh, u, s, center).unwrap_or(0.0);
                (k, k.abs() > threshold)
            }
            None => {
                let d = interior_curvature(mesh, u, &cells, &neighbors).unwrap_or(0.0);
                (d, d.abs() > threshold * threshold)
            }
        };
        out.push(CriticalCluster {
            cells,
            center,
            side,
            near_vertex,
            curvature,
            nondegenerate,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_triangle_deg;
    use crate::mesh::generate;

    fn bump(m: &Mesh, at: Vec2) -> Vec<f64> {
        m.vertices.iter().map(|p| (-3.0 * p.dist(at).powi(2)).exp()).collect()
    }

    #[test]
    fn bump_on_a_side() {
        let s = make_triangle_deg(48.0, 33.0).unwrap();
        let m = generate(&s, 40, 1.0).unwrap();
        let at = s.b * 0.5;
        let cl = critical_points(&m, &bump(&m, at), 0.1).unwrap();
        let found: Vec<_> = cl.iter().filter(|c| !c.near_vertex).collect();
        assert_eq!(found.len(), 1, "{cl:?}");
        assert_eq!(found[0].side, Some(Side::NeumannUpper), "{found:?}");
        assert!(found[0].center.dist(at) < 0.05);
        assert!(found[0].nondegenerate && found[0].curvature < 0.0);
    }

    #[test]
    fn bump_inside() {
        let s = make_triangle_deg(48.0, 33.0).unwrap();
        let m = generate(&s, 40, 1.0).unwrap();
        let at = Vec2::new(0.6, 0.1);
        let cl = critical_points(&m, &bump(&m, at), 0.1).unwrap();
        let found: Vec<_> = cl.iter().filter(|c| !c.near_vertex).collect();
        assert_eq!(found.len(), 1, "{cl:?}");
        assert_eq!(found[0].side, None);
        assert!(found[0].center.dist(at) < 0.05 && found[0].nondegenerate, "{found:?}");
    }

    #[test]
    fn linear_field_has_none() {
        let s = make_triangle_deg(60.0, 30.0).unwrap();
        let m = generate(&s, 16, 1.0).unwrap();
        let u: Vec<f64> = m.vertices.iter().map(|p| 1.0 - p.x).collect();
        assert!(critical_points(&m, &u, 0.05).unwrap().is_empty());
    }
}
