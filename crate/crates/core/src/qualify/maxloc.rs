use std::fmt;
use std::str::FromStr;

use crate::geometry::{classify, point_segment_distance, Side, TriangleSpec, Vec2, VertexKind};
use crate::mesh::Mesh;

use super::{check_field, QualifyError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MaxClass {
    /// At the vertex `O` between the two Neumann sides.
    NeumannVertex,
    /// Strictly inside the longer Neumann side.
    LongerNeumannInterior,
    Other,
}

impl MaxClass {
    pub fn as_str(self) -> &'static str {
        match self {
            MaxClass::NeumannVertex => "NeumannVertex",
            MaxClass::LongerNeumannInterior => "LongerNeumannInterior",
            MaxClass::Other => "Other",
        }
    }
}

impl fmt::Display for MaxClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MaxClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "NeumannVertex" => Ok(MaxClass::NeumannVertex),
            "LongerNeumannInterior" => Ok(MaxClass::LongerNeumannInterior),
            "Other" => Ok(MaxClass::Other),
            _ => Err(format!("unknown max class '{s}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxLocation {
    pub point: Vec2,
    pub value: f64,
    pub class: MaxClass,
    /// Distance from `point` to the nearest triangle vertex.
    pub distance_to_vertex: f64,
    /// Neumann side carrying the maximum, if it lies on one.
    pub side: Option<Side>,
    /// Vertex holding the largest nodal value.
    pub vertex: usize,
    /// Largest diameter of the cells around `vertex`; the classification
    /// tolerance is twice this.
    pub local_h: f64,
}

/// Where the maximum must be: at `O` when the Neumann vertex is not obtuse
/// or the two Neumann sides are equal (angles within `iso_tol` radians),
/// otherwise inside the longer Neumann side.
pub fn expected_max_class(spec: &TriangleSpec, iso_tol: f64) -> MaxClass {
    let c = classify(spec);
    if c.neumann_vertex != VertexKind::Obtuse || (spec.alpha - spec.beta).abs() <= iso_tol {
        MaxClass::NeumannVertex
    } else {
        MaxClass::LongerNeumannInterior
    }
}

/// Vertex of the parabola through three points `(s, v)`, if concave.
fn parabola_peak(s: [f64; 3], v: [f64; 3]) -> Option<(f64, f64)> {
    let d01 = (v[1] - v[0]) / (s[1] - s[0]);
    let d12 = (v[2] - v[1]) / (s[2] - s[1]);
    let a = (d12 - d01) / (s[2] - s[0]);
    if !(a < 0.0) {
        return None;
    }
    let b = d01 - a * (s[0] + s[1]);
    let x = (-b / (2.0 * a)).clamp(s[0], s[2]);
    let val = v[0] + d01 * (x - s[0]) + a * (x - s[0]) * (x - s[1]);
    Some((x, val))
}

/// Least squares quadratic through the 1-ring of `v`; returns its stationary
/// point when it is a maximum inside the ring.
fn patch_peak(mesh: &Mesh, u: &[f64], v: usize, ring: &[usize]) -> Option<(Vec2, f64)> {
    let c = mesh.vertices[v];
    let rows: Vec<[f64; 6]> = std::iter::once(v)
        .chain(ring.iter().copied())
        .map(|w| {
            let d = mesh.vertices[w] - c;
            [1.0, d.x, d.y, d.x * d.x, d.x * d.y, d.y * d.y]
        })
        .collect();
    if rows.len() < 6 {
        return None;
    }
    let rhs: Vec<f64> = std::iter::once(v).chain(ring.iter().copied()).map(|w| u[w]).collect();
    let coef = least_squares::<6>(&rows, &rhs)?;
    let (gx, gy) = (coef[1], coef[2]);
    let (hxx, hxy, hyy) = (2.0 * coef[3], coef[4], 2.0 * coef[5]);
    let det = hxx * hyy - hxy * hxy;
    if !(hxx < 0.0 && det > 0.0) {
        return None;
    }
    let dx = -(hyy * gx - hxy * gy) / det;
    let dy = -(-hxy * gx + hxx * gy) / det;
    let d = Vec2::new(dx, dy);
    let radius = ring
        .iter()
        .map(|&w| mesh.vertices[w].dist(c))
        .fold(f64::INFINITY, f64::min);
    if d.norm() > radius {
        return None;
    }
    let val = coef[0] + gx * dx + gy * dy + coef[3] * dx * dx + coef[4] * dx * dy + coef[5] * dy * dy;
    Some((c + d, val))
}

/// Normal equations with Gaussian elimination; fine for the tiny fits used here.
pub(crate) fn least_squares<const K: usize>(rows: &[[f64; K]], rhs: &[f64]) -> Option<[f64; K]> {
    let mut a = [[0.0; K]; K];
    let mut b = [0.0; K];
    for (r, &y) in rows.iter().zip(rhs) {
        for i in 0..K {
            b[i] += r[i] * y;
            for j in 0..K {
                a[i][j] += r[i] * r[j];
            }
        }
    }
    // column scaling keeps mixed powers of small offsets comparable
    let scale: [f64; K] = std::array::from_fn(|i| if a[i][i] > 0.0 { a[i][i].sqrt() } else { 1.0 });
    for i in 0..K {
        b[i] /= scale[i];
        for j in 0..K {
            a[i][j] /= scale[i] * scale[j];
        }
    }
    for k in 0..K {
        let p = (k..K).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() < 1e-13 {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..K {
            let m = a[i][k] / a[k][k];
            for j in k..K {
                a[i][j] -= m * a[k][j];
            }
            b[i] -= m * b[k];
        }
    }
    let mut x = [0.0; K];
    for k in (0..K).rev() {
        let mut s = b[k];
        for j in k + 1..K {
            s -= a[k][j] * x[j];
        }
        x[k] = s / a[k][k];
    }
    for i in 0..K {
        x[i] /= scale[i];
    }
    Some(x)
}

/// Vertices on a side ordered by distance from its first endpoint.
pub(crate) fn side_chain(mesh: &Mesh, side: Side) -> Vec<usize> {
    let mask = mesh.side_mask(side);
    let start = match side {
        Side::Dirichlet => mesh.corners[1],
        _ => mesh.corners[0],
    };
    let mut v: Vec<usize> = (0..mesh.num_vertices()).filter(|&i| mask[i]).collect();
    v.sort_by(|&a, &b| mesh.vertices[a].dist(start).total_cmp(&mesh.vertices[b].dist(start)));
    v
}

pub fn locate_max(mesh: &Mesh, u: &[f64], spec: &TriangleSpec) -> Result<MaxLocation> {
    check_field(mesh, u)?;
    let vstar = (0..u.len())
        .max_by(|&a, &b| u[a].total_cmp(&u[b]))
        .ok_or_else(|| QualifyError::NotApplicable("empty field".into()))?;
    let o = mesh.corners[0];
    let scale = spec.diameter();
    let mut point = mesh.vertices[vstar];
    let mut value = u[vstar];
    let mut side = None;

    let on_side = |s: Side| mesh.side_mask(s)[vstar];
    if point.dist(o) <= 1e-12 * scale {
        side = None;
    } else if let Some(s) = [Side::NeumannLower, Side::NeumannUpper]
        .into_iter()
        .find(|&s| on_side(s))
    {
        side = Some(s);
        let chain = side_chain(mesh, s);
        let k = chain.iter().position(|&w| w == vstar).expect("vertex on its side");
        if k > 0 && k + 1 < chain.len() {
            let ids = [chain[k - 1], chain[k], chain[k + 1]];
            let sv = ids.map(|w| mesh.vertices[w].dist(o));
            if let Some((s_peak, v_peak)) = parabola_peak(sv, ids.map(|w| u[w])) {
                let far = mesh.vertices[*chain.last().unwrap()];
                point = o + (far - o).normalized() * s_peak;
                value = v_peak.max(value);
            }
        }
    } else {
        let cells = mesh.vertex_cells();
        let mut ring: Vec<usize> = cells[vstar]
            .iter()
            .flat_map(|&c| mesh.cells[c])
            .filter(|&w| w != vstar)
            .collect();
        ring.sort_unstable();
        ring.dedup();
        if let Some((p, val)) = patch_peak(mesh, u, vstar, &ring) {
            point = p;
            value = val.max(value);
        }
    }

    let corners = spec.corners();
    let distance_to_vertex = corners.iter().map(|c| c.dist(point)).fold(f64::INFINITY, f64::min);
    let local_h = local_mesh_size(mesh, vstar);
    let tol = 2.0 * local_h;
    let longer = classify(spec).longer_neumann_side.side();
    let class = if point.dist(o) <= tol {
        MaxClass::NeumannVertex
    } else if let Some(l) = longer {
        let (a, b) = spec.side_endpoints(l);
        let on_longer = side == Some(l) || point_segment_distance(point, a, b) <= tol;
        if on_longer && distance_to_vertex > tol {
            MaxClass::LongerNeumannInterior
        } else {
            MaxClass::Other
        }
    } else {
        MaxClass::Other
    };
    Ok(MaxLocation {
        point,
        value,
        class,
        distance_to_vertex,
        side,
        vertex: vstar,
        local_h,
    })
}

/// Largest diameter among the cells that contain vertex `v`.
pub(crate) fn local_mesh_size(mesh: &Mesh, v: usize) -> f64 {
    mesh.cells
        .iter()
        .enumerate()
        .filter(|(_, cell)| cell.contains(&v))
        .map(|(c, _)| mesh.cell_diameter(c))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_triangle_deg;
    use crate::mesh::generate;

    #[test]
    fn parabola() {
        let f = |s: f64| 3.0 - (s - 0.37) * (s - 0.37);
        let s = [0.2, 0.3, 0.45];
        let (x, v) = parabola_peak(s, s.map(f)).unwrap();
        assert!((x - 0.37).abs() < 1e-12 && (v - 3.0).abs() < 1e-12);
        assert!(parabola_peak(s, s.map(|t| t * t)).is_none());
    }

    #[test]
    fn least_squares_recovers_quadratic() {
        let pts = [
            (0.0, 0.0),
            (0.1, 0.0),
            (0.0, 0.1),
            (-0.1, 0.05),
            (0.05, -0.1),
            (0.1, 0.1),
            (-0.07, -0.02),
        ];
        let f = |x: f64, y: f64| 1.0 + 2.0 * x - y + 0.5 * x * x - 3.0 * x * y + 4.0 * y * y;
        let rows: Vec<[f64; 6]> = pts.iter().map(|&(x, y)| [1.0, x, y, x * x, x * y, y * y]).collect();
        let rhs: Vec<f64> = pts.iter().map(|&(x, y)| f(x, y)).collect();
        let c = least_squares::<6>(&rows, &rhs).unwrap();
        for (a, b) in c.iter().zip([1.0, 2.0, -1.0, 0.5, -3.0, 4.0]) {
            assert!((a - b).abs() < 1e-9, "{c:?}");
        }
    }

    #[test]
    fn synthetic_maxima() {
        let s = make_triangle_deg(48.0, 33.0).unwrap();
        let m = generate(&s, 32, 1.0).unwrap();
        // peak at O
        let u: Vec<f64> = m.vertices.iter().map(|p| 2.0 - p.norm()).collect();
        let l = locate_max(&m, &u, &s).unwrap();
        assert_eq!(l.class, MaxClass::NeumannVertex);
        assert_eq!(l.point, Vec2::ZERO);
        // peak on the upper (longer) side
        let target = s.b * 0.55;
        let u: Vec<f64> = m.vertices.iter().map(|p| 2.0 - p.dist(target).powi(2)).collect();
        let l = locate_max(&m, &u, &s).unwrap();
        assert_eq!(l.class, MaxClass::LongerNeumannInterior);
        assert_eq!(l.side, Some(Side::NeumannUpper));
        assert!(l.point.dist(target) < 1e-10, "{:?}", l.point);
        // interior peak
        let target = Vec2::new(0.6, 0.1);
        let u: Vec<f64> = m.vertices.iter().map(|p| 2.0 - p.dist(target).powi(2)).collect();
        let l = locate_max(&m, &u, &s).unwrap();
        assert_eq!(l.class, MaxClass::Other);
        assert!(l.point.dist(target) < 1e-10);
        // peak on the shorter side
        let target = s.a * 0.5;
        let u: Vec<f64> = m.vertices.iter().map(|p| 2.0 - p.dist(target).powi(2)).collect();
        assert_eq!(locate_max(&m, &u, &s).unwrap().class, MaxClass::Other);
    }

    #[test]
    fn expected_classes() {
        let tol = 2f64.to_radians();
        let e = |a: f64, b: f64| expected_max_class(&make_triangle_deg(a, b).unwrap(), tol);
        assert_eq!(e(45.0, 45.0), MaxClass::NeumannVertex);
        assert_eq!(e(60.0, 40.0), MaxClass::NeumannVertex);
        assert_eq!(e(30.0, 30.0), MaxClass::NeumannVertex);
        assert_eq!(e(48.0, 33.0), MaxClass::LongerNeumannInterior);
        assert_eq!(e(31.0, 30.0), MaxClass::NeumannVertex);
        assert_eq!("Other".parse::<MaxClass>().unwrap(), MaxClass::Other);
        assert!("x".parse::<MaxClass>().is_err());
    }
}
