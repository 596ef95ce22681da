//! Structured triangulations of the triangle `OAB`.
//!
//! Vertex `(k, j)` with `0 ≤ j ≤ k ≤ n` sits on row `k` (the rows are
//! parallel to the Dirichlet side) at lattice coordinates `i = k − j`
//! steps toward `A` and `j` steps toward `B`. The Dirichlet side is row `n`.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use thiserror::Error;

use crate::geometry::{point_segment_distance, signed_area, Side, TriangleSpec, Vec2};

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("parameter outside its domain: {0}")]
    ParamDomain(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoundaryEdge {
    pub v: [usize; 2],
    pub side: Side,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Vec2>,
    /// Counterclockwise vertex triples.
    pub cells: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub n: usize,
    pub grading: f64,
    /// `O`, `A`, `B` of the meshed triangle.
    pub corners: [Vec2; 3],
}

/// Grading exponent used when none is requested: `2γ/π` for an obtuse
/// Neumann vertex, 1 otherwise.
pub fn default_grading(spec: &TriangleSpec) -> f64 {
    if spec.gamma > FRAC_PI_2 {
        (2.0 * spec.gamma / PI).max(1.0)
    } else {
        1.0
    }
}

#[inline]
fn lattice_index(k: usize, j: usize) -> usize {
    k * (k + 1) / 2 + j
}

pub fn generate(spec: &TriangleSpec, n: usize, grading: f64) -> Result<Mesh, MeshError> {
    if n == 0 {
        return Err(MeshError::ParamDomain("n must be ≥ 1".into()));
    }
    if !(grading >= 1.0) || !grading.is_finite() {
        return Err(MeshError::ParamDomain(format!("grading {grading} must be ≥ 1")));
    }
    let (a, b) = (spec.a, spec.b);
    let nf = n as f64;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 2) / 2);
    for k in 0..=n {
        let scale = if grading == 1.0 {
            1.0 / nf
        } else {
            (k as f64 / nf).powf(grading) / k.max(1) as f64
        };
        for j in 0..=k {
            let i = (k - j) as f64;
            let jf = j as f64;
            // summed in the same order for (i, j) and (j, i) so mirrored
            // lattices are bit-exact mirrors when α = β
            let x = (i * a.x + jf * b.x) * scale;
            let y = (i * a.y + jf * b.y) * scale;
            vertices.push(Vec2::new(x, y));
        }
    }

    let mut cells = Vec::with_capacity(n * n);
    for k in 0..n {
        for j in 0..=k {
            cells.push([
                lattice_index(k, j),
                lattice_index(k + 1, j),
                lattice_index(k + 1, j + 1),
            ]);
            if j < k {
                cells.push([
                    lattice_index(k, j),
                    lattice_index(k + 1, j + 1),
                    lattice_index(k, j + 1),
                ]);
            }
        }
    }

    let mut boundary_edges = Vec::with_capacity(3 * n);
    for j in 0..n {
        boundary_edges.push(BoundaryEdge {
            v: [lattice_index(n, j), lattice_index(n, j + 1)],
            side: Side::Dirichlet,
        });
    }
    for k in 0..n {
        boundary_edges.push(BoundaryEdge {
            v: [lattice_index(k, 0), lattice_index(k + 1, 0)],
            side: Side::NeumannLower,
        });
        boundary_edges.push(BoundaryEdge {
            v: [lattice_index(k, k), lattice_index(k + 1, k + 1)],
            side: Side::NeumannUpper,
        });
    }

    Ok(Mesh {
        vertices,
        cells,
        boundary_edges,
        n,
        grading,
        corners: spec.corners(),
    })
}

/// Midpoint 4-to-1 subdivision. Old vertices keep their indices.
pub fn refine(mesh: &Mesh) -> Mesh {
    let mut vertices = mesh.vertices.clone();
    let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
    let mut midpoint = |p: usize, q: usize, vertices: &mut Vec<Vec2>| -> usize {
        let key = (p.min(q), p.max(q));
        *mid.entry(key).or_insert_with(|| {
            vertices.push(vertices[key.0].midpoint(vertices[key.1]));
            vertices.len() - 1
        })
    };
    let mut cells = Vec::with_capacity(4 * mesh.cells.len());
    for &[a, b, c] in &mesh.cells {
        let ab = midpoint(a, b, &mut vertices);
        let bc = midpoint(b, c, &mut vertices);
        let ca = midpoint(c, a, &mut vertices);
        cells.push([a, ab, ca]);
        cells.push([ab, b, bc]);
        cells.push([ca, bc, c]);
        cells.push([ab, bc, ca]);
    }
    let mut boundary_edges = Vec::with_capacity(2 * mesh.boundary_edges.len());
    for e in &mesh.boundary_edges {
        let m = midpoint(e.v[0], e.v[1], &mut vertices);
        boundary_edges.push(BoundaryEdge {
            v: [e.v[0], m],
            side: e.side,
        });
        boundary_edges.push(BoundaryEdge {
            v: [m, e.v[1]],
            side: e.side,
        });
    }
    Mesh {
        vertices,
        cells,
        boundary_edges,
        n: 2 * mesh.n,
        grading: mesh.grading,
        corners: mesh.corners,
    }
}

impl Mesh {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn cell_points(&self, c: usize) -> [Vec2; 3] {
        let [a, b, d] = self.cells[c];
        [self.vertices[a], self.vertices[b], self.vertices[d]]
    }

    pub fn cell_area(&self, c: usize) -> f64 {
        let [a, b, d] = self.cell_points(c);
        signed_area(a, b, d)
    }

    pub fn barycenter(&self, c: usize) -> Vec2 {
        let [a, b, d] = self.cell_points(c);
        Vec2::new((a.x + b.x + d.x) / 3.0, (a.y + b.y + d.y) / 3.0)
    }

    pub fn cell_diameter(&self, c: usize) -> f64 {
        let [a, b, d] = self.cell_points(c);
        a.dist(b).max(b.dist(d)).max(d.dist(a))
    }

    /// Largest cell diameter.
    pub fn h(&self) -> f64 {
        (0..self.cells.len()).map(|c| self.cell_diameter(c)).fold(0.0, f64::max)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.cells.len()).map(|c| self.cell_area(c)).sum()
    }

    /// Nodes on the Dirichlet side.
    pub fn dirichlet_mask(&self) -> Vec<bool> {
        self.side_mask(Side::Dirichlet)
    }

    pub fn side_mask(&self, side: Side) -> Vec<bool> {
        let mut mask = vec![false; self.vertices.len()];
        for e in self.boundary_edges.iter().filter(|e| e.side == side) {
            mask[e.v[0]] = true;
            mask[e.v[1]] = true;
        }
        mask
    }

    pub fn boundary_length(&self, side: Side) -> f64 {
        self.boundary_edges
            .iter()
            .filter(|e| e.side == side)
            .map(|e| self.vertices[e.v[0]].dist(self.vertices[e.v[1]]))
            .sum()
    }

    /// Cells touching each vertex.
    pub fn vertex_cells(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vertices.len()];
        for (c, cell) in self.cells.iter().enumerate() {
            for &v in cell {
                out[v].push(c);
            }
        }
        out
    }

    /// Cells sharing an edge with each cell.
    pub fn cell_neighbors(&self) -> Vec<Vec<usize>> {
        let mut by_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (c, cell) in self.cells.iter().enumerate() {
            for e in 0..3 {
                let (p, q) = (cell[e], cell[(e + 1) % 3]);
                by_edge.entry((p.min(q), p.max(q))).or_default().push(c);
            }
        }
        let mut out = vec![Vec::new(); self.cells.len()];
        for cs in by_edge.values() {
            for &a in cs {
                for &b in cs {
                    if a != b {
                        out[a].push(b);
                    }
                }
            }
        }
        for v in &mut out {
            v.sort_unstable();
        }
        out
    }

    /// Index permutation for `(x₁, x₂) ↦ (x₁, −x₂)` when it maps vertices onto
    /// vertices bit-exactly, `None` otherwise.
    pub fn mirror_permutation(&self) -> Option<Vec<usize>> {
        let key = |p: Vec2| (p.x.to_bits(), if p.y == 0.0 { 0 } else { p.y.to_bits() });
        let lookup: HashMap<(u64, u64), usize> = self.vertices.iter().enumerate().map(|(i, &p)| (key(p), i)).collect();
        self.vertices
            .iter()
            .map(|&p| lookup.get(&key(p.mirror_x2())).copied())
            .collect()
    }

    /// Writes the line-oriented text form.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(self.to_text().as_bytes())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "vertices {} cells {}", self.vertices.len(), self.cells.len());
        for p in &self.vertices {
            let _ = writeln!(s, "{:?} {:?}", p.x, p.y);
        }
        for c in &self.cells {
            let _ = writeln!(s, "{} {} {}", c[0], c[1], c[2]);
        }
        let _ = writeln!(s, "boundary {}", self.boundary_edges.len());
        for e in &self.boundary_edges {
            let _ = writeln!(s, "{} {} {}", e.v[0], e.v[1], e.side);
        }
        let _ = writeln!(s, "n {} grading {:?}", self.n, self.grading);
        let c = &self.corners;
        let _ = writeln!(
            s,
            "corners {:?} {:?} {:?} {:?} {:?} {:?}",
            c[0].x, c[0].y, c[1].x, c[1].y, c[2].x, c[2].y
        );
        s
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Mesh, MeshError> {
        let lines: Vec<String> = r.lines().collect::<Result<_, _>>()?;
        Mesh::parse(&lines)
    }

    pub fn from_text(text: &str) -> Result<Mesh, MeshError> {
        let lines: Vec<String> = text.lines().map(str::to_owned).collect();
        Mesh::parse(&lines)
    }

    fn parse(lines: &[String]) -> Result<Mesh, MeshError> {
        let mut cursor = Cursor { lines, pos: 0 };
        let head = cursor.fields()?;
        if head.len() != 4 || head[0] != "vertices" || head[2] != "cells" {
            return cursor.fail("expected `vertices N cells M`");
        }
        let nv: usize = cursor.num(head[1])?;
        let nc: usize = cursor.num(head[3])?;
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let f = cursor.fields()?;
            if f.len() != 2 {
                return cursor.fail("expected two coordinates");
            }
            vertices.push(Vec2::new(cursor.num(f[0])?, cursor.num(f[1])?));
        }
        let mut cells = Vec::with_capacity(nc);
        for _ in 0..nc {
            let f = cursor.fields()?;
            if f.len() != 3 {
                return cursor.fail("expected three vertex indices");
            }
            let c = [cursor.num(f[0])?, cursor.num(f[1])?, cursor.num(f[2])?];
            if c.iter().any(|&v| v >= nv) {
                return cursor.fail("vertex index out of range");
            }
            cells.push(c);
        }
        let f = cursor.fields()?;
        if f.len() != 2 || f[0] != "boundary" {
            return cursor.fail("expected `boundary K`");
        }
        let nb: usize = cursor.num(f[1])?;
        let mut boundary_edges = Vec::with_capacity(nb);
        for _ in 0..nb {
            let f = cursor.fields()?;
            if f.len() != 3 {
                return cursor.fail("expected `a b Side`");
            }
            let side = match f[2] {
                "Dirichlet" => Side::Dirichlet,
                "NeumannLower" => Side::NeumannLower,
                "NeumannUpper" => Side::NeumannUpper,
                other => return cursor.fail(&format!("unknown side `{other}`")),
            };
            boundary_edges.push(BoundaryEdge {
                v: [cursor.num(f[0])?, cursor.num(f[1])?],
                side,
            });
        }
        let f = cursor.fields()?;
        if f.len() != 4 || f[0] != "n" || f[2] != "grading" {
            return cursor.fail("expected `n N grading S`");
        }
        let n = cursor.num(f[1])?;
        let grading = cursor.num(f[3])?;
        let f = cursor.fields()?;
        if f.len() != 7 || f[0] != "corners" {
            return cursor.fail("expected `corners` with six coordinates");
        }
        let mut c = [0.0; 6];
        for (k, v) in c.iter_mut().enumerate() {
            *v = cursor.num(f[k + 1])?;
        }
        Ok(Mesh {
            vertices,
            cells,
            boundary_edges,
            n,
            grading,
            corners: [Vec2::new(c[0], c[1]), Vec2::new(c[2], c[3]), Vec2::new(c[4], c[5])],
        })
    }
}

struct Cursor<'a> {
    lines: &'a [String],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn fields(&mut self) -> Result<Vec<&'a str>, MeshError> {
        let line = self.lines.get(self.pos).ok_or(MeshError::Parse {
            line: self.pos + 1,
            msg: "unexpected end of input".into(),
        })?;
        self.pos += 1;
        Ok(line.split_whitespace().collect())
    }

    fn num<T: std::str::FromStr>(&self, s: &str) -> Result<T, MeshError> {
        s.parse().map_err(|_| MeshError::Parse {
            line: self.pos,
            msg: format!("bad number `{s}`"),
        })
    }

    fn fail<T>(&self, msg: &str) -> Result<T, MeshError> {
        Err(MeshError::Parse {
            line: self.pos,
            msg: msg.into(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonPositiveCell {
        cell: usize,
        area: f64,
    },
    NonConformingEdge {
        edge: [usize; 2],
        cells: usize,
    },
    UncoveredBoundaryEdge {
        edge: [usize; 2],
    },
    SpuriousBoundaryEdge {
        edge: [usize; 2],
    },
    WrongSideTag {
        edge: [usize; 2],
        tagged: Side,
        distance: f64,
    },
    AreaMismatch {
        mesh: f64,
        triangle: f64,
    },
    CountMismatch {
        vertices: usize,
        cells: usize,
        n: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshReport {
    pub violations: Vec<Violation>,
    /// Smallest interior angle over all cells, radians.
    pub min_angle: f64,
    /// Largest circumradius-to-twice-inradius ratio (1 for equilateral cells).
    pub max_aspect: f64,
}

impl MeshReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn cell_angles(p: [Vec2; 3]) -> [f64; 3] {
    std::array::from_fn(|i| {
        let a = p[i];
        let u = p[(i + 1) % 3] - a;
        let v = p[(i + 2) % 3] - a;
        u.cross(v).abs().atan2(u.dot(v))
    })
}

fn aspect(p: [Vec2; 3]) -> f64 {
    let (a, b, c) = (p[1].dist(p[2]), p[2].dist(p[0]), p[0].dist(p[1]));
    let area = signed_area(p[0], p[1], p[2]).abs();
    if area == 0.0 {
        return f64::INFINITY;
    }
    let s = 0.5 * (a + b + c);
    let circum = a * b * c / (4.0 * area);
    let inr = area / s;
    circum / (2.0 * inr)
}

/// Checks orientation, conformity, boundary coverage and tags.
pub fn validate(mesh: &Mesh) -> MeshReport {
    let mut violations = Vec::new();
    let mut min_angle = f64::INFINITY;
    let mut max_aspect: f64 = 0.0;
    let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
    for (c, cell) in mesh.cells.iter().enumerate() {
        let area = mesh.cell_area(c);
        if !(area > 0.0) {
            violations.push(Violation::NonPositiveCell { cell: c, area });
        }
        let pts = mesh.cell_points(c);
        for a in cell_angles(pts) {
            min_angle = min_angle.min(a);
        }
        max_aspect = max_aspect.max(aspect(pts));
        for e in 0..3 {
            let (p, q) = (cell[e], cell[(e + 1) % 3]);
            *edge_count.entry((p.min(q), p.max(q))).or_default() += 1;
        }
    }
    let mut boundary: HashMap<(usize, usize), Side> = HashMap::new();
    for e in &mesh.boundary_edges {
        let key = (e.v[0].min(e.v[1]), e.v[0].max(e.v[1]));
        boundary.insert(key, e.side);
        match edge_count.get(&key) {
            Some(1) => {}
            _ => violations.push(Violation::SpuriousBoundaryEdge { edge: e.v }),
        }
        let (p, q) = (mesh.vertices[e.v[0]], mesh.vertices[e.v[1]]);
        let [o, a, b] = mesh.corners;
        let (s0, s1) = match e.side {
            Side::Dirichlet => (a, b),
            Side::NeumannLower => (o, a),
            Side::NeumannUpper => (o, b),
        };
        let distance = point_segment_distance(p, s0, s1).max(point_segment_distance(q, s0, s1));
        if distance > 1e-10 {
            violations.push(Violation::WrongSideTag {
                edge: e.v,
                tagged: e.side,
                distance,
            });
        }
    }
    let mut keys: Vec<_> = edge_count.iter().collect();
    keys.sort();
    for (&(p, q), &count) in keys {
        if count > 2 {
            violations.push(Violation::NonConformingEdge {
                edge: [p, q],
                cells: count,
            });
        } else if count == 1 && !boundary.contains_key(&(p, q)) {
            violations.push(Violation::UncoveredBoundaryEdge { edge: [p, q] });
        }
    }
    let [o, a, b] = mesh.corners;
    let tri = signed_area(o, a, b);
    let total = mesh.total_area();
    if (total - tri).abs() > 1e-12 * tri.abs() {
        violations.push(Violation::AreaMismatch {
            mesh: total,
            triangle: tri,
        });
    }
    let n = mesh.n;
    if mesh.vertices.len() != (n + 1) * (n + 2) / 2 || mesh.cells.len() != n * n {
        violations.push(Violation::CountMismatch {
            vertices: mesh.vertices.len(),
            cells: mesh.cells.len(),
            n,
        });
    }
    MeshReport {
        violations,
        min_angle,
        max_aspect,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_triangle, make_triangle_deg};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn counts() {
        let s = make_triangle(FRAC_PI_4, FRAC_PI_4).unwrap();
        let m = generate(&s, 1, 1.0).unwrap();
        assert_eq!((m.vertices.len(), m.cells.len(), m.boundary_edges.len()), (3, 1, 3));
        let m = generate(&s, 4, 1.0).unwrap();
        assert_eq!((m.vertices.len(), m.cells.len()), (15, 16));
        assert!(generate(&s, 0, 1.0).is_err());
        assert!(generate(&s, 3, 0.5).is_err());
    }

    #[test]
    fn uniform_right_isosceles_has_45_degree_angles() {
        let s = make_triangle(FRAC_PI_4, FRAC_PI_4).unwrap();
        let r = validate(&generate(&s, 8, 1.0).unwrap());
        assert!(r.is_valid(), "{:?}", r.violations);
        assert!((r.min_angle - FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn flipped_cell_is_reported() {
        let s = make_triangle_deg(60.0, 40.0).unwrap();
        let mut m = generate(&s, 4, 1.0).unwrap();
        m.cells[5].swap(1, 2);
        let r = validate(&m);
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NonPositiveCell { cell: 5, .. })));
    }

    #[test]
    fn wrong_tag_is_reported() {
        let s = make_triangle_deg(60.0, 40.0).unwrap();
        let mut m = generate(&s, 4, 1.0).unwrap();
        m.boundary_edges[0].side = Side::NeumannUpper;
        assert!(validate(&m)
            .violations
            .iter()
            .any(|v| matches!(v, Violation::WrongSideTag { .. })));
    }

    #[test]
    fn graded_min_angle_is_uniform_in_n() {
        let s = make_triangle_deg(30.0, 30.0).unwrap();
        let g = default_grading(&s);
        assert!((g - 4.0 / 3.0).abs() < 1e-15);
        let angles: Vec<f64> = [8, 16, 32, 64]
            .iter()
            .map(|&n| {
                let r = validate(&generate(&s, n, g).unwrap());
                assert!(r.is_valid(), "{:?}", r.violations);
                r.min_angle
            })
            .collect();
        let lo = angles.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(lo > 0.5 * angles[0], "{angles:?}");
    }

    #[test]
    fn grading_shrinks_cells_at_the_vertex() {
        let s = make_triangle_deg(30.0, 30.0).unwrap();
        let n = 32;
        let g = default_grading(&s);
        let uni = generate(&s, n, 1.0).unwrap();
        let grd = generate(&s, n, g).unwrap();
        // first cell touches O
        let ratio = grd.cell_diameter(0) / uni.cell_diameter(0);
        let expect = (n as f64).powf(1.0 - g);
        assert!((ratio / expect - 1.0).abs() < 0.05, "{ratio} vs {expect}");
    }

    #[test]
    fn refinement_counts_and_nesting() {
        let s = make_triangle_deg(60.0, 40.0).unwrap();
        let m1 = generate(&s, 1, 1.0).unwrap();
        let m2 = refine(&m1);
        assert_eq!((m2.vertices.len(), m2.cells.len()), (6, 4));
        let m2 = generate(&s, 2, 1.0).unwrap();
        let m8 = refine(&refine(&m2));
        assert_eq!(m8.cells.len(), 16 * m2.cells.len());
        assert_eq!(&m8.vertices[..m2.vertices.len()], &m2.vertices[..]);
        assert!(validate(&m8).is_valid());
        let a2 = m2.cell_area(0);
        let r = refine(&m2);
        for k in 0..4 {
            assert!((r.cell_area(k) - a2 / 4.0).abs() < 1e-15);
        }
    }

    #[test]
    fn mirror_permutation_for_isosceles() {
        for deg in [20.0, 30.0, 44.0, 45.0] {
            let s = make_triangle_deg(deg, deg).unwrap();
            for g in [1.0, default_grading(&s)] {
                let m = generate(&s, 16, g).unwrap();
                let p = m.mirror_permutation().expect("symmetric lattice");
                for (i, &j) in p.iter().enumerate() {
                    assert_eq!(m.vertices[j].x, m.vertices[i].x);
                    assert_eq!(m.vertices[j].y, -m.vertices[i].y);
                }
                assert!(refine(&m).mirror_permutation().is_some());
            }
        }
        let s = make_triangle_deg(48.0, 33.0).unwrap();
        assert!(generate(&s, 8, 1.0).unwrap().mirror_permutation().is_none());
    }

    #[test]
    fn text_round_trip_is_exact() {
        let s = make_triangle_deg(48.0, 33.0).unwrap();
        let m = generate(&s, 7, default_grading(&s)).unwrap();
        let back = Mesh::from_text(&m.to_text()).unwrap();
        assert_eq!(m, back);
        assert!(m.to_text().starts_with("vertices 36 cells 49\n"));
        assert!(Mesh::from_text("vertices 1 cells 0\n1 2\nboundary x").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn structured_invariants(a in 0.1..1.5f64, b in 0.1..1.5f64, n in 1usize..24, refine_it: bool) {
            prop_assume!(a + b < PI - 0.1);
            let s = make_triangle(a, b).unwrap();
            let mut m = generate(&s, n, default_grading(&s)).unwrap();
            if refine_it {
                m = refine(&m);
            }
            let r = validate(&m);
            prop_assert!(r.is_valid(), "{:?}", r.violations);
            prop_assert!((m.total_area() - s.area()).abs() <= 1e-12 * s.area());
            let rel = |x: f64, y: f64| (x - y).abs() <= 1e-10 * y;
            prop_assert!(rel(m.boundary_length(Side::Dirichlet), s.dirichlet_len));
            prop_assert!(rel(m.boundary_length(Side::NeumannLower), s.phi0));
            prop_assert!(rel(m.boundary_length(Side::NeumannUpper), s.psi0));
        }
    }
}
