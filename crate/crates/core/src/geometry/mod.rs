//! Coordinates for combinatorial solutions.
//!
//! Element quality is measured by the corner scaled Jacobian: the
//! determinant of the three unit edge vectors leaving a corner, ordered so
//! that an undistorted hex scores 1 at every corner.

mod optimize;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::hexmodel::{HexComplex, VertexId};
use crate::surface::{
    PYRAMID_APEX, PYRAMID_APEX_MIDPOINTS, PYRAMID_BASE, PYRAMID_BASE_CENTRE, PYRAMID_BASE_MIDPOINTS,
    PYRAMID_SIDE_CENTRES,
};

pub use optimize::{optimize_embedding, softmin_energy, untangle_energy, OptimizeParams, OptimizeResult, OptimizeStatus};

pub type Point = [f64; 3];

/// Coordinates for vertices `0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    points: Vec<Point>,
}

impl Embedding {
    pub fn new(points: Vec<Point>) -> Self {
        Embedding { points }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, v: VertexId) -> Option<Point> {
        self.points.get(v as usize).copied()
    }

    pub fn set(&mut self, v: VertexId, p: Point) {
        self.points[v as usize] = p;
    }

    /// Applies `x -> x * scale * R + t` to every point.
    pub fn transformed(&self, rotation: &[[f64; 3]; 3], scale: f64, translation: Point) -> Embedding {
        let points = self
            .points
            .iter()
            .map(|p| {
                std::array::from_fn(|i| scale * (0..3).map(|j| rotation[i][j] * p[j]).sum::<f64>() + translation[i])
            })
            .collect();
        Embedding { points }
    }
}

/// Coordinates for a subset of vertices.
pub type PartialEmbedding = BTreeMap<VertexId, Point>;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("hex {hex} has a zero-length edge at corner {corner}")]
    DegenerateEdge { hex: usize, corner: usize },
    #[error("no coordinates for vertex {0}")]
    MissingCoordinates(VertexId),
}

/// The three corners joined to each corner, ordered so their edge vectors
/// form a right-handed frame in an undistorted hex.
pub const CORNER_NEIGHBOURS: [[usize; 3]; 8] = [
    [1, 3, 4],
    [2, 0, 5],
    [3, 1, 6],
    [0, 2, 7],
    [7, 5, 0],
    [4, 6, 1],
    [5, 7, 2],
    [6, 4, 3],
];

pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: Point, b: Point) -> Point {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn norm(a: Point) -> f64 {
    dot(a, a).sqrt()
}

fn hex_points(c: &HexComplex, e: &Embedding, h: usize) -> Result<[Point; 8], GeometryError> {
    let hex = &c.hexes()[h];
    let mut pts = [[0.0; 3]; 8];
    for (k, &v) in hex.corners().iter().enumerate() {
        pts[k] = e.get(v).ok_or(GeometryError::MissingCoordinates(v))?;
    }
    Ok(pts)
}

pub(crate) fn corner_value(pts: &[Point; 8], k: usize) -> Option<f64> {
    let [a, b, c] = CORNER_NEIGHBOURS[k].map(|n| sub(pts[n], pts[k]));
    let (la, lb, lc) = (norm(a), norm(b), norm(c));
    if la == 0.0 || lb == 0.0 || lc == 0.0 {
        return None;
    }
    Some((dot(a, cross(b, c)) / (la * lb * lc)).clamp(-1.0, 1.0))
}

/// Scaled Jacobian at each corner of each hex.
pub fn corner_scaled_jacobians(c: &HexComplex, e: &Embedding) -> Result<Vec<[f64; 8]>, GeometryError> {
    (0..c.len())
        .map(|h| {
            let pts = hex_points(c, e, h)?;
            let mut out = [0.0; 8];
            for (k, slot) in out.iter_mut().enumerate() {
                *slot = corner_value(&pts, k).ok_or(GeometryError::DegenerateEdge { hex: h, corner: k })?;
            }
            Ok(out)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct QualityReport {
    pub per_hex_min: Vec<f64>,
    pub global_min: f64,
    pub non_positive: usize,
}

pub fn quality_report(c: &HexComplex, e: &Embedding) -> Result<QualityReport, GeometryError> {
    let sj = corner_scaled_jacobians(c, e)?;
    let per_hex_min: Vec<f64> = sj.iter().map(|h| h.iter().copied().fold(f64::INFINITY, f64::min)).collect();
    Ok(QualityReport {
        global_min: per_hex_min.iter().copied().fold(f64::INFINITY, f64::min),
        non_positive: sj.iter().flatten().filter(|&&s| s <= 0.0).count(),
        per_hex_min,
    })
}

/// Positions of the 18 boundary vertices of the refined pyramid with base
/// corners `(±1, 0, ±1)` and apex `(0, √2, 0)`, keyed by the vertex ids of
/// [`crate::surface::pyramid16_pattern`].
pub fn pyramid_boundary_coords() -> PartialEmbedding {
    let apex = [0.0, 2f64.sqrt(), 0.0];
    let base: [Point; 4] = [[-1.0, 0.0, 1.0], [1.0, 0.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 0.0, -1.0]];
    let mid = |a: Point, b: Point| -> Point { std::array::from_fn(|i| (a[i] + b[i]) / 2.0) };
    let centroid = |a: Point, b: Point, c: Point| -> Point { std::array::from_fn(|i| (a[i] + b[i] + c[i]) / 3.0) };
    let mut out = PartialEmbedding::new();
    out.insert(PYRAMID_APEX, apex);
    out.insert(PYRAMID_BASE_CENTRE, [0.0, 0.0, 0.0]);
    for i in 0..4 {
        let j = (i + 1) % 4;
        out.insert(PYRAMID_BASE[i], base[i]);
        out.insert(PYRAMID_BASE_MIDPOINTS[i], mid(base[i], base[j]));
        out.insert(PYRAMID_APEX_MIDPOINTS[i], mid(apex, base[i]));
        out.insert(PYRAMID_SIDE_CENTRES[i], centroid(base[i], base[j], apex));
    }
    out
}

/// Vertices joined by a hex edge.
pub fn vertex_neighbours(c: &HexComplex) -> Vec<Vec<VertexId>> {
    let mut adj: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); c.vertex_count()];
    for hex in c.hexes() {
        for [a, b] in crate::hexmodel::HEX_EDGES {
            let (u, v) = (hex.0[a], hex.0[b]);
            adj[u as usize].insert(v);
            adj[v as usize].insert(u);
        }
    }
    adj.into_iter().map(|s| s.into_iter().collect()).collect()
}

/// Places free vertices by repeated neighbour averaging (Jacobi sweeps)
/// until no vertex moves more than `tolerance`. Free vertices start at the
/// centroid of the fixed ones.
pub fn init_interior(c: &HexComplex, fixed: &PartialEmbedding, tolerance: f64, max_sweeps: usize) -> Embedding {
    let n = c.vertex_count();
    let centroid: Point = if fixed.is_empty() {
        [0.0; 3]
    } else {
        let s = fixed.values().fold([0.0; 3], |acc, p| [acc[0] + p[0], acc[1] + p[1], acc[2] + p[2]]);
        s.map(|x| x / fixed.len() as f64)
    };
    let mut points: Vec<Point> = (0..n as VertexId).map(|v| fixed.get(&v).copied().unwrap_or(centroid)).collect();
    let adj = vertex_neighbours(c);
    for _ in 0..max_sweeps {
        let mut moved: f64 = 0.0;
        let next: Vec<Point> = (0..n)
            .map(|v| {
                if fixed.contains_key(&(v as VertexId)) || adj[v].is_empty() {
                    return points[v];
                }
                let mut s = [0.0; 3];
                for &w in &adj[v] {
                    for i in 0..3 {
                        s[i] += points[w as usize][i];
                    }
                }
                let p = s.map(|x| x / adj[v].len() as f64);
                moved = moved.max(norm(sub(p, points[v])));
                p
            })
            .collect();
        points = next;
        if moved < tolerance {
            break;
        }
    }
    Embedding::new(points)
}

/// Coordinates for [`subdivide_hex`](crate::hexmodel::subdivide_hex) of
/// `coarse`, by trilinear interpolation inside each coarse hex.
pub fn subdivide_embedding(coarse: &HexComplex, fine: &HexComplex, e: &Embedding) -> Result<Embedding, GeometryError> {
    const LATTICE: [[usize; 3]; 8] =
        [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]];
    let mut points = vec![[0.0; 3]; fine.vertex_count()];
    for h in 0..coarse.len() {
        let pts = hex_points(coarse, e, h)?;
        for (o, octant) in LATTICE.iter().enumerate() {
            let child = &fine.hexes()[8 * h + o];
            for (k, corner) in LATTICE.iter().enumerate() {
                let t: [f64; 3] = std::array::from_fn(|a| (octant[a] + corner[a]) as f64 / 2.0);
                let mut p = [0.0; 3];
                for (m, w) in LATTICE.iter().enumerate() {
                    let weight: f64 = (0..3).map(|a| if w[a] == 1 { t[a] } else { 1.0 - t[a] }).product();
                    for a in 0..3 {
                        p[a] += weight * pts[m][a];
                    }
                }
                points[child.0[k] as usize] = p;
            }
        }
    }
    Ok(Embedding::new(points))
}

/// Default fixed-point tolerance of [`init_interior`].
pub const AVERAGING_TOLERANCE: f64 = 1e-9;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::hexmodel::{build_complex, subdivide_hex};

    pub(crate) fn unit_cube_points() -> Vec<Point> {
        vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 1.0],
            [1.0, 1.0, 1.0],
            [0.0, 1.0, 1.0],
        ]
    }

    #[test]
    fn unit_cube_scores_one() {
        let c = build_complex(&[[0, 1, 2, 3, 4, 5, 6, 7]], 8).unwrap();
        let sj = corner_scaled_jacobians(&c, &Embedding::new(unit_cube_points())).unwrap();
        for v in sj[0] {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn pushed_corner_inverts() {
        let c = build_complex(&[[0, 1, 2, 3, 4, 5, 6, 7]], 8).unwrap();
        let mut pts = unit_cube_points();
        pts[6] = [0.2, 0.2, -0.5];
        let report = quality_report(&c, &Embedding::new(pts)).unwrap();
        assert!(report.global_min < 0.0);
        assert!(report.non_positive > 0);
    }

    #[test]
    fn zero_length_edge() {
        let c = build_complex(&[[0, 1, 2, 3, 4, 5, 6, 7]], 8).unwrap();
        let mut pts = unit_cube_points();
        pts[1] = pts[0];
        assert_eq!(
            corner_scaled_jacobians(&c, &Embedding::new(pts)),
            Err(GeometryError::DegenerateEdge { hex: 0, corner: 0 })
        );
    }

    #[test]
    #[allow(clippy::approx_constant)] // rounded reference values
    fn pyramid_boundary_rows() {
        let b = pyramid_boundary_coords();
        assert_eq!(b.len(), 18);
        let close = |p: Point, q: Point| (0..3).all(|i| (p[i] - q[i]).abs() < 1e-5);
        assert!(close(b[&9], [0.0, 1.41421, 0.0]));
        assert!(close(b[&1], [-1.0, 0.0, 1.0]));
        assert!(close(b[&16], [0.0, 0.471405, -0.66667]));
    }

    #[test]
    fn bundled_boundary_rows_match_the_prescribed_pyramid_where_unsmoothed() {
        let bundled = fixtures::pyramid36().embedding.unwrap();
        let b = pyramid_boundary_coords();
        // Four boundary rows of the bundled coordinates were moved within
        // their faces by smoothing; the rest agree to six digits.
        let moved = [6, 11, 13, 14];
        for (&v, &p) in &b {
            let q = bundled.get(v).unwrap();
            let d = norm(sub(p, q));
            if moved.contains(&v) {
                assert!(d < 0.07, "vertex {v}");
            } else {
                assert!(d < 2e-5, "vertex {v}: {d}");
            }
        }
    }

    /// Lattice positions of the subdivided unit cube.
    pub(crate) fn subdivide_coords() -> Vec<Point> {
        let c = build_complex(&[[0, 1, 2, 3, 4, 5, 6, 7]], 8).unwrap();
        let fine = subdivide_hex(&c);
        let mut pts = vec![[f64::NAN; 3]; fine.vertex_count()];
        let corner = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]];
        for (i, hex) in fine.hexes().iter().enumerate() {
            let octant = corner[i];
            for k in 0..8 {
                let p: [i32; 3] = std::array::from_fn(|a| octant[a] + corner[k][a]);
                pts[hex.0[k] as usize] = p.map(|x| x as f64 / 2.0);
            }
        }
        pts
    }

    #[test]
    fn subdivided_coordinates_are_the_lattice() {
        let c = build_complex(&[[0, 1, 2, 3, 4, 5, 6, 7]], 8).unwrap();
        let fine = subdivide_hex(&c);
        let e = subdivide_embedding(&c, &fine, &Embedding::new(unit_cube_points())).unwrap();
        assert_eq!(e.points(), &subdivide_coords()[..]);
        assert!(quality_report(&fine, &e).unwrap().global_min > 0.999);
    }

    #[test]
    fn averaging_centres_the_body_vertex() {
        let c = subdivide_hex(&build_complex(&[[0, 1, 2, 3, 4, 5, 6, 7]], 8).unwrap());
        let pts = subdivide_coords();
        let (boundary, interior) = crate::hexmodel::classify_vertices(&c);
        let fixed: PartialEmbedding = boundary.iter().map(|&v| (v, pts[v as usize])).collect();
        let e = init_interior(&c, &fixed, AVERAGING_TOLERANCE, 10_000);
        let p = e.get(interior[0]).unwrap();
        for x in p {
            assert!((x - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn pyramid_interior_starts_inside_the_bounding_box() {
        let t1 = fixtures::pyramid36().complex;
        let e = init_interior(&t1, &pyramid_boundary_coords(), AVERAGING_TOLERANCE, 100_000);
        let (_, interior) = crate::hexmodel::classify_vertices(&t1);
        assert_eq!(interior.len(), 33);
        for v in interior {
            let p = e.get(v).unwrap();
            assert!(p[0] > -1.0 && p[0] < 1.0, "{v}: {p:?}");
            assert!(p[1] > 0.0 && p[1] < 2f64.sqrt(), "{v}: {p:?}");
            assert!(p[2] > -1.0 && p[2] < 1.0, "{v}: {p:?}");
        }
    }

    #[test]
    fn bundled_embedding_is_positive() {
        let doc = fixtures::pyramid36();
        let report = quality_report(&doc.complex, doc.embedding.as_ref().unwrap()).unwrap();
        assert!(report.global_min > 0.0);
        assert_eq!(report.non_positive, 0);
    }
}
