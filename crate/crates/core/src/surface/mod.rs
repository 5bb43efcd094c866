//! Closed quad surfaces given combinatorially.
//!
//! A pattern stores its quads as directed 4-cycles. Internally each quad
//! contributes four darts (directed edges); dart `4 * q + i` runs from
//! corner `i` to corner `i + 1` of quad `q`. A valid pattern pairs every
//! dart with exactly one reversed twin in another quad.

mod canonical;

use std::collections::HashMap;

use thiserror::Error;

use crate::hexmodel::{HexComplex, VertexId};

pub use canonical::{canonical_code, isomorphic, CanonicalCode, CodeParseError};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PatternError {
    #[error("pattern has no quads")]
    Empty,
    #[error("quad {quad} repeats a vertex id")]
    DegenerateQuad { quad: usize },
    #[error("edge {a}-{b} lies in {count} quads")]
    NonManifoldEdge { a: VertexId, b: VertexId, count: usize },
    #[error("edge {a}-{b} is traversed in the same direction by two quads")]
    InconsistentOrientation { a: VertexId, b: VertexId },
    #[error("vertex {vertex} has more than one fan of quads around it")]
    PinchedVertex { vertex: VertexId },
    #[error("pattern splits into {components} components")]
    Disconnected { components: usize },
}

#[derive(Clone, Debug)]
pub struct SurfacePattern {
    quads: Vec<[VertexId; 4]>,
    twin: Vec<u32>,
    /// Dense index of the origin vertex of each dart.
    origin: Vec<u32>,
    /// Dense index to vertex id, ascending.
    vertices: Vec<VertexId>,
}

#[inline]
pub(crate) fn next_dart(d: u32) -> u32 {
    (d & !3) | ((d + 1) & 3)
}

#[inline]
pub(crate) fn prev_dart(d: u32) -> u32 {
    (d & !3) | ((d + 3) & 3)
}

/// Validates the closed-manifold conditions without building a pattern.
pub fn check_closed_manifold(quads: &[[VertexId; 4]]) -> Result<(), PatternError> {
    build_pattern(quads.to_vec()).map(|_| ())
}

/// Builds a pattern and checks that it is a connected, consistently
/// oriented closed 2-manifold.
pub fn build_pattern(quads: Vec<[VertexId; 4]>) -> Result<SurfacePattern, PatternError> {
    if quads.is_empty() {
        return Err(PatternError::Empty);
    }
    let mut vertices: Vec<VertexId> = quads.iter().flatten().copied().collect();
    vertices.sort_unstable();
    vertices.dedup();
    let dense: HashMap<VertexId, u32> = vertices.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();

    let mut directed: HashMap<(VertexId, VertexId), u32> = HashMap::with_capacity(quads.len() * 4);
    let mut undirected: HashMap<(VertexId, VertexId), usize> = HashMap::with_capacity(quads.len() * 2);
    let mut origin = Vec::with_capacity(quads.len() * 4);
    for (q, quad) in quads.iter().enumerate() {
        let mut sorted = *quad;
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(PatternError::DegenerateQuad { quad: q });
        }
        for i in 0..4 {
            let (a, b) = (quad[i], quad[(i + 1) % 4]);
            origin.push(dense[&a]);
            *undirected.entry((a.min(b), a.max(b))).or_default() += 1;
            if directed.insert((a, b), (4 * q + i) as u32).is_some() {
                // Resolved below: either too many quads or a same-direction pair.
                directed.insert((a, b), u32::MAX);
            }
        }
    }
    let mut edges: Vec<_> = undirected.into_iter().collect();
    edges.sort_unstable();
    for ((a, b), count) in edges {
        if count != 2 {
            return Err(PatternError::NonManifoldEdge { a, b, count });
        }
        if !directed.contains_key(&(a, b)) || !directed.contains_key(&(b, a)) {
            return Err(PatternError::InconsistentOrientation { a, b });
        }
    }

    let mut twin = vec![0u32; quads.len() * 4];
    for (q, quad) in quads.iter().enumerate() {
        for i in 0..4 {
            twin[4 * q + i] = directed[&(quad[(i + 1) % 4], quad[i])];
        }
    }

    let pattern = SurfacePattern { quads, twin, origin, vertices };
    pattern.check_vertex_fans()?;
    pattern.check_connected()?;
    Ok(pattern)
}

impl SurfacePattern {
    pub fn quads(&self) -> &[[VertexId; 4]] {
        &self.quads
    }

    pub fn quad_count(&self) -> usize {
        self.quads.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.quads.len() * 2
    }

    /// Vertex ids used by the pattern, ascending.
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.quad_count() as i64
    }

    /// The same surface with every quad reversed.
    pub fn mirrored(&self) -> SurfacePattern {
        build_pattern(self.quads.iter().map(|&[a, b, c, d]| [a, d, c, b]).collect())
            .expect("mirror of a valid pattern is valid")
    }

    /// Applies a vertex relabelling. `map` must be injective on the
    /// pattern's vertices.
    pub fn relabel(&self, map: impl Fn(VertexId) -> VertexId) -> SurfacePattern {
        build_pattern(self.quads.iter().map(|q| q.map(&map)).collect()).expect("relabelling must be injective")
    }

    pub(crate) fn dart_count(&self) -> usize {
        self.twin.len()
    }

    pub(crate) fn twin(&self, d: u32) -> u32 {
        self.twin[d as usize]
    }

    pub(crate) fn origin(&self, d: u32) -> u32 {
        self.origin[d as usize]
    }

    pub(crate) fn dense_vertex(&self, dense: u32) -> VertexId {
        self.vertices[dense as usize]
    }

    fn check_vertex_fans(&self) -> Result<(), PatternError> {
        let mut darts_at = vec![0usize; self.vertices.len()];
        for &o in &self.origin {
            darts_at[o as usize] += 1;
        }
        let mut seen = vec![false; self.vertices.len()];
        for d in 0..self.dart_count() as u32 {
            let v = self.origin(d) as usize;
            if seen[v] {
                continue;
            }
            seen[v] = true;
            // Rotate around the origin: the dart entering v in this quad,
            // then its twin leaving v in the neighbouring quad.
            let mut fan = 1;
            let mut e = self.twin(prev_dart(d));
            while e != d {
                fan += 1;
                e = self.twin(prev_dart(e));
            }
            if fan != darts_at[v] {
                return Err(PatternError::PinchedVertex { vertex: self.vertices[v] });
            }
        }
        Ok(())
    }

    fn check_connected(&self) -> Result<(), PatternError> {
        let n = self.quads.len();
        let mut component = vec![usize::MAX; n];
        let mut components = 0;
        for start in 0..n {
            if component[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            component[start] = components;
            while let Some(q) = stack.pop() {
                for i in 0..4 {
                    let r = (self.twin[4 * q + i] / 4) as usize;
                    if component[r] == usize::MAX {
                        component[r] = components;
                        stack.push(r);
                    }
                }
            }
            components += 1;
        }
        if components > 1 {
            Err(PatternError::Disconnected { components })
        } else {
            Ok(())
        }
    }
}

pub fn euler_characteristic(p: &SurfacePattern) -> i64 {
    p.euler_characteristic()
}

/// Boundary of a single hex with corners `0..8`.
pub fn cube_pattern() -> SurfacePattern {
    let complex = HexComplex::single();
    build_pattern(complex.boundary_quads()).expect("cube boundary is valid")
}

/// Base corners of the pyramid, counter-clockwise seen from the apex.
pub const PYRAMID_BASE: [VertexId; 4] = [1, 8, 17, 11];
/// Midpoint of the base edge from `PYRAMID_BASE[i]` to `PYRAMID_BASE[i + 1]`.
pub const PYRAMID_BASE_MIDPOINTS: [VertexId; 4] = [2, 12, 13, 4];
/// Midpoint of the slanted edge from the apex to `PYRAMID_BASE[i]`.
pub const PYRAMID_APEX_MIDPOINTS: [VertexId; 4] = [0, 7, 15, 10];
/// Centre of the side triangle over base edge `i`.
pub const PYRAMID_SIDE_CENTRES: [VertexId; 4] = [3, 14, 16, 5];
pub const PYRAMID_BASE_CENTRE: VertexId = 6;
pub const PYRAMID_APEX: VertexId = 9;

/// Boundary of a pyramid after the hex/tet refinement of a hex-dominant
/// mesh: the base is split into 4 quads around its centre and each side
/// triangle into 3 quads around its centre. 18 vertices, 16 quads.
///
/// Vertex ids follow the numbering of the bundled 36-hex solution, so the
/// pattern can be compared against it directly.
pub fn pyramid16_pattern() -> SurfacePattern {
    let (b, m, e, s) = (PYRAMID_BASE, PYRAMID_BASE_MIDPOINTS, PYRAMID_APEX_MIDPOINTS, PYRAMID_SIDE_CENTRES);
    let mut quads = Vec::with_capacity(16);
    for i in 0..4 {
        let j = (i + 1) % 4;
        let h = (i + 3) % 4;
        quads.push([b[i], m[h], PYRAMID_BASE_CENTRE, m[i]]);
        quads.push([b[i], m[i], s[i], e[i]]);
        quads.push([b[j], e[j], s[i], m[i]]);
        quads.push([PYRAMID_APEX, e[i], s[i], e[j]]);
    }
    build_pattern(quads).expect("pyramid pattern is valid")
}
