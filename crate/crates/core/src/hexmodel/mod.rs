//! Topological hexahedral complexes.
//!
//! A hexahedron is an ordered 8-tuple of vertex ids. Corners `0..4` form one
//! quad and `4..8` the opposite quad, with corner `k` joined to `k + 4`.
//! The six faces are the cycles listed in [`HEX_FACES`]; in that listing
//! every face is traversed so that its right-hand normal points into the
//! hex. Two hexes sharing a face therefore list it in opposite cyclic
//! orders, and a boundary face is oriented outward by reversing it.

mod subdivide;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::surface::{self, PatternError, SurfacePattern};

pub use subdivide::{subdivide_hex, subdivide_tet, TetError};

pub type VertexId = u32;

/// Corner cycles of the six faces, each oriented into the hex.
pub const HEX_FACES: [[usize; 4]; 6] = [
    [0, 1, 2, 3],
    [4, 7, 6, 5],
    [0, 4, 5, 1],
    [1, 5, 6, 2],
    [2, 6, 7, 3],
    [3, 7, 4, 0],
];

/// The twelve edges of a hex as corner pairs.
pub const HEX_EDGES: [[usize; 2]; 12] = [
    [0, 1],
    [1, 2],
    [2, 3],
    [3, 0],
    [4, 5],
    [5, 6],
    [6, 7],
    [7, 4],
    [0, 4],
    [1, 5],
    [2, 6],
    [3, 7],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hexahedron(pub [VertexId; 8]);

impl Hexahedron {
    pub fn corners(&self) -> &[VertexId; 8] {
        &self.0
    }

    /// Face `f` as listed in [`HEX_FACES`] (oriented into the hex).
    pub fn face(&self, f: usize) -> [VertexId; 4] {
        HEX_FACES[f].map(|c| self.0[c])
    }

    /// Face `f` oriented out of the hex.
    pub fn outward_face(&self, f: usize) -> [VertexId; 4] {
        let [a, b, c, d] = self.face(f);
        [a, d, c, b]
    }

    pub fn is_degenerate(&self) -> bool {
        let mut sorted = self.0;
        sorted.sort_unstable();
        sorted.windows(2).any(|w| w[0] == w[1])
    }

    fn sorted_vertices(&self) -> [VertexId; 8] {
        let mut sorted = self.0;
        sorted.sort_unstable();
        sorted
    }
}

/// A quad face identified up to rotation and reversal of its cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadFaceKey([VertexId; 4]);

impl QuadFaceKey {
    pub fn new(cycle: [VertexId; 4]) -> Self {
        Self::oriented(cycle).0
    }

    /// Returns the key together with `true` when `cycle` runs in the same
    /// direction as the stored representative.
    pub fn oriented(cycle: [VertexId; 4]) -> (Self, bool) {
        let start = (0..4).min_by_key(|&i| cycle[i]).unwrap();
        let at = |k: usize| cycle[(start + k) % 4];
        if at(1) < at(3) {
            (QuadFaceKey([at(0), at(1), at(2), at(3)]), true)
        } else {
            (QuadFaceKey([at(0), at(3), at(2), at(1)]), false)
        }
    }

    pub fn cycle(&self) -> [VertexId; 4] {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(count: usize) -> Self {
        if count % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Odd => Parity::Even,
            Parity::Even => Parity::Odd,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Odd => f.write_str("odd"),
            Parity::Even => f.write_str("even"),
        }
    }
}

/// Validation failures of a hex complex. The same type is used for the
/// violation list of a [`ConformityReport`].
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum HexError {
    #[error("hex {hex} references vertex {vertex}, but the complex has {vertex_count} vertices")]
    IndexOutOfRange { hex: usize, vertex: VertexId, vertex_count: usize },
    #[error("hex {hex} repeats a vertex id")]
    DegenerateHex { hex: usize },
    #[error("vertex {vertex} is not used by any hex")]
    UnusedVertex { vertex: VertexId },
    #[error("hexes {first} and {second} have the same vertex set")]
    DuplicateHex { first: usize, second: usize },
    #[error("face {face:?} is shared non-conformingly by hexes {hexes:?}")]
    NonConformingFace { face: [VertexId; 4], hexes: Vec<usize> },
    #[error("hexes {first} and {second} share {shared} faces")]
    SharedFaceCountExceeded { first: usize, second: usize, shared: usize },
    #[error("boundary is not a closed manifold: {0}")]
    NonManifoldBoundary(PatternError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HexComplex {
    vertex_count: usize,
    hexes: Vec<Hexahedron>,
}

/// Builds and validates a complex from raw 8-tuples.
pub fn build_complex(hexes: &[[VertexId; 8]], vertex_count: usize) -> Result<HexComplex, HexError> {
    HexComplex::new(vertex_count, hexes.iter().copied().map(Hexahedron).collect())
}

impl HexComplex {
    pub fn new(vertex_count: usize, hexes: Vec<Hexahedron>) -> Result<Self, HexError> {
        let complex = Self::from_raw(vertex_count, hexes);
        match check_conformity(&complex).violations.into_iter().next() {
            Some(err) => Err(err),
            None => Ok(complex),
        }
    }

    /// Wraps the data without validation; [`check_conformity`] reports
    /// what is wrong with it.
    pub fn from_raw(vertex_count: usize, hexes: Vec<Hexahedron>) -> Self {
        HexComplex { vertex_count, hexes }
    }

    pub fn single() -> Self {
        Self::from_raw(8, vec![Hexahedron([0, 1, 2, 3, 4, 5, 6, 7])])
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn hexes(&self) -> &[Hexahedron] {
        &self.hexes
    }

    pub fn len(&self) -> usize {
        self.hexes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hexes.is_empty()
    }

    pub fn parity(&self) -> Parity {
        hex_parity(self)
    }

    pub fn raw_hexes(&self) -> Vec<[VertexId; 8]> {
        self.hexes.iter().map(|h| h.0).collect()
    }

    /// Every face with the hexes incident to it, as `(hex, face slot)`.
    pub fn face_incidence(&self) -> HashMap<QuadFaceKey, Vec<(usize, usize)>> {
        let mut table: HashMap<QuadFaceKey, Vec<(usize, usize)>> = HashMap::new();
        for (h, hex) in self.hexes.iter().enumerate() {
            for f in 0..6 {
                table.entry(QuadFaceKey::new(hex.face(f))).or_default().push((h, f));
            }
        }
        table
    }

    /// Boundary faces oriented outward, ordered by `(hex, face slot)`.
    pub fn boundary_quads(&self) -> Vec<[VertexId; 4]> {
        let table = self.face_incidence();
        let mut quads = Vec::new();
        for hex in &self.hexes {
            for f in 0..6 {
                if table[&QuadFaceKey::new(hex.face(f))].len() == 1 {
                    quads.push(hex.outward_face(f));
                }
            }
        }
        quads
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConformityReport {
    pub hex_count: usize,
    pub vertex_count: usize,
    /// Number of distinct faces by incidence count.
    pub face_histogram: BTreeMap<usize, usize>,
    pub violations: Vec<HexError>,
}

impl ConformityReport {
    pub fn is_conforming(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every complex invariant and reports all violations found.
///
/// Boundary manifoldness is only examined when the face-level checks pass,
/// since a non-conforming face table has no well-defined boundary.
pub fn check_conformity(c: &HexComplex) -> ConformityReport {
    let mut report = ConformityReport {
        hex_count: c.hexes.len(),
        vertex_count: c.vertex_count,
        ..Default::default()
    };
    let violations = &mut report.violations;

    let mut used = vec![false; c.vertex_count];
    let mut indices_ok = true;
    for (h, hex) in c.hexes.iter().enumerate() {
        for &v in hex.corners() {
            match used.get_mut(v as usize) {
                Some(slot) => *slot = true,
                None => {
                    indices_ok = false;
                    violations.push(HexError::IndexOutOfRange {
                        hex: h,
                        vertex: v,
                        vertex_count: c.vertex_count,
                    });
                }
            }
        }
        if hex.is_degenerate() {
            violations.push(HexError::DegenerateHex { hex: h });
        }
    }
    if !indices_ok || !violations.is_empty() {
        return report;
    }
    for (v, &u) in used.iter().enumerate() {
        if !u {
            violations.push(HexError::UnusedVertex { vertex: v as VertexId });
        }
    }

    let mut by_vertex_set: HashMap<[VertexId; 8], usize> = HashMap::new();
    for (h, hex) in c.hexes.iter().enumerate() {
        if let Some(&first) = by_vertex_set.get(&hex.sorted_vertices()) {
            violations.push(HexError::DuplicateHex { first, second: h });
        } else {
            by_vertex_set.insert(hex.sorted_vertices(), h);
        }
    }

    let table = c.face_incidence();
    let mut pair_shares: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut bad_faces: Vec<(QuadFaceKey, Vec<usize>)> = Vec::new();
    for (key, entries) in &table {
        *report.face_histogram.entry(entries.len()).or_default() += 1;
        let hexes: Vec<usize> = entries.iter().map(|&(h, _)| h).collect();
        match entries.as_slice() {
            [_] => {}
            [(ha, fa), (hb, fb)] => {
                let (_, fwd_a) = QuadFaceKey::oriented(c.hexes[*ha].face(*fa));
                let (_, fwd_b) = QuadFaceKey::oriented(c.hexes[*hb].face(*fb));
                if fwd_a == fwd_b || ha == hb {
                    bad_faces.push((*key, hexes));
                } else {
                    *pair_shares.entry(((*ha).min(*hb), (*ha).max(*hb))).or_default() += 1;
                }
            }
            _ => bad_faces.push((*key, hexes)),
        }
    }
    bad_faces.sort();
    for (key, hexes) in bad_faces {
        violations.push(HexError::NonConformingFace { face: key.cycle(), hexes });
    }
    for (&(first, second), &shared) in &pair_shares {
        if shared > 1 {
            violations.push(HexError::SharedFaceCountExceeded { first, second, shared });
        }
    }

    if violations.is_empty() {
        if let Err(err) = surface::check_closed_manifold(&c.boundary_quads()) {
            violations.push(HexError::NonManifoldBoundary(err));
        }
    }
    report
}

/// The boundary of a valid complex as an outward-oriented pattern.
pub fn extract_boundary(c: &HexComplex) -> Result<SurfacePattern, HexError> {
    surface::build_pattern(c.boundary_quads()).map_err(HexError::NonManifoldBoundary)
}

/// Splits `0..vertex_count` into vertices on the boundary and the rest.
pub fn classify_vertices(c: &HexComplex) -> (Vec<VertexId>, Vec<VertexId>) {
    let mut on_boundary = vec![false; c.vertex_count];
    for quad in c.boundary_quads() {
        for v in quad {
            on_boundary[v as usize] = true;
        }
    }
    (0..c.vertex_count as VertexId).partition(|&v| on_boundary[v as usize])
}

pub fn hex_parity(c: &HexComplex) -> Parity {
    Parity::of(c.hexes.len())
}
