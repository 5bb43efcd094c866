//! Refinement of hexes (1 → 8) and tetrahedra (1 → 4 hexes).

use std::collections::HashMap;

use thiserror::Error;

use super::{HexComplex, HexError, Hexahedron, VertexId};

/// Lattice coordinates of the corners in the local hex frame.
const CORNER_LATTICE: [[u8; 3]; 8] = [
    [0, 0, 0],
    [1, 0, 0],
    [1, 1, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 0, 1],
    [1, 1, 1],
    [0, 1, 1],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum NewVertex {
    Edge([VertexId; 2]),
    Face([VertexId; 4]),
    Cell(usize),
}

#[derive(Default)]
struct VertexAllocator {
    next: VertexId,
    ids: HashMap<NewVertex, VertexId>,
}

impl VertexAllocator {
    fn get(&mut self, key: NewVertex) -> VertexId {
        let next = &mut self.next;
        *self.ids.entry(key).or_insert_with(|| {
            let id = *next;
            *next += 1;
            id
        })
    }
}

fn sorted<const N: usize>(mut ids: [VertexId; N]) -> [VertexId; N] {
    ids.sort_unstable();
    ids
}

/// Splits every hex into 8 through its edge midpoints, face centres and
/// body centre. Midpoints and centres on shared entities are shared.
pub fn subdivide_hex(c: &HexComplex) -> HexComplex {
    let mut alloc = VertexAllocator { next: c.vertex_count() as VertexId, ..Default::default() };
    let mut hexes = Vec::with_capacity(c.len() * 8);
    for (h, hex) in c.hexes().iter().enumerate() {
        // Vertex at lattice point p in {0,1,2}^3 of this hex.
        let mut lattice = |p: [u8; 3]| -> VertexId {
            let span: Vec<usize> = (0..8)
                .filter(|&k| (0..3).all(|a| p[a] == 1 || CORNER_LATTICE[k][a] * 2 == p[a]))
                .collect();
            let ids: Vec<VertexId> = span.iter().map(|&k| hex.0[k]).collect();
            match ids.len() {
                1 => ids[0],
                2 => alloc.get(NewVertex::Edge(sorted([ids[0], ids[1]]))),
                4 => alloc.get(NewVertex::Face(sorted([ids[0], ids[1], ids[2], ids[3]]))),
                _ => alloc.get(NewVertex::Cell(h)),
            }
        };
        for octant in CORNER_LATTICE {
            let corners = CORNER_LATTICE.map(|k| lattice([octant[0] + k[0], octant[1] + k[1], octant[2] + k[2]]));
            hexes.push(Hexahedron(corners));
        }
    }
    HexComplex::from_raw(alloc.next as usize, hexes)
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TetError {
    #[error("tet {tet} references vertex {vertex} outside 0..{vertex_count}")]
    IndexOutOfRange { tet: usize, vertex: VertexId, vertex_count: usize },
    #[error("tet {tet} repeats a vertex id")]
    Degenerate { tet: usize },
    #[error("triangle {triangle:?} is shared non-conformingly by tets {tets:?}")]
    NonConformingInput { triangle: [VertexId; 3], tets: Vec<usize> },
    #[error("refined complex is invalid: {0}")]
    Refined(HexError),
}

/// Splits every tetrahedron into four hexes, one per corner, through edge
/// midpoints, triangle centres and the body centre.
///
/// Tets sharing a triangle must traverse it in opposite orders.
pub fn subdivide_tet(tets: &[[VertexId; 4]], vertex_count: usize) -> Result<HexComplex, TetError> {
    let mut triangles: HashMap<[VertexId; 3], Vec<(usize, bool)>> = HashMap::new();
    for (t, tet) in tets.iter().enumerate() {
        for &v in tet {
            if v as usize >= vertex_count {
                return Err(TetError::IndexOutOfRange { tet: t, vertex: v, vertex_count });
            }
        }
        if sorted(*tet).windows(2).any(|w| w[0] == w[1]) {
            return Err(TetError::Degenerate { tet: t });
        }
        let [a, b, c, d] = *tet;
        // Faces oriented consistently with the corner order.
        for tri in [[a, c, b], [a, b, d], [b, c, d], [a, d, c]] {
            triangles.entry(sorted(tri)).or_default().push((t, is_even_rotation_of_sorted(tri)));
        }
    }
    let mut bad: Vec<([VertexId; 3], Vec<usize>)> = triangles
        .iter()
        .filter(|(_, inc)| inc.len() > 2 || (inc.len() == 2 && inc[0].1 == inc[1].1))
        .map(|(tri, inc)| (*tri, inc.iter().map(|&(t, _)| t).collect()))
        .collect();
    bad.sort();
    if let Some((triangle, tets)) = bad.into_iter().next() {
        return Err(TetError::NonConformingInput { triangle, tets });
    }

    let mut alloc = VertexAllocator { next: vertex_count as VertexId, ..Default::default() };
    let mut hexes = Vec::with_capacity(tets.len() * 4);
    for (t, &[a, b, c, d]) in tets.iter().enumerate() {
        // Even permutations keep the orientation of each corner hex.
        for [p, q, r, s] in [[a, b, c, d], [b, c, a, d], [c, a, b, d], [d, b, a, c]] {
            let edge = |alloc: &mut VertexAllocator, x, y| alloc.get(NewVertex::Edge(sorted([x, y])));
            let face = |alloc: &mut VertexAllocator, x, y, z| {
                let key = sorted([x, y, z]);
                alloc.get(NewVertex::Face([key[0], key[1], key[2], key[2]]))
            };
            let pq = edge(&mut alloc, p, q);
            let pr = edge(&mut alloc, p, r);
            let ps = edge(&mut alloc, p, s);
            let pqr = face(&mut alloc, p, q, r);
            let pqs = face(&mut alloc, p, q, s);
            let prs = face(&mut alloc, p, r, s);
            let centre = alloc.get(NewVertex::Cell(t));
            hexes.push(Hexahedron([p, pq, pqr, pr, ps, pqs, centre, prs]));
        }
    }
    let complex = HexComplex::from_raw(alloc.next as usize, hexes);
    let report = super::check_conformity(&complex);
    match report.violations.into_iter().next() {
        Some(err) => Err(TetError::Refined(err)),
        None => Ok(complex),
    }
}

fn is_even_rotation_of_sorted(tri: [VertexId; 3]) -> bool {
    let s = sorted(tri);
    (0..3).any(|r| [tri[r], tri[(r + 1) % 3], tri[(r + 2) % 3]] == s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hexmodel::{build_complex, check_conformity, extract_boundary};

    #[test]
    fn one_hex_becomes_a_lattice() {
        let c = build_complex(&[[0, 1, 2, 3, 4, 5, 6, 7]], 8).unwrap();
        let fine = subdivide_hex(&c);
        assert_eq!(fine.len(), 8);
        assert_eq!(fine.vertex_count(), 27);
        assert!(check_conformity(&fine).is_conforming());
        assert_eq!(extract_boundary(&fine).unwrap().quad_count(), 24);
    }

    #[test]
    fn two_hex_block_stays_conforming() {
        let c = build_complex(&[[0, 1, 2, 3, 4, 5, 6, 7], [4, 5, 6, 7, 8, 9, 10, 11]], 12).unwrap();
        let fine = subdivide_hex(&c);
        assert_eq!(fine.len(), 16);
        let report = check_conformity(&fine);
        assert!(report.is_conforming(), "{:?}", report.violations);
        assert_eq!(extract_boundary(&fine).unwrap().quad_count(), 4 * 10);
        // 3 x 3 x 5 lattice
        assert_eq!(fine.vertex_count(), 45);
    }

    #[test]
    fn single_tet_gives_four_hexes() {
        let c = subdivide_tet(&[[0, 1, 2, 3]], 4).unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(c.vertex_count(), 15);
        assert_eq!(extract_boundary(&c).unwrap().quad_count(), 12);
    }

    #[test]
    fn face_sharing_tets_give_a_conforming_complex() {
        // (0,1,2,3) and (1,0,2,4) share triangle {0,1,2} with opposite orientation.
        let c = subdivide_tet(&[[0, 1, 2, 3], [1, 0, 2, 4]], 5).unwrap();
        assert_eq!(c.len(), 8);
        assert!(check_conformity(&c).is_conforming());
        assert_eq!(extract_boundary(&c).unwrap().quad_count(), 18);
    }

    #[test]
    fn inconsistently_oriented_tets_are_rejected() {
        let err = subdivide_tet(&[[0, 1, 2, 3], [0, 1, 2, 4]], 5).unwrap_err();
        assert!(matches!(err, TetError::NonConformingInput { .. }), "{err:?}");
    }

    #[test]
    fn triangle_shared_by_three_tets_is_rejected() {
        let err = subdivide_tet(&[[0, 1, 2, 3], [1, 0, 2, 4], [1, 0, 2, 5]], 6).unwrap_err();
        assert!(matches!(err, TetError::NonConformingInput { ref tets, .. } if tets.len() == 3));
    }
}
