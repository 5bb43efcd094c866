//! Brute-force layer enumeration for cross-checking the search.
//!
//! The oracle knows nothing about glue configurations, placements or
//! surface codes while it enumerates: it puts the bottom face of a new hex
//! on every boundary quad in every rotation, lets each top corner be any
//! existing vertex or a fresh one, and keeps whatever passes full complex
//! validation with a sphere boundary. Every packing is kept; only complexes
//! that are identical up to relabelling (an orientation-preserving
//! isomorphism of the hexes themselves) are merged. Surface codes are
//! computed afterwards to collapse the result.

use std::collections::{BTreeMap, HashMap, HashSet};

use hexpack::hexmodel::{extract_boundary, QuadFaceKey, HEX_FACES};
use hexpack::{build_complex, canonical_code, CanonicalCode, HexComplex, VertexId};

const FRESH: VertexId = VertexId::MAX;

/// The 24 rotations of the cube as corner permutations, generated from
/// two quarter turns acting on unit-cube corner positions.
fn rotations() -> Vec<[usize; 8]> {
    let pos = |k: usize| -> [i32; 3] {
        let (x, y) = [(0, 0), (1, 0), (1, 1), (0, 1)][k % 4];
        [x, y, (k / 4) as i32]
    };
    let index = |p: [i32; 3]| (0..8).find(|&k| pos(k) == p).expect("corner");
    let turn_z = |k: usize| {
        let [x, y, z] = pos(k);
        index([1 - y, x, z])
    };
    let turn_x = |k: usize| {
        let [x, y, z] = pos(k);
        index([x, 1 - z, y])
    };
    let gens: [[usize; 8]; 2] = [std::array::from_fn(turn_z), std::array::from_fn(turn_x)];
    let mut group: Vec<[usize; 8]> = vec![std::array::from_fn(|k| k)];
    let mut i = 0;
    while i < group.len() {
        for g in &gens {
            let composed: [usize; 8] = std::array::from_fn(|k| g[group[i][k]]);
            if !group.contains(&composed) {
                group.push(composed);
            }
        }
        i += 1;
    }
    assert_eq!(group.len(), 24);
    group
}

/// Relabelling-invariant form of a face-connected complex: the smallest
/// breadth-first listing of hex corners over every starting hex and
/// rotation. Neighbours are entered through the shared face, which fixes
/// their rotation.
pub fn complex_form(c: &HexComplex, rots: &[[usize; 8]]) -> Vec<u32> {
    let hexes = c.raw_hexes();
    let incidence = c.face_incidence();
    let mut best: Option<Vec<u32>> = None;
    for start in 0..hexes.len() {
        for rot in rots {
            let mut labels: HashMap<VertexId, u32> = HashMap::new();
            let mut form = Vec::with_capacity(hexes.len() * 8);
            let mut seen = vec![false; hexes.len()];
            let mut queue = std::collections::VecDeque::from([(start, *rot)]);
            seen[start] = true;
            while let Some((h, r)) = queue.pop_front() {
                let corners: [VertexId; 8] = std::array::from_fn(|k| hexes[h][r[k]]);
                for v in corners {
                    let next = labels.len() as u32;
                    form.push(*labels.entry(v).or_insert(next));
                }
                for face in HEX_FACES {
                    let cycle = face.map(|k| corners[k]);
                    let Some(owners) = incidence.get(&QuadFaceKey::new(cycle)) else { continue };
                    for &(n, _) in owners {
                        if seen[n] {
                            continue;
                        }
                        seen[n] = true;
                        let entry = rots
                            .iter()
                            .find(|t| {
                                let first: [VertexId; 4] = std::array::from_fn(|k| hexes[n][t[HEX_FACES[0][k]]]);
                                first[0] == cycle[0] && QuadFaceKey::new(first) == QuadFaceKey::new(cycle)
                            })
                            .expect("a rotation enters through the shared face");
                        queue.push_back((n, *entry));
                    }
                }
            }
            if best.as_ref().is_none_or(|b| form < *b) {
                best = Some(form);
            }
        }
    }
    best.expect("nonempty complex")
}

fn edge(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    (a.min(b), a.max(b))
}

/// Every valid complex with one more hex sharing at least its bottom face.
pub fn naive_successors(c: &HexComplex) -> Vec<HexComplex> {
    let n = c.vertex_count() as VertexId;
    let base = c.raw_hexes();
    let surface = c.boundary_quads();
    let on_surface: HashSet<QuadFaceKey> = surface.iter().map(|&q| QuadFaceKey::new(q)).collect();
    let surface_edges: HashSet<(VertexId, VertexId)> =
        surface.iter().flat_map(|q| (0..4).map(move |i| edge(q[i], q[(i + 1) % 4]))).collect();
    let mut choices: Vec<VertexId> = (0..n).collect();
    choices.push(FRESH);
    let mut out = Vec::new();
    let mut delta: HashMap<(VertexId, VertexId), i32> = HashMap::new();
    for quad in &surface {
        for r in 0..4 {
            let bottom: [VertexId; 4] = std::array::from_fn(|i| quad[(i + r) % 4]);
            for &a in &choices {
                for &b in &choices {
                    for &d in &choices {
                        for &e in &choices {
                            let mut corners = [bottom[0], bottom[1], bottom[2], bottom[3], a, b, d, e];
                            let mut next = n;
                            for v in &mut corners[4..] {
                                if *v == FRESH {
                                    *v = next;
                                    next += 1;
                                }
                            }
                            let mut sorted = corners;
                            sorted.sort_unstable();
                            if sorted.windows(2).any(|w| w[0] == w[1]) {
                                continue;
                            }
                            // Necessary condition: every edge of the new
                            // boundary lies in exactly two of its quads.
                            delta.clear();
                            for face in HEX_FACES {
                                let cycle = face.map(|k| corners[k]);
                                let sign = if on_surface.contains(&QuadFaceKey::new(cycle)) { -1 } else { 1 };
                                for i in 0..4 {
                                    *delta.entry(edge(cycle[i], cycle[(i + 1) % 4])).or_default() += sign;
                                }
                            }
                            let edges_ok = delta.iter().all(|(e, &dc)| {
                                let count = if surface_edges.contains(e) { 2 } else { 0 } + dc;
                                count == 0 || count == 2
                            });
                            if !edges_ok {
                                continue;
                            }
                            let mut hexes = base.clone();
                            hexes.push(corners);
                            let Ok(grown) = build_complex(&hexes, next as usize) else {
                                continue;
                            };
                            let boundary = extract_boundary(&grown).expect("validated");
                            if boundary.euler_characteristic() == 2 {
                                out.push(grown);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Result of enumerating every packing up to some hex count.
pub struct OracleLayers {
    /// Codes whose smallest packing of the layer's parity has exactly that
    /// many hexes, per layer from 1.
    pub layers: Vec<Vec<CanonicalCode>>,
    /// Non-isomorphic complexes per layer.
    pub complexes: Vec<usize>,
}

pub fn oracle_layers(max: usize, reflection: bool) -> OracleLayers {
    let rots = rotations();
    let code_of = |c: &HexComplex| canonical_code(&extract_boundary(c).expect("valid complex"), reflection);
    let mut frontier: Vec<HexComplex> = vec![HexComplex::single()];
    let mut first: BTreeMap<(CanonicalCode, usize), usize> = BTreeMap::new();
    let mut complexes = vec![1];
    for n in 1..=max {
        if n > 1 {
            let mut next: BTreeMap<Vec<u32>, HexComplex> = BTreeMap::new();
            for c in &frontier {
                for grown in naive_successors(c) {
                    next.entry(complex_form(&grown, &rots)).or_insert(grown);
                }
            }
            frontier = next.into_values().collect();
            complexes.push(frontier.len());
        }
        for c in &frontier {
            first.entry((code_of(c), n % 2)).or_insert(n);
        }
    }
    let layers = (1..=max)
        .map(|n| first.iter().filter(|(&(_, p), &m)| p == n % 2 && m == n).map(|((c, _), _)| c.clone()).collect())
        .collect();
    OracleLayers { layers, complexes }
}
