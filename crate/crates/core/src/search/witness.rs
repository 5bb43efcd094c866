use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::hexmodel::{HexComplex, VertexId, HEX_FACES};
use crate::moves::{config_of_mask, MoveError, MoveRules, Packing, Placement, PlacementParseError};

/// Moves that grow a packing from the single hex, in order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Witness(pub Vec<Placement>);

impl Witness {
    /// Number of hexes in the packing it builds.
    pub fn hex_count(&self) -> usize {
        self.0.len() + 1
    }

    pub fn extended(&self, pl: Placement) -> Witness {
        let mut moves = Vec::with_capacity(self.0.len() + 1);
        moves.extend_from_slice(&self.0);
        moves.push(pl);
        Witness(moves)
    }
}

/// `-` for the empty witness, otherwise placements joined by `;`.
impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("-");
        }
        for (i, pl) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{pl}")?;
        }
        Ok(())
    }
}

impl FromStr for Witness {
    type Err = PlacementParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "-" {
            return Ok(Witness::default());
        }
        s.split(';').map(str::parse).collect::<Result<_, _>>().map(Witness)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("move {step} of the witness failed: {error}")]
pub struct ReplayError {
    /// 0-based index of the failing placement.
    pub step: usize,
    pub error: MoveError,
}

/// Rebuilds the packing a witness describes, validating every step.
pub fn replay_witness(w: &Witness, rules: &MoveRules) -> Result<Packing, ReplayError> {
    let mut packing = Packing::single();
    for (step, pl) in w.0.iter().enumerate() {
        packing = packing.apply(pl, rules).map_err(|error| ReplayError { step, error })?;
    }
    Ok(packing)
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GrowOrderError {
    #[error("no order of the hexes is a sequence of legal moves")]
    NoOrderFound,
    #[error("the complex has no hexes")]
    Empty,
}

/// An order in which a complex can be built move by move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowOrder {
    pub order: Vec<usize>,
    pub witness: Witness,
    /// Vertex of the original complex to vertex of the replayed packing.
    pub vertex_map: HashMap<VertexId, VertexId>,
}

struct GrowSearch<'a> {
    complex: &'a HexComplex,
    rules: &'a MoveRules,
    /// Hexes sharing a face with each hex, with the face slot on this side.
    neighbours: Vec<Vec<(usize, usize)>>,
    failed: HashSet<Vec<u64>>,
}

fn bit(set: &[u64], i: usize) -> bool {
    set[i / 64] & (1 << (i % 64)) != 0
}

impl GrowSearch<'_> {
    /// Placement that adds hex `h` to `packing`, if the glue pattern of `h`
    /// against the placed hexes is a legal move.
    fn placement(&self, h: usize, placed: &[u64], packing: &Packing, map: &HashMap<VertexId, VertexId>) -> Option<Placement> {
        let hex = &self.complex.hexes()[h];
        let mut mask = 0u8;
        for &(other, f) in &self.neighbours[h] {
            if bit(placed, other) {
                mask |= 1 << f;
            }
        }
        let config = config_of_mask(mask)?;
        // Every corner already present must be pinned by a glued face.
        let glued_corners: HashSet<usize> =
            (0..6).filter(|f| mask & (1 << f) != 0).flat_map(|f| HEX_FACES[f]).collect();
        for (k, v) in hex.corners().iter().enumerate() {
            if map.contains_key(v) && !glued_corners.contains(&k) {
                return None;
            }
        }
        let mut glued = Vec::new();
        for f in (0..6).filter(|f| mask & (1 << f) != 0) {
            let cycle = hex.face(f).map(|v| map[&v]);
            let q = packing.quad_with_edge(cycle[0], cycle[1])?;
            let quad = packing.surface()[q].cycle;
            let r = quad.iter().position(|&v| v == cycle[0])?;
            glued.push((q as u32, r as u8));
        }
        Some(Placement { config, mask, glued })
    }

    fn run(
        &mut self,
        placed: &mut Vec<u64>,
        order: &mut Vec<usize>,
        moves: &mut Vec<Placement>,
        packing: &Packing,
        map: &HashMap<VertexId, VertexId>,
    ) -> Option<HashMap<VertexId, VertexId>> {
        let n = self.complex.len();
        if order.len() == n {
            return Some(map.clone());
        }
        if self.failed.contains(placed) {
            return None;
        }
        // Frontier hexes, most glued faces first: they close cavities early.
        let mut candidates: Vec<(usize, usize)> = (0..n)
            .filter(|&h| !bit(placed, h))
            .map(|h| (h, self.neighbours[h].iter().filter(|&&(o, _)| bit(placed, o)).count()))
            .filter(|&(_, k)| k > 0)
            .collect();
        candidates.sort_by_key(|&(h, k)| (std::cmp::Reverse(k), h));
        for (h, _) in candidates {
            let Some(pl) = self.placement(h, placed, packing, map) else {
                continue;
            };
            let Ok(next) = packing.apply(&pl, self.rules) else {
                continue;
            };
            let new_hex = next.complex().hexes().last().expect("hex was added").corners();
            let mut next_map = map.clone();
            for (k, &v) in self.complex.hexes()[h].corners().iter().enumerate() {
                next_map.insert(v, new_hex[k]);
            }
            placed[h / 64] |= 1 << (h % 64);
            order.push(h);
            moves.push(pl);
            if let Some(done) = self.run(placed, order, moves, &next, &next_map) {
                return Some(done);
            }
            moves.pop();
            order.pop();
            placed[h / 64] &= !(1 << (h % 64));
        }
        self.failed.insert(placed.clone());
        None
    }
}

/// Backtracking search for an order in which every prefix of the hexes is
/// reachable by legal moves. Failed prefix sets are memoised: whether a
/// prefix can be completed depends only on which hexes it contains.
pub fn find_grow_order(c: &HexComplex, rules: &MoveRules) -> Result<GrowOrder, GrowOrderError> {
    if c.is_empty() {
        return Err(GrowOrderError::Empty);
    }
    let mut neighbours = vec![Vec::new(); c.len()];
    for owners in c.face_incidence().values() {
        if let [(a, fa), (b, fb)] = owners[..] {
            neighbours[a].push((b, fa));
            neighbours[b].push((a, fb));
        }
    }
    let mut search = GrowSearch { complex: c, rules, neighbours, failed: HashSet::new() };
    let words = c.len().div_ceil(64);
    for first in 0..c.len() {
        let mut placed = vec![0u64; words];
        placed[first / 64] |= 1 << (first % 64);
        let map: HashMap<VertexId, VertexId> =
            c.hexes()[first].corners().iter().enumerate().map(|(k, &v)| (v, k as VertexId)).collect();
        let mut order = vec![first];
        let mut moves = Vec::new();
        if let Some(vertex_map) = search.run(&mut placed, &mut order, &mut moves, &Packing::single(), &map) {
            return Ok(GrowOrder { order, witness: Witness(moves), vertex_map });
        }
    }
    Err(GrowOrderError::NoOrderFound)
}
