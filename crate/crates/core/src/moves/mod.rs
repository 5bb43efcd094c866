//! Growth of a packing by one hexahedron.
//!
//! A new hex is glued to the surface along a nonempty proper subset of its
//! six faces. Up to the symmetries of the cube there are eight such
//! subsets ([`glue_configs`]); gluing along `k` faces removes `k` surface
//! quads and adds the `6 - k` unglued faces of the new hex.
//!
//! A glued face and the surface quad it lands on have the same cycle: the
//! quad is oriented out of the packing, which is into the new hex.

mod symmetry;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::hexmodel::{HexComplex, HexError, Hexahedron, QuadFaceKey, VertexId, HEX_FACES};
use crate::surface::{self, canonical_code, CanonicalCode, PatternError, SurfacePattern};

pub use symmetry::{cube_symmetries, face_permutation, faces_adjacent, OPPOSITE_FACE};

/// One of the eight classes of glued face subsets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GlueConfig {
    pub id: u8,
    pub name: &'static str,
    /// Representative subset as a bitmask over face slots.
    pub mask: u8,
}

impl GlueConfig {
    pub fn size(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// All concrete face subsets in this class, ascending.
    pub fn masks(&self) -> Vec<u8> {
        (1u8..63).filter(|&m| config_of_mask(m) == Some(self.id)).collect()
    }
}

const CONFIGS: [GlueConfig; 8] = [
    GlueConfig { id: 1, name: "single", mask: 0b000001 },
    GlueConfig { id: 2, name: "adjacent pair", mask: 0b000101 },
    GlueConfig { id: 3, name: "opposite pair", mask: 0b000011 },
    GlueConfig { id: 4, name: "corner", mask: 0b100101 },
    GlueConfig { id: 5, name: "row", mask: 0b000111 },
    GlueConfig { id: 6, name: "ring", mask: 0b111100 },
    GlueConfig { id: 7, name: "notched ring", mask: 0b111010 },
    GlueConfig { id: 8, name: "five faces", mask: 0b111110 },
];

pub fn glue_configs() -> [GlueConfig; 8] {
    CONFIGS
}

pub fn glue_config(id: u8) -> Option<GlueConfig> {
    CONFIGS.iter().copied().find(|c| c.id == id)
}

fn has_opposite_pair(mask: u8) -> bool {
    (0..6).any(|f| mask & (1 << f) != 0 && mask & (1 << OPPOSITE_FACE[f]) != 0)
}

/// Class id of a face subset, `None` for the empty and the full set.
pub fn config_of_mask(mask: u8) -> Option<u8> {
    if mask >= 64 {
        return None;
    }
    let id = match mask.count_ones() {
        1 => 1,
        2 if has_opposite_pair(mask) => 3,
        2 => 2,
        3 if has_opposite_pair(mask) => 5,
        3 => 4,
        4 if has_opposite_pair(!mask & 0b111111) => 6,
        4 => 7,
        5 => 8,
        _ => return None,
    };
    Some(id)
}

/// Which moves are permitted and whether the surface must stay a sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoveRules {
    pub sphere_mode: bool,
    /// Bit `id - 1` set when config `id` is allowed.
    pub allowed: u8,
}

impl Default for MoveRules {
    fn default() -> Self {
        MoveRules { sphere_mode: true, allowed: 0xff }
    }
}

impl MoveRules {
    pub fn allows(&self, config: u8) -> bool {
        (1..=8).contains(&config) && self.allowed & (1 << (config - 1)) != 0
    }

    pub fn with_configs(mut self, ids: &[u8]) -> Self {
        self.allowed = ids.iter().filter(|&&id| (1..=8).contains(&id)).fold(0, |m, &id| m | 1 << (id - 1));
        self
    }

    pub fn config_ids(&self) -> Vec<u8> {
        (1..=8).filter(|&id| self.allows(id)).collect()
    }
}

/// A concrete way of attaching a hex.
///
/// `glued` lists, for each face slot in `mask` in ascending order, the index
/// of the surface quad it lands on and the rotation `r` such that corner `i`
/// of the face cycle goes to corner `(i + r) % 4` of the quad.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Placement {
    pub config: u8,
    pub mask: u8,
    pub glued: Vec<(u32, u8)>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("malformed placement {text:?}: {reason}")]
pub struct PlacementParseError {
    pub text: String,
    pub reason: &'static str,
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:", self.config, self.mask)?;
        for (i, (q, r)) in self.glued.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{q}@{r}")?;
        }
        Ok(())
    }
}

impl FromStr for Placement {
    type Err = PlacementParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason| PlacementParseError { text: s.to_string(), reason };
        let mut parts = s.trim().split(':');
        let (Some(config), Some(mask), Some(glued), None) = (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(err("expected config:mask:quads"));
        };
        let config: u8 = config.parse().map_err(|_| err("bad config id"))?;
        let mask: u8 = mask.parse().map_err(|_| err("bad face mask"))?;
        if config_of_mask(mask) != Some(config) {
            return Err(err("mask does not belong to config"));
        }
        let glued = glued
            .split(',')
            .map(|g| {
                let (q, r) = g.split_once('@').ok_or_else(|| err("expected quad@rotation"))?;
                let q: u32 = q.parse().map_err(|_| err("bad quad index"))?;
                let r: u8 = r.parse().map_err(|_| err("bad rotation"))?;
                if r > 3 {
                    return Err(err("rotation out of range"));
                }
                Ok((q, r))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if glued.len() != mask.count_ones() as usize {
            return Err(err("quad count does not match mask"));
        }
        Ok(Placement { config, mask, glued })
    }
}

impl Placement {
    fn faces(&self) -> impl Iterator<Item = usize> + '_ {
        (0..6).filter(move |f| self.mask & (1 << f) != 0)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum MoveError {
    #[error("invalid placement: {0}")]
    InvalidPlacement(String),
    #[error("config {0} is not allowed")]
    ConfigNotAllowed(u8),
    #[error("the new hex would share more than one face with hex {0}")]
    SharedFaceCountExceeded(usize),
    #[error("unglued face {0:?} coincides with a surface quad")]
    NotMaximal([VertexId; 4]),
    #[error("unglued face {0:?} coincides with an existing face")]
    NonConformingFace([VertexId; 4]),
    #[error("surface would not be a closed manifold: {0}")]
    NonManifold(PatternError),
    #[error("surface Euler characteristic would become {0}")]
    TopologyChanged(i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SurfaceQuad {
    /// Outward cycle.
    pub cycle: [VertexId; 4],
    pub hex: usize,
    pub face: usize,
}

/// A valid complex together with its boundary, kept in sync move by move.
///
/// Surface quads are ordered by `(hex, face slot)`, matching
/// [`HexComplex::boundary_quads`].
#[derive(Clone, Debug)]
pub struct Packing {
    complex: HexComplex,
    surface: Vec<SurfaceQuad>,
    edge_index: HashMap<(VertexId, VertexId), usize>,
    faces: HashMap<QuadFaceKey, u8>,
}

impl Packing {
    pub fn single() -> Self {
        Self::from_complex(HexComplex::single()).expect("single hex is valid")
    }

    pub fn from_complex(complex: HexComplex) -> Result<Self, HexError> {
        let complex = HexComplex::new(complex.vertex_count(), complex.hexes().to_vec())?;
        let incidence = complex.face_incidence();
        let mut surface = Vec::new();
        for (h, hex) in complex.hexes().iter().enumerate() {
            for f in 0..6 {
                if incidence[&QuadFaceKey::new(hex.face(f))].len() == 1 {
                    surface.push(SurfaceQuad { cycle: hex.outward_face(f), hex: h, face: f });
                }
            }
        }
        let faces = incidence.into_iter().map(|(k, v)| (k, v.len() as u8)).collect();
        Ok(Self::assemble(complex, surface, faces))
    }

    fn assemble(complex: HexComplex, surface: Vec<SurfaceQuad>, faces: HashMap<QuadFaceKey, u8>) -> Self {
        let mut edge_index = HashMap::with_capacity(surface.len() * 4);
        for (q, quad) in surface.iter().enumerate() {
            for i in 0..4 {
                edge_index.insert((quad.cycle[i], quad.cycle[(i + 1) % 4]), q);
            }
        }
        Packing { complex, surface, edge_index, faces }
    }

    pub fn complex(&self) -> &HexComplex {
        &self.complex
    }

    pub fn into_complex(self) -> HexComplex {
        self.complex
    }

    pub fn hex_count(&self) -> usize {
        self.complex.len()
    }

    pub fn surface(&self) -> &[SurfaceQuad] {
        &self.surface
    }

    pub fn surface_quads(&self) -> Vec<[VertexId; 4]> {
        self.surface.iter().map(|q| q.cycle).collect()
    }

    pub fn pattern(&self) -> SurfacePattern {
        surface::build_pattern(self.surface_quads()).expect("packing surface is kept valid")
    }

    pub fn code(&self, reflection_invariant: bool) -> CanonicalCode {
        canonical_code(&self.pattern(), reflection_invariant)
    }

    /// Surface quad containing the directed edge `a -> b`.
    pub fn quad_with_edge(&self, a: VertexId, b: VertexId) -> Option<usize> {
        self.edge_index.get(&(a, b)).copied()
    }

    /// Corner images of the new hex; `None` for corners that get fresh ids.
    pub fn resolve(&self, pl: &Placement) -> Result<[Option<VertexId>; 8], MoveError> {
        let invalid = |s: String| MoveError::InvalidPlacement(s);
        if config_of_mask(pl.mask) != Some(pl.config) {
            return Err(invalid(format!("mask {} is not in config {}", pl.mask, pl.config)));
        }
        if pl.glued.len() != pl.mask.count_ones() as usize {
            return Err(invalid("glued quad count does not match the mask".into()));
        }
        let mut corners = [None; 8];
        let mut used = HashSet::new();
        for (f, &(q, r)) in pl.faces().zip(&pl.glued) {
            let quad = self
                .surface
                .get(q as usize)
                .ok_or_else(|| invalid(format!("surface quad {q} does not exist")))?;
            if !used.insert(q) || r > 3 {
                return Err(invalid(format!("quad {q} glued twice or bad rotation")));
            }
            for (i, &c) in HEX_FACES[f].iter().enumerate() {
                let v = quad.cycle[(i + r as usize) % 4];
                match corners[c] {
                    Some(w) if w != v => return Err(invalid(format!("corner {c} maps to both {w} and {v}"))),
                    _ => corners[c] = Some(v),
                }
            }
        }
        let mut images: Vec<VertexId> = corners.iter().flatten().copied().collect();
        images.sort_unstable();
        if images.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("two corners map to the same vertex".into()));
        }
        Ok(corners)
    }

    /// Applies a placement, validating the result.
    pub fn apply(&self, pl: &Placement, rules: &MoveRules) -> Result<Packing, MoveError> {
        if !rules.allows(pl.config) {
            return Err(MoveError::ConfigNotAllowed(pl.config));
        }
        let corners = self.resolve(pl)?;
        let glued: Vec<usize> = pl.glued.iter().map(|&(q, _)| q as usize).collect();
        let mut owners = HashSet::new();
        for &q in &glued {
            if !owners.insert(self.surface[q].hex) {
                return Err(MoveError::SharedFaceCountExceeded(self.surface[q].hex));
            }
        }

        let mut next = self.complex.vertex_count() as VertexId;
        let hex = Hexahedron(corners.map(|c| {
            c.unwrap_or_else(|| {
                next += 1;
                next - 1
            })
        }));
        let new_index = self.complex.len();

        let mut faces = self.faces.clone();
        let mut added = Vec::with_capacity(6 - glued.len());
        for f in 0..6 {
            let key = QuadFaceKey::new(hex.face(f));
            if pl.mask & (1 << f) != 0 {
                *faces.get_mut(&key).expect("glued face is on the surface") += 1;
                continue;
            }
            if let Some(&count) = faces.get(&key) {
                let cycle = hex.face(f);
                let on_surface = self.quad_with_edge(cycle[0], cycle[1]).map(|q| QuadFaceKey::new(self.surface[q].cycle))
                    == Some(key);
                return Err(if count == 1 && on_surface {
                    MoveError::NotMaximal(cycle)
                } else {
                    MoveError::NonConformingFace(cycle)
                });
            }
            faces.insert(key, 1);
            added.push(SurfaceQuad { cycle: hex.outward_face(f), hex: new_index, face: f });
        }

        let removed: HashSet<usize> = glued.into_iter().collect();
        let mut surface: Vec<SurfaceQuad> = self
            .surface
            .iter()
            .enumerate()
            .filter(|(q, _)| !removed.contains(q))
            .map(|(_, quad)| *quad)
            .collect();
        surface.extend(added);
        let quads: Vec<[VertexId; 4]> = surface.iter().map(|q| q.cycle).collect();
        let pattern = surface::build_pattern(quads).map_err(MoveError::NonManifold)?;
        if rules.sphere_mode && pattern.euler_characteristic() != 2 {
            return Err(MoveError::TopologyChanged(pattern.euler_characteristic()));
        }

        let mut hexes = self.complex.hexes().to_vec();
        hexes.push(hex);
        let complex = HexComplex::from_raw(next as usize, hexes);
        Ok(Self::assemble(complex, surface, faces))
    }

    /// Every valid placement, each listed once up to the rotations of the
    /// new hex, paired with the packing it produces.
    pub fn successors(&self, rules: &MoveRules) -> Vec<(Placement, Packing)> {
        let rotations = cube_symmetries(false);
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for config in glue_configs() {
            if !rules.allows(config.id) {
                continue;
            }
            for mask in config.masks() {
                let order = face_order(mask);
                let mut search = Assignment { packing: self, order: &order, corners: [None; 8], glued: Vec::new(), found: Vec::new() };
                search.run(0);
                for (corners, mut glued) in search.found {
                    let key = rotations
                        .iter()
                        .map(|sigma| sigma.map(|c| corners[c]))
                        .min()
                        .expect("rotation group is nonempty");
                    // The same hex can come up under a smaller mask that
                    // fails maximality, so only successes are recorded.
                    if seen.contains(&key) {
                        continue;
                    }
                    glued.sort_unstable();
                    let placement = Placement {
                        config: config.id,
                        mask,
                        glued: glued.into_iter().map(|(_, q, r)| (q as u32, r)).collect(),
                    };
                    if let Ok(next) = self.apply(&placement, rules) {
                        seen.insert(key);
                        out.push((placement, next));
                    }
                }
            }
        }
        out
    }
}

/// Face slots of `mask` ordered so that each face after the first of its
/// connected component shares an edge with an earlier one.
fn face_order(mask: u8) -> Vec<usize> {
    let mut order = Vec::new();
    for start in 0..6 {
        if mask & (1 << start) == 0 || order.contains(&start) {
            continue;
        }
        let first = order.len();
        order.push(start);
        let mut i = first;
        while i < order.len() {
            let f = order[i];
            for g in 0..6 {
                if mask & (1 << g) != 0 && !order.contains(&g) && faces_adjacent(f, g) {
                    order.push(g);
                }
            }
            i += 1;
        }
    }
    order
}

/// `(face, quad, rotation)` triples of one assignment.
type Gluing = Vec<(usize, usize, u8)>;

struct Assignment<'a> {
    packing: &'a Packing,
    order: &'a [usize],
    corners: [Option<VertexId>; 8],
    /// Faces assigned so far.
    glued: Gluing,
    found: Vec<([Option<VertexId>; 8], Gluing)>,
}

impl Assignment<'_> {
    fn run(&mut self, k: usize) {
        let Some(&f) = self.order.get(k) else {
            self.found.push((self.corners, self.glued.clone()));
            return;
        };
        let cycle = HEX_FACES[f];
        let known_edge = (0..4).find_map(|i| {
            let (a, b) = (self.corners[cycle[i]]?, self.corners[cycle[(i + 1) % 4]]?);
            Some((i, a, b))
        });
        let candidates: Vec<(usize, u8)> = match known_edge {
            Some((i, a, b)) => {
                let Some(q) = self.packing.quad_with_edge(a, b) else {
                    return;
                };
                let p = self.packing.surface[q].cycle.iter().position(|&v| v == a).unwrap();
                vec![(q, ((p + 4 - i) % 4) as u8)]
            }
            None => (0..self.packing.surface.len()).flat_map(|q| (0..4).map(move |r| (q, r))).collect(),
        };
        for (q, r) in candidates {
            if self.glued.iter().any(|&(_, g, _)| g == q) {
                continue;
            }
            let quad = self.packing.surface[q].cycle;
            let saved = self.corners;
            let mut ok = true;
            for (i, &c) in cycle.iter().enumerate() {
                let v = quad[(i + r as usize) % 4];
                match self.corners[c] {
                    Some(w) if w == v => {}
                    Some(_) => ok = false,
                    None if self.corners.contains(&Some(v)) => ok = false,
                    None => self.corners[c] = Some(v),
                }
                if !ok {
                    break;
                }
            }
            if ok {
                self.glued.push((f, q, r));
                self.run(k + 1);
                self.glued.pop();
            }
            self.corners = saved;
        }
    }
}

/// All placements allowed by `rules` on the packing.
pub fn enumerate_placements(packing: &Packing, rules: &MoveRules) -> Vec<Placement> {
    packing.successors(rules).into_iter().map(|(p, _)| p).collect()
}

/// One representative placement per distinct successor pattern, sorted by
/// the successor's canonical code.
pub fn distinct_successors(
    packing: &Packing,
    rules: &MoveRules,
    reflection_invariant: bool,
) -> Vec<(CanonicalCode, Placement, Packing)> {
    let mut by_code: Vec<(CanonicalCode, Placement, Packing)> = packing
        .successors(rules)
        .into_iter()
        .map(|(pl, next)| (next.code(reflection_invariant), pl, next))
        .collect();
    // Stable sort keeps the first placement in enumeration order per code.
    by_code.sort_by(|a, b| a.0.cmp(&b.0));
    by_code.dedup_by(|b, a| a.0 == b.0);
    by_code
}

/// Applies a placement and returns the new packing with its surface.
pub fn apply_move(packing: &Packing, pl: &Placement, rules: &MoveRules) -> Result<(Packing, SurfacePattern), MoveError> {
    let next = packing.apply(pl, rules)?;
    let pattern = next.pattern();
    Ok((next, pattern))
}
