//! Canonical codes for quad surfaces.
//!
//! For every dart taken as root (and, when reflections are identified, for
//! every dart of the mirrored surface) a breadth-first walk over quads
//! assigns vertices labels in order of discovery. The walk emits the four
//! labels of each quad as it is dequeued, starting from the dart through
//! which the quad was entered. The code is the smallest emission. An
//! emission determines the surface up to relabelling, so equal codes mean
//! isomorphic surfaces and vice versa.
//!
//! Byte layout: `flags:u8, quads:u16be, vertices:u16be`, then one label per
//! emitted corner, as `u8` when the surface has at most 256 vertices and
//! as `u16be` otherwise. Bit 0 of `flags` records reflection invariance.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use super::{next_dart, prev_dart, SurfacePattern};
use crate::hexmodel::VertexId;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode(Vec<u8>);

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("invalid canonical code: {0}")]
pub struct CodeParseError(String);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, CodeParseError> {
        let bytes = hex::decode(s).map_err(|e| CodeParseError(e.to_string()))?;
        Self::from_bytes(bytes)
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Result<Self, CodeParseError> {
        if bytes.len() < 5 {
            return Err(CodeParseError("truncated header".into()));
        }
        let quads = u16::from_be_bytes([bytes[1], bytes[2]]) as usize;
        let vertices = u16::from_be_bytes([bytes[3], bytes[4]]) as usize;
        let width = if vertices <= 256 { 1 } else { 2 };
        if bytes.len() != 5 + 4 * quads * width {
            return Err(CodeParseError(format!("expected {} label bytes", 4 * quads * width)));
        }
        Ok(CanonicalCode(bytes))
    }

    pub fn quad_count(&self) -> usize {
        u16::from_be_bytes([self.0[1], self.0[2]]) as usize
    }

    pub fn vertex_count(&self) -> usize {
        u16::from_be_bytes([self.0[3], self.0[4]]) as usize
    }

    pub fn reflection_invariant(&self) -> bool {
        self.0[0] & 1 == 1
    }
}

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalCode({})", self.to_hex())
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// A root of the canonical walk.
#[derive(Clone, Copy, Debug)]
struct Root {
    dart: u32,
    mirrored: bool,
}

struct Walker<'a> {
    p: &'a SurfacePattern,
    labels: Vec<u32>,
    visited: Vec<bool>,
    queue: VecDeque<u32>,
    emission: Vec<u32>,
}

impl<'a> Walker<'a> {
    fn new(p: &'a SurfacePattern) -> Self {
        Walker {
            p,
            labels: vec![u32::MAX; p.vertex_count()],
            visited: vec![false; p.quad_count()],
            queue: VecDeque::new(),
            emission: Vec::with_capacity(p.dart_count()),
        }
    }

    /// Runs the walk from `root`. With `bound`, stops early and returns
    /// `false` as soon as the emission is known to exceed it.
    fn walk(&mut self, root: Root, bound: Option<&[u32]>) -> bool {
        let p = self.p;
        self.labels.fill(u32::MAX);
        self.visited.fill(false);
        self.queue.clear();
        self.emission.clear();
        // On the mirrored surface a dart runs from the head of the original
        // dart, and the quad cycle is followed backwards.
        type Origin<'f> = &'f dyn Fn(u32) -> u32;
        let (origin, step): (Origin, fn(u32) -> u32) = if root.mirrored {
            (&|d| p.origin(next_dart(d)), prev_dart)
        } else {
            (&|d| p.origin(d), next_dart)
        };
        let mut next_label = 0u32;
        let mut tied = bound.is_some();
        self.visited[(root.dart / 4) as usize] = true;
        self.queue.push_back(root.dart);
        while let Some(entry) = self.queue.pop_front() {
            let mut d = entry;
            for _ in 0..4 {
                let v = origin(d) as usize;
                if self.labels[v] == u32::MAX {
                    self.labels[v] = next_label;
                    next_label += 1;
                }
                let label = self.labels[v];
                if tied {
                    let b = bound.unwrap()[self.emission.len()];
                    if label > b {
                        return false;
                    }
                    tied = label == b;
                }
                self.emission.push(label);
                d = step(d);
            }
            for _ in 0..4 {
                let t = p.twin(d);
                let q = (t / 4) as usize;
                if !self.visited[q] {
                    self.visited[q] = true;
                    self.queue.push_back(t);
                }
                d = step(d);
            }
        }
        true
    }
}

/// Smallest emission and one root producing it.
fn minimal_walk(p: &SurfacePattern, reflection_invariant: bool) -> (Vec<u32>, Root) {
    let mut walker = Walker::new(p);
    let mut best: Option<(Vec<u32>, Root)> = None;
    let orientations: &[bool] = if reflection_invariant { &[false, true] } else { &[false] };
    for &mirrored in orientations {
        for dart in 0..p.dart_count() as u32 {
            let root = Root { dart, mirrored };
            let bound = best.as_ref().map(|(e, _)| e.as_slice());
            if walker.walk(root, bound) {
                let improves = match &best {
                    Some((e, _)) => walker.emission < *e,
                    None => true,
                };
                if improves {
                    best = Some((walker.emission.clone(), root));
                }
            }
        }
    }
    best.expect("patterns are non-empty")
}

fn encode(p: &SurfacePattern, emission: &[u32], reflection_invariant: bool) -> CanonicalCode {
    let quads = u16::try_from(p.quad_count()).expect("pattern too large for a canonical code");
    let vertices = u16::try_from(p.vertex_count()).expect("pattern too large for a canonical code");
    let wide = vertices > 256;
    let mut bytes = Vec::with_capacity(5 + emission.len() * if wide { 2 } else { 1 });
    bytes.push(reflection_invariant as u8);
    bytes.extend_from_slice(&quads.to_be_bytes());
    bytes.extend_from_slice(&vertices.to_be_bytes());
    for &label in emission {
        if wide {
            bytes.extend_from_slice(&(label as u16).to_be_bytes());
        } else {
            bytes.push(label as u8);
        }
    }
    CanonicalCode(bytes)
}

/// Relabelling-invariant code of `p`; with `reflection_invariant` a
/// surface and its mirror image share a code.
pub fn canonical_code(p: &SurfacePattern, reflection_invariant: bool) -> CanonicalCode {
    let (emission, _) = minimal_walk(p, reflection_invariant);
    encode(p, &emission, reflection_invariant)
}

/// Decides isomorphism and, when it holds, returns a vertex bijection
/// carrying every quad of `a` onto a quad of `b` (reversed when the
/// isomorphism is orientation-reversing).
pub fn isomorphic(
    a: &SurfacePattern,
    b: &SurfacePattern,
    reflection_invariant: bool,
) -> Option<HashMap<VertexId, VertexId>> {
    if a.quad_count() != b.quad_count() || a.vertex_count() != b.vertex_count() {
        return None;
    }
    let (ea, ra) = minimal_walk(a, reflection_invariant);
    let (eb, rb) = minimal_walk(b, reflection_invariant);
    if ea != eb {
        return None;
    }
    let labels_of = |p: &SurfacePattern, root: Root| {
        let mut w = Walker::new(p);
        w.walk(root, None);
        w.labels
    };
    let la = labels_of(a, ra);
    let lb = labels_of(b, rb);
    let mut by_label = vec![0 as VertexId; lb.len()];
    for (dense, &label) in lb.iter().enumerate() {
        by_label[label as usize] = b.dense_vertex(dense as u32);
    }
    Some(
        la.iter()
            .enumerate()
            .map(|(dense, &label)| (a.dense_vertex(dense as u32), by_label[label as usize]))
            .collect(),
    )
}
