//! Combinatorial search, verification and geometric embedding of small
//! hexahedral packings.
//!
//! The crate is organised bottom-up:
//!
//! - [`hexmodel`]: topological hex complexes, conformity checks, boundary
//!   extraction and the 1→8 / tet→4 subdivision utilities.
//! - [`surface`]: closed quad surface patterns and their canonical codes.
//! - [`moves`]: the eight glue configurations and placement of a new hex
//!   against the surface of a packing.
//! - [`search`]: layered minimum-count search over canonical patterns,
//!   checkpoints, witness replay, grow orders and template detection.
//! - [`geometry`]: scaled Jacobians, boundary prescription, interior
//!   initialisation and the untangling optimiser.
//! - [`io`]: text formats (meshes, patterns, witnesses) and VTK/OBJ export.
//! - [`fixtures`]: the bundled reference meshes.

pub mod fixtures;
pub mod geometry;
pub mod hexmodel;
pub mod io;
pub mod moves;
pub mod search;
pub mod surface;

pub use hexmodel::{build_complex, HexComplex, HexError, Hexahedron, Parity, QuadFaceKey, VertexId};
pub use moves::{GlueConfig, MoveRules, Packing, Placement};
pub use surface::{canonical_code, CanonicalCode, SurfacePattern};
