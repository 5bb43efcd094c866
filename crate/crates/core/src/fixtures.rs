//! Reference meshes bundled with the crate.
//!
//! - `pyramid36`: the 36-hex packing of the refined pyramid, with coordinates.
//! - `template17`, `template18`: the 17- and 18-hex packings with identical
//!   boundaries that make up the parity-changing template.

use crate::io::{parse_mesh, MeshDocument};

pub const PYRAMID36: &str = include_str!("../fixtures/pyramid36.hexmesh");
pub const TEMPLATE17: &str = include_str!("../fixtures/template17.hexmesh");
pub const TEMPLATE18: &str = include_str!("../fixtures/template18.hexmesh");

pub fn pyramid36() -> MeshDocument {
    parse_mesh(PYRAMID36).expect("bundled mesh")
}

pub fn template17() -> MeshDocument {
    parse_mesh(TEMPLATE17).expect("bundled mesh")
}

pub fn template18() -> MeshDocument {
    parse_mesh(TEMPLATE18).expect("bundled mesh")
}
