//! Text formats.
//!
//! All formats are line oriented and whitespace tolerant. Blank lines and
//! lines starting with `#` are ignored wherever they appear. Byte-level
//! layouts are documented in `docs/formats.md`.

mod coords;
mod export;
mod mesh;
mod pattern;

use thiserror::Error;

pub use coords::{parse_coords, write_coords};
pub use export::{export_obj_surface, export_vtk, parse_vtk, ExportError, VtkGrid, VTK_HEX_ORDER};
pub use mesh::{parse_mesh, parse_mesh_raw, write_mesh, MeshDocument, MeshError, RawMesh};
pub use pattern::{parse_pattern, write_pattern, PatternDocError};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError { line, message: message.into() }
    }
}

/// Non-comment lines with their 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn parse_fields<T: std::str::FromStr>(line: usize, text: &str, expected: usize) -> Result<Vec<T>, ParseError> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != expected {
        return Err(ParseError::new(line, format!("expected {expected} values, found {}", fields.len())));
    }
    fields
        .iter()
        .map(|f| f.parse::<T>().map_err(|_| ParseError::new(line, format!("cannot parse {f:?}"))))
        .collect()
}

/// Parses a `<word> <n>...` header line.
pub(crate) fn parse_header(line: usize, text: &str, word: &str, counts: usize) -> Result<Vec<usize>, ParseError> {
    let mut fields = text.split_whitespace();
    if fields.next() != Some(word) {
        return Err(ParseError::new(line, format!("expected header {word:?}")));
    }
    let rest: Vec<&str> = fields.collect();
    parse_fields(line, &rest.join(" "), counts)
}
