use thiserror::Error;

use super::{content_lines, parse_fields, parse_header, ParseError};
use crate::geometry::{Embedding, Point};
use crate::hexmodel::{build_complex, HexComplex, HexError, VertexId};

/// A hex mesh file: the complex and, optionally, vertex coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshDocument {
    pub complex: HexComplex,
    pub embedding: Option<Embedding>,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum MeshError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid complex: {0}")]
    Validation(#[from] HexError),
}

/// A mesh file before validation of the complex.
#[derive(Clone, Debug, PartialEq)]
pub struct RawMesh {
    pub vertex_count: usize,
    pub hexes: Vec<[VertexId; 8]>,
    pub embedding: Option<Embedding>,
}

/// Parses
///
/// ```text
/// hexmesh <vertex count> <hex count>
/// <8 vertex ids>            one line per hex
/// coordinates               optional block
/// <x> <y> <z>               one line per vertex
/// ```
pub fn parse_mesh(text: &str) -> Result<MeshDocument, MeshError> {
    let raw = parse_mesh_raw(text)?;
    let complex = build_complex(&raw.hexes, raw.vertex_count)?;
    Ok(MeshDocument { complex, embedding: raw.embedding })
}

/// Syntax-only parse of the format read by [`parse_mesh`].
pub fn parse_mesh_raw(text: &str) -> Result<RawMesh, ParseError> {
    let mut lines = content_lines(text);
    let (n, header) = lines.next().ok_or_else(|| ParseError::new(1, "empty document"))?;
    let counts = parse_header(n, header, "hexmesh", 2)?;
    let (vertex_count, hex_count) = (counts[0], counts[1]);
    // Larger counts cannot all be used, and would only cost memory.
    if vertex_count > hex_count.saturating_mul(8) {
        return Err(ParseError::new(n, "more vertices than hex corners"));
    }

    let mut hexes = Vec::with_capacity(hex_count.min(1 << 16));
    for i in 0..hex_count {
        let (n, line) = lines.next().ok_or_else(|| ParseError::new(n, format!("missing hex {i}")))?;
        let ids: Vec<VertexId> = parse_fields(n, line, 8)?;
        hexes.push(<[VertexId; 8]>::try_from(ids).unwrap());
    }

    let embedding = match lines.next() {
        None => None,
        Some((n, "coordinates")) => {
            let mut points = Vec::with_capacity(vertex_count.min(1 << 16));
            let mut last = n;
            for v in 0..vertex_count {
                let (n, line) = lines
                    .next()
                    .ok_or_else(|| ParseError::new(last, format!("missing coordinates of vertex {v}")))?;
                last = n;
                let xyz: Vec<f64> = parse_fields(n, line, 3)?;
                if xyz.iter().any(|c| !c.is_finite()) {
                    return Err(ParseError::new(n, "non-finite coordinate"));
                }
                points.push([xyz[0], xyz[1], xyz[2]] as Point);
            }
            Some(Embedding::new(points))
        }
        Some((n, other)) => return Err(ParseError::new(n, format!("unexpected line {other:?}"))),
    };
    if let Some((n, _)) = lines.next() {
        return Err(ParseError::new(n, "trailing content"));
    }
    Ok(RawMesh { vertex_count, hexes, embedding })
}

/// Writes the normalised form read by [`parse_mesh`]. Coordinates are
/// written with enough digits to read back bit-identically.
pub fn write_mesh(complex: &HexComplex, embedding: Option<&Embedding>) -> String {
    let mut out = format!("hexmesh {} {}\n", complex.vertex_count(), complex.len());
    for hex in complex.hexes() {
        let ids: Vec<String> = hex.corners().iter().map(|v| v.to_string()).collect();
        out.push_str(&ids.join(" "));
        out.push('\n');
    }
    if let Some(e) = embedding {
        out.push_str("coordinates\n");
        for p in e.points() {
            out.push_str(&format!("{:?} {:?} {:?}\n", p[0], p[1], p[2]));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const CUBE: &str = "# unit cube\nhexmesh 8 1\n0 1 2 3 4 5 6 7\n";

    #[test]
    fn parses_a_cube() {
        let doc = parse_mesh(CUBE).unwrap();
        assert_eq!(doc.complex.len(), 1);
        assert!(doc.embedding.is_none());
        assert_eq!(write_mesh(&doc.complex, None), "hexmesh 8 1\n0 1 2 3 4 5 6 7\n");
    }

    #[test]
    fn short_hex_line_is_reported_at_its_line() {
        let err = parse_mesh("hexmesh 8 1\n\n0 1 2 3 4 5 6\n").unwrap_err();
        assert_eq!(err, MeshError::Parse(ParseError::new(3, "expected 8 values, found 7")));
    }

    #[test]
    fn validation_errors_are_forwarded() {
        let err = parse_mesh("hexmesh 8 1\n0 1 2 3 4 5 6 6\n").unwrap_err();
        assert!(matches!(err, MeshError::Validation(HexError::DegenerateHex { hex: 0 })));
    }

    #[test]
    fn coordinates_round_trip() {
        let text = "hexmesh 8 1\n0 1 2 3 4 5 6 7\ncoordinates\n\
                    0.0 0.0 0.0\n1.0 0.0 0.0\n1.0 1.0 0.0\n0.0 1.0 0.0\n\
                    0.0 0.0 1.0\n1.0 0.0 1.0\n1.0 1.0 1.0\n4.96e-23 0.1 0.333333\n";
        let doc = parse_mesh(text).unwrap();
        assert_eq!(write_mesh(&doc.complex, doc.embedding.as_ref()), text);
    }

    #[test]
    fn malformed_documents() {
        assert!(parse_mesh("").is_err());
        assert!(parse_mesh("hexmesh 8\n").is_err());
        assert!(parse_mesh_raw("hexmesh 4000000000 0\n").is_err());
        assert!(parse_mesh("quadpattern 8 1\n").is_err());
        assert!(parse_mesh("hexmesh 8 2\n0 1 2 3 4 5 6 7\n").is_err());
        assert!(parse_mesh(&format!("{CUBE}coordinates\n0 0 0\n")).is_err());
        assert!(parse_mesh(&format!("{CUBE}extra\n")).is_err());
        assert!(parse_mesh("hexmesh 8 1\n0 1 2 3 4 5 6 x\n").is_err());
    }
}
