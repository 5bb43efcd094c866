//! VTK legacy and OBJ output, plus a reader for the VTK files written here.

use std::collections::HashMap;

use thiserror::Error;

use super::ParseError;
use crate::geometry::{Embedding, Point};
use crate::hexmodel::{HexComplex, VertexId};
use crate::surface::SurfacePattern;

/// VTK_HEXAHEDRON node `i` is corner `VTK_HEX_ORDER[i]` of our hexes. Both
/// orders list one quad counter-clockwise seen from the opposite quad,
/// then the opposite quad with corner `k + 4` above corner `k`.
pub const VTK_HEX_ORDER: [usize; 8] = [0, 1, 2, 3, 4, 5, 6, 7];

const VTK_HEXAHEDRON: u32 = 12;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ExportError {
    #[error("no coordinates for vertex {0}")]
    MissingCoordinates(VertexId),
}

fn point(e: &Embedding, v: VertexId) -> Result<Point, ExportError> {
    e.get(v).ok_or(ExportError::MissingCoordinates(v))
}

pub fn export_vtk(c: &HexComplex, e: &Embedding) -> Result<String, ExportError> {
    let mut out = String::from("# vtk DataFile Version 3.0\nhexpack mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    out.push_str(&format!("POINTS {} double\n", c.vertex_count()));
    for v in 0..c.vertex_count() as VertexId {
        let p = point(e, v)?;
        out.push_str(&format!("{:?} {:?} {:?}\n", p[0], p[1], p[2]));
    }
    out.push_str(&format!("CELLS {} {}\n", c.len(), c.len() * 9));
    for hex in c.hexes() {
        out.push('8');
        for k in VTK_HEX_ORDER {
            out.push_str(&format!(" {}", hex.0[k]));
        }
        out.push('\n');
    }
    out.push_str(&format!("CELL_TYPES {}\n", c.len()));
    for _ in c.hexes() {
        out.push_str(&format!("{VTK_HEXAHEDRON}\n"));
    }
    Ok(out)
}

/// Points and hexahedral cells of a legacy ASCII unstructured grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VtkGrid {
    pub points: Vec<Point>,
    /// Cells converted back to our corner order.
    pub hexes: Vec<[VertexId; 8]>,
}

/// Reads the subset of the legacy format that [`export_vtk`] writes:
/// `POINTS`, `CELLS` (hexahedra only) and `CELL_TYPES`.
pub fn parse_vtk(text: &str) -> Result<VtkGrid, ParseError> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).collect();
    let mut i = 0;
    let mut points = Vec::new();
    let mut hexes = Vec::new();
    let mut types_seen = false;
    let next_data = |i: &mut usize, what: &str| -> Result<(usize, &str), ParseError> {
        while let Some(&(n, l)) = lines.get(*i) {
            *i += 1;
            if !l.is_empty() {
                return Ok((n, l));
            }
        }
        Err(ParseError::new(lines.len(), format!("unexpected end of file in {what}")))
    };
    // Header: version line, title, ASCII, DATASET.
    let (n, version) = next_data(&mut i, "header")?;
    if !version.starts_with("# vtk DataFile Version") {
        return Err(ParseError::new(n, "missing vtk version line"));
    }
    i += 1; // title may be anything, including empty
    let (n, ascii) = next_data(&mut i, "header")?;
    if ascii != "ASCII" {
        return Err(ParseError::new(n, "only ASCII files are supported"));
    }
    let (n, dataset) = next_data(&mut i, "header")?;
    if dataset != "DATASET UNSTRUCTURED_GRID" {
        return Err(ParseError::new(n, "expected DATASET UNSTRUCTURED_GRID"));
    }
    while i < lines.len() {
        let (n, line) = next_data(&mut i, "body")?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let count = |k: usize| -> Result<usize, ParseError> {
            fields
                .get(k)
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| ParseError::new(n, format!("bad count in {line:?}")))
        };
        match fields.first().copied() {
            Some("POINTS") => {
                let np = count(1)?;
                for _ in 0..np {
                    let (m, l) = next_data(&mut i, "POINTS")?;
                    let xyz: Vec<f64> = super::parse_fields(m, l, 3)?;
                    points.push([xyz[0], xyz[1], xyz[2]]);
                }
            }
            Some("CELLS") => {
                let nc = count(1)?;
                for _ in 0..nc {
                    let (m, l) = next_data(&mut i, "CELLS")?;
                    let ids: Vec<VertexId> = super::parse_fields(m, l, 9)?;
                    if ids[0] != 8 {
                        return Err(ParseError::new(m, "only 8-node cells are supported"));
                    }
                    let mut hex = [0; 8];
                    for (node, &k) in VTK_HEX_ORDER.iter().enumerate() {
                        hex[k] = ids[node + 1];
                    }
                    if hex.iter().any(|&v| v as usize >= points.len()) {
                        return Err(ParseError::new(m, "cell references a missing point"));
                    }
                    hexes.push(hex);
                }
            }
            Some("CELL_TYPES") => {
                let nt = count(1)?;
                if nt != hexes.len() {
                    return Err(ParseError::new(n, "CELL_TYPES count differs from CELLS"));
                }
                for _ in 0..nt {
                    let (m, l) = next_data(&mut i, "CELL_TYPES")?;
                    if l.parse::<u32>().ok() != Some(VTK_HEXAHEDRON) {
                        return Err(ParseError::new(m, "only hexahedron cells are supported"));
                    }
                }
                types_seen = true;
            }
            _ => return Err(ParseError::new(n, format!("unsupported section {line:?}"))),
        }
    }
    if !types_seen && !hexes.is_empty() {
        return Err(ParseError::new(lines.len(), "missing CELL_TYPES"));
    }
    Ok(VtkGrid { points, hexes })
}

/// Boundary quads as OBJ faces with 1-based vertex indices. Vertices are
/// written in ascending id order.
pub fn export_obj_surface(p: &SurfacePattern, e: &Embedding) -> Result<String, ExportError> {
    let mut out = String::from("# hexpack surface\n");
    let mut index = HashMap::new();
    for (i, &v) in p.vertices().iter().enumerate() {
        let q = point(e, v)?;
        out.push_str(&format!("v {:?} {:?} {:?}\n", q[0], q[1], q[2]));
        index.insert(v, i + 1);
    }
    for quad in p.quads() {
        out.push_str(&format!("f {} {} {} {}\n", index[&quad[0]], index[&quad[1]], index[&quad[2]], index[&quad[3]]));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hexmodel::build_complex;
    use crate::surface::cube_pattern;

    fn unit_cube() -> (HexComplex, Embedding) {
        let c = build_complex(&[[0, 1, 2, 3, 4, 5, 6, 7]], 8).unwrap();
        let e = Embedding::new(vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 1.0],
            [1.0, 1.0, 1.0],
            [0.0, 1.0, 1.0],
        ]);
        (c, e)
    }

    #[test]
    fn cube_vtk_round_trip() {
        let (c, e) = unit_cube();
        let text = export_vtk(&c, &e).unwrap();
        assert!(text.contains("CELLS 1 9\n8 0 1 2 3 4 5 6 7\n"));
        let grid = parse_vtk(&text).unwrap();
        assert_eq!(grid.hexes, c.raw_hexes());
        assert_eq!(grid.points, e.points());
    }

    #[test]
    fn missing_coordinates() {
        let (c, _) = unit_cube();
        let e = Embedding::new(vec![[0.0; 3]; 7]);
        assert_eq!(export_vtk(&c, &e), Err(ExportError::MissingCoordinates(7)));
    }

    #[test]
    fn obj_is_one_based() {
        let (_, e) = unit_cube();
        let text = export_obj_surface(&cube_pattern(), &e).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 6);
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 8);
        for l in text.lines().filter(|l| l.starts_with("f ")) {
            for idx in l.split_whitespace().skip(1) {
                let i: usize = idx.parse().unwrap();
                assert!((1..=8).contains(&i));
            }
        }
    }

    #[test]
    fn vtk_reader_rejects_garbage() {
        assert!(parse_vtk("").is_err());
        assert!(parse_vtk("# vtk DataFile Version 3.0\nt\nBINARY\n").is_err());
        let (c, e) = unit_cube();
        let text = export_vtk(&c, &e).unwrap().replace("\n12\n", "\n10\n");
        assert!(parse_vtk(&text).is_err());
    }
}
