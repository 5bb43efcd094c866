use super::{content_lines, parse_fields, parse_header, ParseError};
use crate::geometry::PartialEmbedding;
use crate::hexmodel::VertexId;

/// Parses `coords <n>` followed by `n` lines `<vertex> <x> <y> <z>`.
pub fn parse_coords(text: &str) -> Result<PartialEmbedding, ParseError> {
    let mut lines = content_lines(text);
    let (n, header) = lines.next().ok_or_else(|| ParseError::new(1, "empty document"))?;
    let count = parse_header(n, header, "coords", 1)?[0];
    let mut out = PartialEmbedding::new();
    let mut last = n;
    for i in 0..count {
        let (n, line) = lines.next().ok_or_else(|| ParseError::new(last, format!("missing entry {i}")))?;
        last = n;
        let mut fields = line.split_whitespace();
        let v: VertexId = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| ParseError::new(n, "bad vertex id"))?;
        let rest: Vec<&str> = fields.collect();
        let xyz: Vec<f64> = parse_fields(n, &rest.join(" "), 3)?;
        if xyz.iter().any(|c| !c.is_finite()) {
            return Err(ParseError::new(n, "non-finite coordinate"));
        }
        if out.insert(v, [xyz[0], xyz[1], xyz[2]]).is_some() {
            return Err(ParseError::new(n, format!("vertex {v} listed twice")));
        }
    }
    if let Some((n, _)) = lines.next() {
        return Err(ParseError::new(n, "trailing content"));
    }
    Ok(out)
}

pub fn write_coords(coords: &PartialEmbedding) -> String {
    let mut out = format!("coords {}\n", coords.len());
    for (v, p) in coords {
        out.push_str(&format!("{v} {:?} {:?} {:?}\n", p[0], p[1], p[2]));
    }
    out
}
