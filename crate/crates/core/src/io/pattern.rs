use thiserror::Error;

use super::{content_lines, parse_fields, parse_header, ParseError};
use crate::hexmodel::VertexId;
use crate::surface::{build_pattern, PatternError, SurfacePattern};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PatternDocError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid pattern: {0}")]
    Validation(#[from] PatternError),
}

/// Parses `quadpattern <quad count>` followed by one quad per line, each
/// listed counter-clockwise seen from outside.
pub fn parse_pattern(text: &str) -> Result<SurfacePattern, PatternDocError> {
    let mut lines = content_lines(text);
    let (n, header) = lines.next().ok_or_else(|| ParseError::new(1, "empty document"))?;
    let quad_count = parse_header(n, header, "quadpattern", 1)?[0];
    let mut quads = Vec::with_capacity(quad_count.min(1 << 16));
    let mut last = n;
    for i in 0..quad_count {
        let (n, line) = lines.next().ok_or_else(|| ParseError::new(last, format!("missing quad {i}")))?;
        last = n;
        let ids: Vec<VertexId> = parse_fields(n, line, 4)?;
        quads.push(<[VertexId; 4]>::try_from(ids).unwrap());
    }
    if let Some((n, _)) = lines.next() {
        return Err(ParseError::new(n, "trailing content").into());
    }
    Ok(build_pattern(quads)?)
}

pub fn write_pattern(p: &SurfacePattern) -> String {
    let mut out = format!("quadpattern {}\n", p.quad_count());
    for q in p.quads() {
        out.push_str(&format!("{} {} {} {}\n", q[0], q[1], q[2], q[3]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{canonical_code, cube_pattern, pyramid16_pattern};

    #[test]
    fn pyramid_round_trip() {
        let p = pyramid16_pattern();
        let text = write_pattern(&p);
        let back = parse_pattern(&text).unwrap();
        assert_eq!(back.quads(), p.quads());
        assert_eq!(write_pattern(&back), text);
    }

    #[test]
    fn comments_are_ignored() {
        let text = format!("# cube\n{}", write_pattern(&cube_pattern()));
        assert_eq!(canonical_code(&parse_pattern(&text).unwrap(), true), canonical_code(&cube_pattern(), true));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_pattern("quadpattern 1\n0 1 2\n"), Err(PatternDocError::Parse(e)) if e.line == 2));
        assert!(matches!(parse_pattern("quadpattern 1\n0 1 2 3\n"), Err(PatternDocError::Validation(_))));
        assert!(parse_pattern("hexmesh 1\n").is_err());
    }
}
