use crate::hexmodel::{check_conformity, extract_boundary, ConformityReport, HexComplex, Parity};
use crate::surface::{canonical_code, CanonicalCode};

/// Comparison of two packings as a template: same surface, hex counts of
/// possibly different parity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemplateReport {
    pub conformity: [ConformityReport; 2],
    /// `None` when a boundary cannot be extracted.
    pub codes: [Option<CanonicalCode>; 2],
    pub hex_counts: [usize; 2],
    pub parities: [Parity; 2],
}

impl TemplateReport {
    pub fn codes_equal(&self) -> bool {
        matches!(&self.codes, [Some(a), Some(b)] if a == b)
    }

    pub fn is_template(&self) -> bool {
        self.conformity.iter().all(ConformityReport::is_conforming) && self.codes_equal()
    }

    pub fn parity_changing(&self) -> bool {
        self.is_template() && self.parities[0] != self.parities[1]
    }
}

pub fn verify_template(a: &HexComplex, b: &HexComplex, reflection_invariant: bool) -> TemplateReport {
    let code = |c: &HexComplex| extract_boundary(c).ok().map(|p| canonical_code(&p, reflection_invariant));
    TemplateReport {
        conformity: [check_conformity(a), check_conformity(b)],
        codes: [code(a), code(b)],
        hex_counts: [a.len(), b.len()],
        parities: [Parity::of(a.len()), Parity::of(b.len())],
    }
}
