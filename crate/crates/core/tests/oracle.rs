mod common;

use std::collections::HashSet;

use common::oracle::oracle_layers;
use hexpack::search::{LedgerSettings, SearchLedger};
use hexpack::CanonicalCode;

fn check(max: usize, reflection_invariant: bool) -> Vec<usize> {
    let oracle = oracle_layers(max, reflection_invariant).layers;
    let mut ledger = SearchLedger::new(LedgerSettings { reflection_invariant, ..LedgerSettings::default() });
    while ledger.layer < max {
        ledger.expand_layer(|_| true);
    }
    for (i, expected) in oracle.iter().enumerate() {
        let got: HashSet<&CanonicalCode> = ledger.layer_codes(i + 1).into_iter().collect();
        let want: HashSet<&CanonicalCode> = expected.iter().collect();
        assert_eq!(got, want, "layer {}", i + 1);
    }
    oracle.iter().map(Vec::len).collect()
}

// The default settings are checked through layer 4 by the acceptance suite.
#[test]
fn layers_match_brute_force_up_to_three() {
    assert_eq!(check(3, true), [1, 1, 3]);
}

#[test]
fn layers_match_brute_force_without_reflection() {
    let sizes = check(4, false);
    assert_eq!(&sizes[..2], [1, 1]);
    assert!(sizes[2] >= 3);
}
