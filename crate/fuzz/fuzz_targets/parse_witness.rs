#![no_main]

use hexpack::search::{replay_witness, Witness};
use hexpack::{MoveRules, Placement};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = text.parse::<Placement>();
    if let Ok(w) = text.parse::<Witness>() {
        assert_eq!(w.to_string().parse::<Witness>().expect("printed witness parses"), w);
        // Replay is bounded by the witness length; keep inputs small.
        if w.0.len() <= 12 {
            let _ = replay_witness(&w, &MoveRules::default());
        }
    }
});
