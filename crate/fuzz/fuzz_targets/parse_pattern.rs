#![no_main]

use hexpack::io::{parse_pattern, write_pattern};
use hexpack::canonical_code;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_pattern(text) {
        let code = canonical_code(&p, true);
        let again = parse_pattern(&write_pattern(&p)).expect("written pattern parses");
        assert_eq!(canonical_code(&again, true), code);
    }
});
