#![no_main]

use hexpack::io::{parse_coords, write_coords};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(coords) = parse_coords(text) {
        assert_eq!(parse_coords(&write_coords(&coords)).expect("written coords parse"), coords);
    }
});
