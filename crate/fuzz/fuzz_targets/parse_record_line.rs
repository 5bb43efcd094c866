#![no_main]

use hexpack::search::{format_record_line, parse_record_line};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((code, _, witness)) = parse_record_line(text) {
        let line = format_record_line(&code, &witness);
        let (c, _, w) = parse_record_line(&line).expect("formatted record parses");
        assert_eq!((c, w), (code, witness));
    }
});
