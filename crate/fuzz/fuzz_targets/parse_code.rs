#![no_main]

use hexpack::CanonicalCode;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(code) = CanonicalCode::from_bytes(data.to_vec()) {
        assert_eq!(CanonicalCode::from_hex(&code.to_hex()).expect("hex form parses"), code);
        let _ = (code.quad_count(), code.vertex_count(), code.reflection_invariant());
    }
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = CanonicalCode::from_hex(text);
    }
});
