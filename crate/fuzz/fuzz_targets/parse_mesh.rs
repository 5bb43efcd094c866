#![no_main]

use hexpack::io::{parse_mesh, parse_mesh_raw, write_mesh};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_mesh_raw(text);
    if let Ok(doc) = parse_mesh(text) {
        let again = parse_mesh(&write_mesh(&doc.complex, doc.embedding.as_ref())).expect("written mesh parses");
        assert_eq!(again.complex, doc.complex);
    }
});
