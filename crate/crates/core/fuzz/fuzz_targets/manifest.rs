#![no_main]

use libfuzzer_sys::fuzz_target;
use maskfuse::io::Manifest;

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = Manifest::from_json_slice(data, "/nonexistent") {
        let _ = m.validate_structure();
    }
});
