#![no_main]

use libfuzzer_sys::fuzz_target;
use maskfuse::io::{decode_mask_bytes, encode_png};

fuzz_target!(|data: &[u8]| {
    if let Ok(mask) = decode_mask_bytes(data) {
        assert_eq!(decode_mask_bytes(&encode_png(&mask)).unwrap(), mask);
    }
});
