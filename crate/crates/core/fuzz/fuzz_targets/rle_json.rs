#![no_main]

use libfuzzer_sys::fuzz_target;
use maskfuse::io::rle::{decode_rle_json, rle_decode, rle_encode};

fuzz_target!(|data: &[u8]| {
    if let Ok(mask) = decode_rle_json(data) {
        let canonical = rle_encode(&mask);
        assert_eq!(rle_decode(&canonical).unwrap(), mask);
    }
});
