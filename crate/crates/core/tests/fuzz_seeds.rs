//! Replays the fuzz corpus seeds through the decoder entry points, with the
//! same round-trip checks the fuzz targets make.

use std::path::PathBuf;

use maskfuse::io::rle::{decode_rle_json, rle_decode, rle_encode};
use maskfuse::io::stack::decode_stack_json;
use maskfuse::io::{decode_mask_bytes, encode_png, read_records_csv, write_records_csv, CandidateStack, Manifest};
use maskfuse::Grid;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn rle_json_seeds() {
    for (name, data) in seeds("rle_json") {
        let mask = decode_rle_json(&data).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(rle_decode(&rle_encode(&mask)).unwrap(), mask, "{name}");
    }
}

#[test]
fn mask_image_seeds() {
    let mut decoded = 0;
    for (_, data) in seeds("mask_image") {
        if let Ok(mask) = decode_mask_bytes(&data) {
            assert_eq!(decode_mask_bytes(&encode_png(&mask)).unwrap(), mask);
            decoded += 1;
        }
    }
    assert_eq!(decoded, 2, "gray.png and rle.json decode; rgb.png is rejected");
}

#[test]
fn candidate_stack_seeds() {
    for (name, data) in seeds("candidate_stack") {
        let set = decode_stack_json(&data).unwrap_or_else(|e| panic!("{name}: {e}"));
        let json = CandidateStack::from_set(&set, None).to_json();
        assert_eq!(decode_stack_json(json.as_bytes()).unwrap(), set);
    }
}

#[test]
fn manifest_seeds() {
    for (name, data) in seeds("manifest") {
        let m = Manifest::from_json_slice(&data, "/nonexistent").unwrap_or_else(|e| panic!("{name}: {e}"));
        m.validate_structure().unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn records_csv_seeds() {
    for (name, data) in seeds("records_csv") {
        let records = read_records_csv(data.as_slice()).unwrap_or_else(|e| panic!("{name}: {e}"));
        let mut out = Vec::new();
        write_records_csv(&records, &mut out).unwrap();
        assert_eq!(read_records_csv(out.as_slice()).unwrap(), records, "{name}");
    }
}

#[test]
fn grid_spec_seeds() {
    for (name, data) in seeds("grid_spec") {
        let text = String::from_utf8(data).unwrap();
        let grid: Grid = text.parse().unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(grid.values().windows(2).all(|w| w[0] <= w[1]));
    }
}
