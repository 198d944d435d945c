#![no_main]

use libfuzzer_sys::fuzz_target;
use maskfuse::io::{read_records_csv, write_records_csv};

fuzz_target!(|data: &[u8]| {
    if let Ok(records) = read_records_csv(data) {
        let mut out = Vec::new();
        write_records_csv(&records, &mut out).unwrap();
        let again = read_records_csv(out.as_slice()).unwrap();
        assert_eq!(again.len(), records.len());
    }
});
