#![no_main]

use libfuzzer_sys::fuzz_target;
use maskfuse::io::stack::decode_stack_json;
use maskfuse::io::CandidateStack;

fuzz_target!(|data: &[u8]| {
    if let Ok(set) = decode_stack_json(data) {
        let json = CandidateStack::from_set(&set, None).to_json();
        assert_eq!(decode_stack_json(json.as_bytes()).unwrap(), set);
    }
});
