#![no_main]

use libfuzzer_sys::fuzz_target;
use maskfuse::Grid;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(grid) = text.parse::<Grid>() {
        let v = grid.values();
        assert!(!v.is_empty());
        assert!(v.iter().all(|x| x.is_finite()));
        assert!(v.windows(2).all(|w| w[0] <= w[1]));
    }
});
