#![no_main]

use libfuzzer_sys::fuzz_target;
use solidarity::cli::{parse_grid_levels, parse_levels};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(levels) = parse_levels(text) {
        assert!(levels.iter().all(|v| v.is_finite() && *v >= 0.0));
    }
    let _ = parse_grid_levels(text);
});
