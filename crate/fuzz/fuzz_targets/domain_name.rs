#![no_main]

use aniso_robin::domain::presets;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if s.len() > 64 {
        return;
    }
    if let Ok(p) = presets::named(s) {
        assert!(p.area() > 0.0);
    }
});
