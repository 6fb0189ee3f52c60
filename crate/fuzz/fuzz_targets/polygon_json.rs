#![no_main]

use aniso_robin::Polygon;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = Polygon::from_json(s) {
        assert!(p.area() > 0.0);
        let back = Polygon::from_json(&p.to_json()).expect("round trip");
        assert_eq!(back, p);
    }
});
