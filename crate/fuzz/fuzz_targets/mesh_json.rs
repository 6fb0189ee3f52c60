#![no_main]

use aniso_robin::domain::Mesh;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(m) = Mesh::from_json(s) {
        assert!(m.area() > 0.0);
        let _ = m.boundary_nodes();
        let _ = Mesh::from_json(&m.to_json()).expect("round trip");
    }
});
