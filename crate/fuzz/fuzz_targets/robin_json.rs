#![no_main]

use aniso_robin::domain::RobinSpec;
use aniso_robin::NormSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(r) = RobinSpec::from_json(s) {
        let e = NormSpec::euclidean(2).unwrap();
        let b = r.beta_at(&e, [0.25, -0.5]);
        assert!(b >= 0.0);
    }
});
