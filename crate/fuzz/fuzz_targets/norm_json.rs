#![no_main]

use aniso_robin::NormSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(n) = NormSpec::from_json(s) {
        if n.dim() == 2 {
            let v = n.value2([0.3, -1.2]);
            assert!(v.is_finite() && v > 0.0);
            assert!(n.polar2([0.3, -1.2]).is_finite());
        }
        assert!(n.kappa() > 0.0);
    }
});
