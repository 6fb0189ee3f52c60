#![no_main]

use aniso_robin::domain::SolverOptions;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let _ = SolverOptions::from_json(s);
});
