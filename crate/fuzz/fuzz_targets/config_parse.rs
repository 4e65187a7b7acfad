#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(cfg) = planpace::parse_config(text, Path::new(".")) else {
        return;
    };
    // A config that validates must also yield its first instance.
    let t = cfg.horizons()[0];
    let _ = cfg.instance(t);
});
