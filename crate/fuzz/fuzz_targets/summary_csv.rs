#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let (rows, _bad) = planpace::report::parse_summary(text);
    let report = planpace::report::aggregate(&rows);
    assert!(report.iter().map(|r| r.runs).sum::<usize>() == rows.len());
});
