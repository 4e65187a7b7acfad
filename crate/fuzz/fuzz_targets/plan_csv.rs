#![no_main]

use libfuzzer_sys::fuzz_target;
use planpace_core::SpendingPlan;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(rows) = planpace::parse_plan_csv(text) else {
        return;
    };
    assert!(!rows.is_empty());
    let _ = SpendingPlan::new(rows);
});
