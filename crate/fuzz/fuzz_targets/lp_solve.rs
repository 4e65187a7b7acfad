#![no_main]

use libfuzzer_sys::fuzz_target;
use planpace_core::lp::{solve_lp, LinearProgram, LpStatus};

/// Header bytes pick sizes; every later byte is a coefficient in [-16, 16).
fn decode(data: &[u8]) -> Option<LinearProgram> {
    let (&[a, b, c], rest) = data.split_first_chunk::<3>()?;
    let n = 1 + a as usize % 5;
    let p = b as usize % 6;
    let q = c as usize % 3;
    let mut vals = rest.iter().map(|&v| (v as i8) as f64 / 8.0);
    let mut take = |k: usize| -> Option<Vec<f64>> { (0..k).map(|_| vals.next()).collect() };
    let mut lp = LinearProgram::new(take(n)?);
    for _ in 0..p {
        let row = take(n)?;
        lp = lp.le(row, take(1)?[0]);
    }
    for _ in 0..q {
        let row = take(n)?;
        lp = lp.eq(row, take(1)?[0]);
    }
    Some(lp)
}

fuzz_target!(|data: &[u8]| {
    let Some(lp) = decode(data) else {
        return;
    };
    let Ok(sol) = solve_lp(&lp) else {
        return;
    };
    if sol.status == LpStatus::Optimal {
        assert_eq!(sol.x.len(), lp.num_vars());
        assert!(lp.max_violation(&sol.x) <= 1e-6, "violation {}", lp.max_violation(&sol.x));
        assert!((lp.objective_at(&sol.x) - sol.objective_value).abs() <= 1e-6 * (1.0 + sol.objective_value.abs()));
    }
});
