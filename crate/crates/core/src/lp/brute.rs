//! Grid enumeration used as an independent check on the simplex.
//!
//! Every point of `{0, h, 2h, ...}^n` inside the search box is tested against
//! the constraints, each relaxed by `h/2 * ||row||_1` so thin feasible regions
//! still contain grid points.

use rand::Rng;

use super::{dot, LinearProgram};

#[derive(Debug, Clone, PartialEq)]
pub enum BruteResult {
    Optimal { value: f64, x: Vec<f64> },
    Infeasible,
}

/// Upper end of the search box per variable: 2, tightened by any row that
/// bounds a single variable from above.
fn search_box(lp: &LinearProgram) -> Vec<f64> {
    let n = lp.num_vars();
    let mut upper = vec![2.0f64; n];
    for (row, &b) in lp.ineq_rows.iter().zip(&lp.ineq_rhs) {
        let nonzero: Vec<usize> = (0..n).filter(|&j| row[j] != 0.0).collect();
        if let [j] = nonzero[..] {
            if row[j] > 0.0 {
                upper[j] = upper[j].min((b / row[j]).max(0.0));
            }
        }
    }
    upper
}

pub fn lp_brute_check(lp: &LinearProgram, h: f64) -> BruteResult {
    assert!(h > 0.0, "grid step must be positive");
    let n = lp.num_vars();
    let upper = search_box(lp);
    // Snap to one extra step so a bound that is not a multiple of h is covered.
    let counts: Vec<usize> = upper.iter().map(|u| (u / h).floor() as usize + 1).collect();
    let slack = |row: &[f64]| 0.5 * h * row.iter().map(|v| v.abs()).sum::<f64>() + 1e-12;
    let ineq_slack: Vec<f64> = lp.ineq_rows.iter().map(|r| slack(r)).collect();
    let eq_slack: Vec<f64> = lp.eq_rows.iter().map(|r| slack(r)).collect();

    let mut idx = vec![0usize; n];
    let mut x = vec![0.0; n];
    let mut best: Option<(f64, Vec<f64>)> = None;
    loop {
        for j in 0..n {
            x[j] = (idx[j] as f64 * h).min(upper[j]);
        }
        let feasible = lp
            .ineq_rows
            .iter()
            .zip(&lp.ineq_rhs)
            .zip(&ineq_slack)
            .all(|((r, b), s)| dot(r, &x) <= b + s)
            && lp
                .eq_rows
                .iter()
                .zip(&lp.eq_rhs)
                .zip(&eq_slack)
                .all(|((r, e), s)| (dot(r, &x) - e).abs() <= *s);
        if feasible {
            let v = dot(&lp.objective, &x);
            if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                best = Some((v, x.clone()));
            }
        }
        // odometer increment
        let mut j = 0;
        loop {
            if j == n {
                return match best {
                    Some((value, x)) => BruteResult::Optimal { value, x },
                    None => BruteResult::Infeasible,
                };
            }
            idx[j] += 1;
            if idx[j] <= counts[j] {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// A random LP with a strictly feasible interior point, variable upper bounds in
/// `[0.3, 1]`, and occasionally one equality row.
pub fn random_bounded_lp<R: Rng + ?Sized>(rng: &mut R, n: usize, max_extra_rows: usize) -> LinearProgram {
    let objective: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut lp = LinearProgram::new(objective);
    for j in 0..n {
        let mut row = vec![0.0; n];
        row[j] = 1.0;
        lp = lp.le(row, rng.random_range(0.3..1.0));
    }
    let extra = rng.random_range(0..=max_extra_rows);
    for _ in 0..extra {
        let row: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        lp = lp.le(row, rng.random_range(0.35..1.0));
    }
    if rng.random_bool(0.2) {
        lp = lp.eq(vec![1.0; n], rng.random_range(0.1..0.3));
    }
    lp
}
