use std::fs::File;
use std::io::{BufWriter, Write};

use super::{
    LinearProgram, LpError, LpSolution, LpStatus, SolveOptions, FEASIBILITY_TOL,
    MAX_TABLEAU_CELLS, PIVOT_TOL,
};

/// Entries below this are not considered as entering or ratio-test candidates.
const CANDIDATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

enum Outcome {
    Optimal,
    Unbounded,
}

struct Tableau {
    /// Constraint rows; the last entry of each is the right-hand side.
    rows: Vec<Vec<f64>>,
    /// Reduced costs `c_j - z_j`; last entry is minus the current objective.
    obj: Vec<f64>,
    basis: Vec<usize>,
    /// Columns barred from entering the basis.
    blocked: Vec<bool>,
    ncols: usize,
    pivots: usize,
    bland_after: usize,
    hard_cap: usize,
    trace: Option<BufWriter<File>>,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.rows[r][self.ncols]
    }

    fn set_objective(&mut self, cost: &[f64]) {
        let mut obj = vec![0.0; self.ncols + 1];
        obj[..cost.len()].copy_from_slice(cost);
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = cost.get(b).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for (o, v) in obj.iter_mut().zip(&self.rows[r]) {
                    *o -= cb * v;
                }
            }
        }
        for &b in &self.basis {
            obj[b] = 0.0;
        }
        self.obj = obj;
    }

    fn objective_value(&self) -> f64 {
        -self.obj[self.ncols]
    }

    fn entering(&self, bland: bool) -> Option<usize> {
        let candidates = (0..self.ncols).filter(|&j| !self.blocked[j] && self.obj[j] > CANDIDATE_TOL);
        if bland {
            candidates.min()
        } else {
            // Largest reduced cost; ties go to the lowest index.
            candidates.fold(None, |best: Option<usize>, j| match best {
                Some(b) if self.obj[b] >= self.obj[j] => Some(b),
                _ => Some(j),
            })
        }
    }

    fn leaving(&self, col: usize, bland: bool) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.rows.len() {
            let a = self.rows[r][col];
            if a <= CANDIDATE_TOL {
                continue;
            }
            let ratio = self.rhs(r).max(0.0) / a;
            best = match best {
                None => Some((r, ratio)),
                Some((br, bratio)) => {
                    let tie = (ratio - bratio).abs() <= 1e-12 * (1.0 + bratio.abs());
                    let better = if tie {
                        if bland {
                            self.basis[r] < self.basis[br]
                        } else {
                            a > self.rows[br][col]
                        }
                    } else {
                        ratio < bratio
                    };
                    if better {
                        Some((r, ratio))
                    } else {
                        Some((br, bratio))
                    }
                }
            };
        }
        best.map(|(r, _)| r)
    }

    fn pivot(&mut self, r: usize, c: usize, phase: Phase) -> Result<(), LpError> {
        let p = self.rows[r][c];
        if !(p.abs() >= PIVOT_TOL) {
            return Err(LpError::NumericalBreakdown(p.abs()));
        }
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        self.rows[r][c] = 1.0;
        let pivot_row = std::mem::take(&mut self.rows[r]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.obj[c] = 0.0;
        }
        if !pivot_row[self.ncols].is_finite() {
            return Err(LpError::NumericalBreakdown(p.abs()));
        }
        self.rows[r] = pivot_row;
        let leaving = self.basis[r];
        self.basis[r] = c;
        self.pivots += 1;
        if let Some(w) = self.trace.as_mut() {
            writeln!(
                w,
                "pivot {} phase {:?} enter {} leave {} row {} objective {:e}",
                self.pivots,
                phase,
                c,
                leaving,
                r,
                -self.obj[self.ncols]
            )
            .map_err(|e| LpError::Trace(e.to_string()))?;
        }
        Ok(())
    }

    fn run(&mut self, phase: Phase) -> Result<Outcome, LpError> {
        let mut iterations = 0usize;
        loop {
            if self.pivots >= self.hard_cap {
                return Err(LpError::CycleDetected(self.pivots));
            }
            let bland = iterations >= self.bland_after;
            let Some(col) = self.entering(bland) else {
                return Ok(Outcome::Optimal);
            };
            let Some(row) = self.leaving(col, bland) else {
                return Ok(Outcome::Unbounded);
            };
            self.pivot(row, col, phase)?;
            iterations += 1;
        }
    }

    fn dump(&mut self, label: &str) -> Result<(), LpError> {
        if let Some(w) = self.trace.as_mut() {
            writeln!(w, "tableau {label}").map_err(|e| LpError::Trace(e.to_string()))?;
            for (row, b) in self.rows.iter().zip(&self.basis) {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
                writeln!(w, "  x{b}: {}", cells.join(" ")).map_err(|e| LpError::Trace(e.to_string()))?;
            }
            let cells: Vec<String> = self.obj.iter().map(|v| format!("{v:.6}")).collect();
            writeln!(w, "  obj: {}", cells.join(" ")).map_err(|e| LpError::Trace(e.to_string()))?;
        }
        Ok(())
    }
}

pub(super) fn solve(lp: &LinearProgram, opts: &SolveOptions) -> Result<LpSolution, LpError> {
    let n = lp.num_vars();
    let p = lp.ineq_rows.len();
    let q = lp.eq_rows.len();
    let m = p + q;

    // Columns: structural, one slack or surplus per inequality, then artificials.
    let needs_artificial: Vec<bool> = lp
        .ineq_rhs
        .iter()
        .map(|b| *b < 0.0)
        .chain(std::iter::repeat_n(true, q))
        .collect();
    let n_art = needs_artificial.iter().filter(|a| **a).count();
    let ncols = n + p + n_art;
    if m.saturating_mul(ncols + 1) > MAX_TABLEAU_CELLS {
        return Err(LpError::TooLarge { rows: m, cols: ncols });
    }

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art_col = n + p;
    for i in 0..m {
        let mut row = vec![0.0; ncols + 1];
        let (coeffs, rhs) = if i < p {
            (&lp.ineq_rows[i], lp.ineq_rhs[i])
        } else {
            (&lp.eq_rows[i - p], lp.eq_rhs[i - p])
        };
        let sign = if rhs < 0.0 { -1.0 } else { 1.0 };
        for (v, a) in row.iter_mut().zip(coeffs) {
            *v = sign * a;
        }
        if i < p {
            row[n + i] = sign;
        }
        row[ncols] = sign * rhs;
        if needs_artificial[i] {
            row[art_col] = 1.0;
            basis.push(art_col);
            art_col += 1;
        } else {
            basis.push(n + i);
        }
        rows.push(row);
    }

    let trace = match &opts.trace_path {
        Some(path) => Some(BufWriter::new(
            File::create(path).map_err(|e| LpError::Trace(e.to_string()))?,
        )),
        None => None,
    };
    let size = n + p + q;
    let mut tab = Tableau {
        rows,
        obj: Vec::new(),
        basis,
        blocked: vec![false; ncols],
        ncols,
        pivots: 0,
        bland_after: 5 * size.max(1),
        hard_cap: 50 * size.max(1) + 10_000,
        trace,
    };

    if n_art > 0 {
        let mut cost = vec![0.0; ncols];
        for c in cost.iter_mut().skip(n + p) {
            *c = -1.0;
        }
        tab.set_objective(&cost);
        tab.dump("phase one start")?;
        tab.run(Phase::One)?;
        let scale = 1.0 + tab.rows.iter().map(|r| r[ncols].abs()).fold(0.0, f64::max);
        if tab.objective_value() < -FEASIBILITY_TOL * scale {
            finish_trace(&mut tab)?;
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: Vec::new(),
                objective_value: f64::NEG_INFINITY,
                pivots: tab.pivots,
            });
        }
        drive_out_artificials(&mut tab, n + p)?;
        for b in tab.blocked.iter_mut().skip(n + p) {
            *b = true;
        }
    }

    tab.set_objective(&lp.objective);
    tab.dump("phase two start")?;
    let outcome = tab.run(Phase::Two)?;
    finish_trace(&mut tab)?;
    if let Outcome::Unbounded = outcome {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: Vec::new(),
            objective_value: f64::INFINITY,
            pivots: tab.pivots,
        });
    }

    let mut x = vec![0.0; n];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rows[r][ncols].max(0.0);
        }
    }
    let objective_value = lp.objective_at(&x);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective_value,
        pivots: tab.pivots,
    })
}

/// Pivots basic artificials out on any usable column; rows where none exists
/// are linearly dependent and are dropped.
fn drive_out_artificials(tab: &mut Tableau, first_art: usize) -> Result<(), LpError> {
    let mut r = 0;
    while r < tab.rows.len() {
        if tab.basis[r] < first_art {
            r += 1;
            continue;
        }
        let col = (0..first_art)
            .filter(|&j| tab.rows[r][j].abs() > CANDIDATE_TOL)
            .max_by(|&a, &b| tab.rows[r][a].abs().total_cmp(&tab.rows[r][b].abs()).then(b.cmp(&a)));
        match col {
            Some(c) => {
                tab.pivot(r, c, Phase::One)?;
                r += 1;
            }
            None => {
                tab.rows.remove(r);
                tab.basis.remove(r);
            }
        }
    }
    Ok(())
}

fn finish_trace(tab: &mut Tableau) -> Result<(), LpError> {
    tab.dump("final")?;
    if let Some(w) = tab.trace.as_mut() {
        w.flush().map_err(|e| LpError::Trace(e.to_string()))?;
    }
    Ok(())
}
