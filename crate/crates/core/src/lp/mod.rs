//! Dense linear programming: `max c.x  s.t.  A x <= b, E x = e, x >= 0`.
//!
//! A two-phase tableau simplex with Dantzig pricing that falls back to Bland's
//! rule after `5 (n + p + q)` pivots, which guarantees termination.

pub mod brute;
mod simplex;

use std::path::PathBuf;

use thiserror::Error;

/// Constraint satisfaction tolerance for reported optima.
pub const FEASIBILITY_TOL: f64 = 1e-7;
/// Pivots smaller than this in magnitude are treated as numerical breakdown.
pub const PIVOT_TOL: f64 = 1e-11;
/// Largest dense tableau (rows times columns) the solver will allocate.
pub const MAX_TABLEAU_CELLS: usize = 60_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("non-finite coefficient in {0}")]
    NonFinite(&'static str),
    #[error("simplex exceeded {0} pivots without terminating")]
    CycleDetected(usize),
    #[error("pivot magnitude {0:e} fell below the breakdown threshold")]
    NumericalBreakdown(f64),
    #[error("tableau with {rows} rows and {cols} columns exceeds the dense size limit")]
    TooLarge { rows: usize, cols: usize },
    #[error("could not write tableau trace: {0}")]
    Trace(String),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub ineq_rows: Vec<Vec<f64>>,
    pub ineq_rhs: Vec<f64>,
    pub eq_rows: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        Self {
            objective,
            ..Self::default()
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Adds `row . x <= rhs`.
    pub fn le(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.ineq_rows.push(row);
        self.ineq_rhs.push(rhs);
        self
    }

    /// Adds `row . x >= rhs` as a negated `<=` row.
    pub fn ge(self, row: Vec<f64>, rhs: f64) -> Self {
        self.le(row.into_iter().map(|v| -v).collect(), -rhs)
    }

    /// Adds `row . x = rhs`.
    pub fn eq(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.eq_rows.push(row);
        self.eq_rhs.push(rhs);
        self
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        let check_rows = |rows: &[Vec<f64>], rhs: &[f64], what| -> Result<(), LpError> {
            if rows.len() != rhs.len() {
                return Err(LpError::DimensionMismatch {
                    what,
                    expected: rows.len(),
                    found: rhs.len(),
                });
            }
            for row in rows {
                if row.len() != n {
                    return Err(LpError::DimensionMismatch {
                        what,
                        expected: n,
                        found: row.len(),
                    });
                }
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(LpError::NonFinite(what));
                }
            }
            if rhs.iter().any(|v| !v.is_finite()) {
                return Err(LpError::NonFinite(what));
            }
            Ok(())
        };
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(LpError::NonFinite("objective"));
        }
        check_rows(&self.ineq_rows, &self.ineq_rhs, "inequality rows")?;
        check_rows(&self.eq_rows, &self.eq_rhs, "equality rows")
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x)
    }

    /// Largest violation over all rows and sign constraints at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let ineq = self
            .ineq_rows
            .iter()
            .zip(&self.ineq_rhs)
            .map(|(r, b)| dot(r, x) - b);
        let eq = self
            .eq_rows
            .iter()
            .zip(&self.eq_rhs)
            .map(|(r, e)| (dot(r, x) - e).abs());
        let sign = x.iter().map(|v| -v);
        ineq.chain(eq).chain(sign).fold(0.0, f64::max)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal solution; empty unless `status` is `Optimal`.
    pub x: Vec<f64>,
    /// Optimal value; `-inf` when infeasible and `+inf` when unbounded.
    pub objective_value: f64,
    /// Number of pivots performed over both phases.
    pub pivots: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    /// Appends a line per pivot to this file.
    pub trace_path: Option<PathBuf>,
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    solve_lp_with(lp, &SolveOptions::default())
}

pub fn solve_lp_with(lp: &LinearProgram, opts: &SolveOptions) -> Result<LpSolution, LpError> {
    lp.validate()?;
    simplex::solve(lp, opts)
}
