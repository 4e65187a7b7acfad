//! Mean-based baselines: the best per-round mixtures that respect the plan,
//! the best fixed mixture, their error-relaxed versions, and regret bounds.

pub mod bounds;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::instance::SpendingPlan;
use crate::lp::{dot, solve_lp, LinearProgram, LpStatus};
use crate::trace::RunTrace;

pub use bounds::{
    entropic_dual_regret, error_penalty, exp3ix_primal_regret, hedge_primal_regret,
    ogd_dual_regret, regret_bound, BoundParams, Setting,
};

/// Violation below which a constraint-generation row counts as satisfied.
const ROW_TOL: f64 = 1e-9;
/// Rows added per constraint-generation pass.
const ROWS_PER_PASS: usize = 32;

/// Expected rewards `fbar[t][k]` and costs `cbar[t][k][i]`, zero-based `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanProfile {
    fbar: Vec<Vec<f64>>,
    cbar: Vec<Vec<Vec<f64>>>,
}

impl MeanProfile {
    pub fn new(fbar: Vec<Vec<f64>>, cbar: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if fbar.len() != cbar.len() {
            return Err(Error::DimensionMismatch {
                what: "cost rounds",
                expected: fbar.len(),
                found: cbar.len(),
            });
        }
        if fbar.is_empty() {
            return Err(Error::DegenerateDimensions {
                name: "horizon",
                value: 0.0,
            });
        }
        let k = fbar[0].len();
        let m = cbar[0].first().map_or(0, Vec::len);
        if k < 2 || m < 1 {
            return Err(Error::DegenerateDimensions {
                name: if k < 2 { "num_arms" } else { "num_resources" },
                value: if k < 2 { k as f64 } else { m as f64 },
            });
        }
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        for (f, c) in fbar.iter().zip(&cbar) {
            if f.len() != k || c.len() != k {
                return Err(Error::DimensionMismatch {
                    what: "arms per round",
                    expected: k,
                    found: f.len().min(c.len()),
                });
            }
            if c.iter().any(|row| row.len() != m) {
                return Err(Error::DimensionMismatch {
                    what: "resources per arm",
                    expected: m,
                    found: c.iter().map(Vec::len).find(|&l| l != m).unwrap_or(m),
                });
            }
            if !f.iter().all(|&v| in_unit(v)) || !c.iter().flatten().all(|&v| in_unit(v)) {
                return Err(Error::InvalidEnvironment("mean outside [0, 1]".into()));
            }
            if f[0] != 0.0 || c[0].iter().any(|&v| v != 0.0) {
                return Err(Error::InvalidEnvironment("void arm must have zero means".into()));
            }
        }
        Ok(Self { fbar, cbar })
    }

    pub fn horizon(&self) -> usize {
        self.fbar.len()
    }

    pub fn num_arms(&self) -> usize {
        self.fbar[0].len()
    }

    pub fn num_resources(&self) -> usize {
        self.cbar[0][0].len()
    }

    pub fn rewards(&self, t: usize) -> &[f64] {
        &self.fbar[t]
    }

    /// `K x m` cost matrix for round `t`.
    pub fn costs(&self, t: usize) -> &[Vec<f64>] {
        &self.cbar[t]
    }

    fn check_plan(&self, plan: &SpendingPlan) -> Result<()> {
        if plan.horizon() != self.horizon() {
            return Err(Error::DimensionMismatch {
                what: "plan horizon",
                expected: self.horizon(),
                found: plan.horizon(),
            });
        }
        if plan.num_resources() != self.num_resources() {
            return Err(Error::DimensionMismatch {
                what: "plan resources",
                expected: self.num_resources(),
                found: plan.num_resources(),
            });
        }
        Ok(())
    }

    /// Cost of every arm on resource `i` at round `t`.
    fn cost_row(&self, t: usize, i: usize) -> Vec<f64> {
        self.cbar[t].iter().map(|c| c[i]).collect()
    }
}

/// Nonnegative per-round slack `eps[i][t]` on the plan.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSchedule {
    eps: Vec<Vec<f64>>,
}

impl ErrorSchedule {
    pub fn new(eps: Vec<Vec<f64>>) -> Result<Self> {
        let width = eps.first().map_or(0, Vec::len);
        for row in &eps {
            if row.len() != width {
                return Err(Error::DimensionMismatch {
                    what: "error schedule rounds",
                    expected: width,
                    found: row.len(),
                });
            }
            if let Some(v) = row.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
                return Err(Error::InvalidParameters(format!("error term {v} must be nonnegative")));
            }
        }
        Ok(Self { eps })
    }

    pub fn uniform(num_resources: usize, horizon: usize, value: f64) -> Result<Self> {
        Self::new(vec![vec![value; horizon]; num_resources])
    }

    pub fn entry(&self, resource: usize, round: usize) -> f64 {
        self.eps[resource][round]
    }

    pub fn total(&self) -> f64 {
        self.eps.iter().flatten().sum()
    }

    fn check(&self, plan: &SpendingPlan) -> Result<()> {
        if self.eps.len() != plan.num_resources() {
            return Err(Error::DimensionMismatch {
                what: "error schedule resources",
                expected: plan.num_resources(),
                found: self.eps.len(),
            });
        }
        let width = self.eps.first().map_or(0, Vec::len);
        if width != plan.horizon() {
            return Err(Error::DimensionMismatch {
                what: "error schedule rounds",
                expected: plan.horizon(),
                found: width,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub opt_dynamic: f64,
    pub opt_static: f64,
    pub opt_dynamic_eps: Option<f64>,
    pub opt_static_eps: Option<f64>,
    pub per_round_dynamic_values: Vec<f64>,
}

fn optimal_value(lp: &LinearProgram, what: &str) -> Result<(f64, Vec<f64>)> {
    let sol = solve_lp(lp)?;
    match sol.status {
        LpStatus::Optimal => Ok((sol.objective_value, sol.x)),
        other => Err(Error::InvalidParameters(format!("{what} LP reported {other:?}"))),
    }
}

fn simplex_row(len: usize) -> Vec<f64> {
    vec![1.0; len]
}

/// Best mixture for one round: `max xi.f  s.t.  sum_k xi_k c_k[i] <= cap[i]`.
fn round_value(f: &[f64], c: &[Vec<f64>], caps: &[f64]) -> Result<f64> {
    let k = f.len();
    let mut lp = LinearProgram::new(f.to_vec()).eq(simplex_row(k), 1.0);
    for (i, &cap) in caps.iter().enumerate() {
        lp = lp.le(c.iter().map(|row| row[i]).collect(), cap);
    }
    Ok(optimal_value(&lp, "per-round")?.0)
}

fn round_key(f: &[f64], c: &[Vec<f64>], caps: &[f64]) -> Vec<u64> {
    f.iter()
        .chain(c.iter().flatten())
        .chain(caps)
        .map(|v| v.to_bits())
        .collect()
}

/// Sum of per-round optima, and the per-round values.
pub fn opt_dynamic(profile: &MeanProfile, plan: &SpendingPlan) -> Result<(f64, Vec<f64>)> {
    profile.check_plan(plan)?;
    let mut cache: HashMap<Vec<u64>, f64> = HashMap::new();
    let mut values = Vec::with_capacity(profile.horizon());
    for t in 0..profile.horizon() {
        let caps = plan.column(t);
        let key = round_key(profile.rewards(t), profile.costs(t), &caps);
        let v = match cache.get(&key) {
            Some(v) => *v,
            None => {
                let v = round_value(profile.rewards(t), profile.costs(t), &caps)?;
                cache.insert(key, v);
                v
            }
        };
        values.push(v);
    }
    Ok((values.iter().sum(), values))
}

/// Per-round optima computed as a single LP over all `T K` mixture weights.
/// Quadratic in size; kept for cross-checking the decomposition.
pub fn opt_dynamic_joint(profile: &MeanProfile, plan: &SpendingPlan) -> Result<f64> {
    profile.check_plan(plan)?;
    let (horizon, k, m) = (profile.horizon(), profile.num_arms(), profile.num_resources());
    let n = horizon * k;
    let objective: Vec<f64> = (0..horizon).flat_map(|t| profile.rewards(t).to_vec()).collect();
    let mut lp = LinearProgram::new(objective);
    for t in 0..horizon {
        let mut row = vec![0.0; n];
        row[t * k..(t + 1) * k].fill(1.0);
        lp = lp.eq(row, 1.0);
        for i in 0..m {
            let mut row = vec![0.0; n];
            row[t * k..(t + 1) * k].copy_from_slice(&profile.cost_row(t, i));
            lp = lp.le(row, plan.entry(i, t));
        }
    }
    Ok(optimal_value(&lp, "joint dynamic")?.0)
}

/// `max xi.objective` over the simplex subject to `rows`, solved by adding
/// violated rows to a small active set until none remain.
fn constraint_generation(objective: &[f64], rows: Vec<(Vec<f64>, f64)>, always: &[(Vec<f64>, f64)]) -> Result<f64> {
    let k = objective.len();
    let mut seen = HashMap::new();
    let mut unique: Vec<(Vec<f64>, f64)> = Vec::new();
    for (row, b) in rows {
        let mut key: Vec<u64> = row.iter().map(|v| v.to_bits()).collect();
        key.push(b.to_bits());
        if seen.insert(key, ()).is_none() {
            unique.push((row, b));
        }
    }
    // Tightest rows first.
    unique.sort_by(|a, b| a.1.total_cmp(&b.1));
    let initial = unique.len().min(4 * k + always.len());
    let mut active: Vec<bool> = (0..unique.len()).map(|j| j < initial).collect();
    loop {
        let mut lp = LinearProgram::new(objective.to_vec()).eq(simplex_row(k), 1.0);
        for (row, b) in always {
            lp = lp.le(row.clone(), *b);
        }
        for (j, (row, b)) in unique.iter().enumerate() {
            if active[j] {
                lp = lp.le(row.clone(), *b);
            }
        }
        let (value, x) = optimal_value(&lp, "fixed-mixture")?;
        let mut violated: Vec<(f64, usize)> = unique
            .iter()
            .enumerate()
            .filter(|(j, _)| !active[*j])
            .map(|(j, (row, b))| (dot(row, &x) - b, j))
            .filter(|(v, _)| *v > ROW_TOL)
            .collect();
        if violated.is_empty() {
            return Ok(value);
        }
        violated.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        for (_, j) in violated.into_iter().take(ROWS_PER_PASS) {
            active[j] = true;
        }
    }
}

fn total_rewards(profile: &MeanProfile) -> Vec<f64> {
    let mut total = vec![0.0; profile.num_arms()];
    for t in 0..profile.horizon() {
        for (s, f) in total.iter_mut().zip(profile.rewards(t)) {
            *s += f;
        }
    }
    total
}

/// Spend rows `sum_t cbar_t(k)[i]` per resource, for aggregate budget constraints.
fn aggregate_cost_rows(profile: &MeanProfile) -> Vec<Vec<f64>> {
    (0..profile.num_resources())
        .map(|i| {
            let mut row = vec![0.0; profile.num_arms()];
            for t in 0..profile.horizon() {
                for (s, c) in row.iter_mut().zip(profile.costs(t)) {
                    *s += c[i];
                }
            }
            row
        })
        .collect()
}

fn per_round_rows(profile: &MeanProfile, plan: &SpendingPlan, eps: Option<&ErrorSchedule>) -> Vec<(Vec<f64>, f64)> {
    let mut rows = Vec::with_capacity(profile.horizon() * profile.num_resources());
    for t in 0..profile.horizon() {
        for i in 0..profile.num_resources() {
            let slack = eps.map_or(0.0, |e| e.entry(i, t));
            rows.push((profile.cost_row(t, i), plan.entry(i, t) + slack));
        }
    }
    rows
}

/// Best fixed mixture that meets the plan in every round.
pub fn opt_static(profile: &MeanProfile, plan: &SpendingPlan) -> Result<f64> {
    profile.check_plan(plan)?;
    let rows = per_round_rows(profile, plan, None);
    constraint_generation(&total_rewards(profile), rows, &[])
}

/// Best fixed mixture meeting the relaxed plan `B_t + eps_t` and the aggregate
/// budget `B`.
pub fn opt_static_eps(profile: &MeanProfile, plan: &SpendingPlan, errs: &ErrorSchedule, budget: f64) -> Result<f64> {
    profile.check_plan(plan)?;
    errs.check(plan)?;
    let rows = per_round_rows(profile, plan, Some(errs));
    let always: Vec<(Vec<f64>, f64)> = aggregate_cost_rows(profile)
        .into_iter()
        .map(|row| (row, budget))
        .collect();
    constraint_generation(&total_rewards(profile), rows, &always)
}

/// Best per-round mixtures meeting the relaxed plan and the aggregate budget.
///
/// Rounds with identical means and caps share one mixture, weighted by their
/// multiplicity; averaging any optimal solution over such a group keeps it
/// feasible and optimal, so the compressed LP has the same value.
pub fn opt_dynamic_eps(profile: &MeanProfile, plan: &SpendingPlan, errs: &ErrorSchedule, budget: f64) -> Result<f64> {
    profile.check_plan(plan)?;
    errs.check(plan)?;
    let (k, m) = (profile.num_arms(), profile.num_resources());
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    // (representative round, caps, multiplicity)
    let mut groups: Vec<(usize, Vec<f64>, f64)> = Vec::new();
    for t in 0..profile.horizon() {
        let caps: Vec<f64> = (0..m).map(|i| plan.entry(i, t) + errs.entry(i, t)).collect();
        let key = round_key(profile.rewards(t), profile.costs(t), &caps);
        match index.get(&key) {
            Some(&g) => groups[g].2 += 1.0,
            None => {
                index.insert(key, groups.len());
                groups.push((t, caps, 1.0));
            }
        }
    }
    let n = groups.len() * k;
    let mut objective = vec![0.0; n];
    for (g, (t, _, mult)) in groups.iter().enumerate() {
        for (o, f) in objective[g * k..(g + 1) * k].iter_mut().zip(profile.rewards(*t)) {
            *o = mult * f;
        }
    }
    let mut lp = LinearProgram::new(objective);
    for (g, (t, caps, _)) in groups.iter().enumerate() {
        let mut row = vec![0.0; n];
        row[g * k..(g + 1) * k].fill(1.0);
        lp = lp.eq(row, 1.0);
        for (i, cap) in caps.iter().enumerate() {
            let mut row = vec![0.0; n];
            row[g * k..(g + 1) * k].copy_from_slice(&profile.cost_row(*t, i));
            lp = lp.le(row, *cap);
        }
    }
    for i in 0..m {
        let mut row = vec![0.0; n];
        for (g, (t, _, mult)) in groups.iter().enumerate() {
            for (r, c) in row[g * k..(g + 1) * k].iter_mut().zip(profile.costs(*t)) {
                *r = mult * c[i];
            }
        }
        lp = lp.le(row, budget);
    }
    Ok(optimal_value(&lp, "relaxed dynamic")?.0)
}

/// All baselines; the relaxed ones only when an error schedule is given.
pub fn oracle_report(
    profile: &MeanProfile,
    plan: &SpendingPlan,
    relaxed: Option<(&ErrorSchedule, f64)>,
) -> Result<OracleReport> {
    let (opt_dynamic, per_round_dynamic_values) = opt_dynamic(profile, plan)?;
    let opt_static = opt_static(profile, plan)?;
    let (opt_dynamic_eps, opt_static_eps) = match relaxed {
        Some((errs, budget)) => (
            Some(opt_dynamic_eps(profile, plan, errs, budget)?),
            Some(opt_static_eps(profile, plan, errs, budget)?),
        ),
        None => (None, None),
    };
    Ok(OracleReport {
        opt_dynamic,
        opt_static,
        opt_dynamic_eps,
        opt_static_eps,
        per_round_dynamic_values,
    })
}

/// `(OPT_D - reward, OPT_H - reward)`, unclipped.
pub fn realized_regrets(trace: &RunTrace, report: &OracleReport) -> (f64, f64) {
    (
        report.opt_dynamic - trace.total_reward,
        report.opt_static - trace.total_reward,
    )
}
