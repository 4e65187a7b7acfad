use crate::error::{Error, Result};
use crate::instance::{SpendingPlan, PLAN_SUM_TOL};

#[derive(Debug, Clone, PartialEq)]
pub enum PlanKind {
    Uniform,
    /// Geometric decay with `first / last = imbalance`.
    Frontloaded { imbalance: f64 },
    /// Geometric growth with `last / first = imbalance`.
    Backloaded { imbalance: f64 },
    /// A spike every `period` rounds starting at round 1; the remaining rounds
    /// get `rho * low_factor` (default `1 / (2 T^{1/4})`) and the spikes carry
    /// the rest of the budget.
    Spiky { period: usize, low_factor: Option<f64> },
    /// Explicit `m x T` matrix.
    Custom(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanSpec {
    pub kind: PlanKind,
}

fn infeasible(msg: String) -> Error {
    Error::InfeasiblePlanSpec(msg)
}

fn geometric(horizon: usize, imbalance: f64, budget: f64, reverse: bool) -> Result<Vec<f64>> {
    if !(imbalance >= 1.0 && imbalance.is_finite()) {
        return Err(infeasible(format!("imbalance {imbalance} must be at least 1")));
    }
    let denom = (horizon.max(2) - 1) as f64;
    let mut w: Vec<f64> = (0..horizon)
        .map(|t| imbalance.powf(-(t as f64) / denom))
        .collect();
    if reverse {
        w.reverse();
    }
    let total: f64 = w.iter().sum();
    Ok(w.into_iter().map(|v| v * budget / total).collect())
}

/// Builds a plan whose rows all sum to `budget`.
pub fn generate_plan(spec: &PlanSpec, horizon: usize, num_resources: usize, budget: f64) -> Result<SpendingPlan> {
    if horizon == 0 || num_resources == 0 {
        return Err(infeasible("horizon and resource count must be positive".into()));
    }
    if !(budget >= 0.0) || budget > horizon as f64 {
        return Err(infeasible(format!("budget {budget} outside [0, T = {horizon}]")));
    }
    let t = horizon as f64;
    let rho = budget / t;
    let row = match &spec.kind {
        PlanKind::Uniform => vec![rho; horizon],
        PlanKind::Frontloaded { imbalance } => geometric(horizon, *imbalance, budget, false)?,
        PlanKind::Backloaded { imbalance } => geometric(horizon, *imbalance, budget, true)?,
        PlanKind::Spiky { period, low_factor } => {
            if *period < 2 {
                return Err(infeasible(format!("spike period {period} must be at least 2")));
            }
            let factor = low_factor.unwrap_or(1.0 / (2.0 * t.powf(0.25)));
            if !(0.0..=1.0).contains(&factor) {
                return Err(infeasible(format!("low factor {factor} outside [0, 1]")));
            }
            let low = rho * factor;
            let spikes = horizon.div_ceil(*period);
            let high = (budget - (horizon - spikes) as f64 * low) / spikes as f64;
            (0..horizon)
                .map(|j| if j % period == 0 { high } else { low })
                .collect()
        }
        PlanKind::Custom(entries) => {
            if entries.len() != num_resources {
                return Err(infeasible(format!(
                    "custom plan has {} rows, expected {num_resources}",
                    entries.len()
                )));
            }
            let plan = SpendingPlan::new(entries.clone()).map_err(|e| infeasible(e.to_string()))?;
            if plan.horizon() != horizon {
                return Err(infeasible(format!(
                    "custom plan has {} rounds, expected {horizon}",
                    plan.horizon()
                )));
            }
            check_sums(&plan, budget)?;
            return Ok(plan);
        }
    };
    let row = absorb_rounding(row, budget);
    if let Some(v) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(infeasible(format!("entry {v} outside [0, 1]")));
    }
    let plan = SpendingPlan::new(vec![row; num_resources]).map_err(|e| infeasible(e.to_string()))?;
    check_sums(&plan, budget)?;
    Ok(plan)
}

/// Moves the floating-point residual `budget - sum` into the largest entry, so
/// long rows still meet the absolute row-sum tolerance.
fn absorb_rounding(mut row: Vec<f64>, budget: f64) -> Vec<f64> {
    let sum: f64 = row.iter().sum();
    if let Some(max) = row.iter_mut().max_by(|a, b| a.total_cmp(b)) {
        *max += budget - sum;
    }
    row
}

fn check_sums(plan: &SpendingPlan, budget: f64) -> Result<()> {
    for i in 0..plan.num_resources() {
        let sum = plan.row_sum(i);
        if (sum - budget).abs() > PLAN_SUM_TOL {
            return Err(infeasible(format!(
                "row {i} sums to {sum}, expected {budget}"
            )));
        }
    }
    Ok(())
}
