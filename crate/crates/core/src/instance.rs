//! Problem instances: horizon, arms, resources, the common budget and the
//! per-round spending plan that splits it.

use crate::error::{Error, Result};

/// Absolute tolerance for plan row sums against the budget.
pub const PLAN_SUM_TOL: f64 = 1e-9;

/// Per-round, per-resource budget targets `B_t^(i)`, stored as `m` rows of
/// length `T`. Every entry lies in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpendingPlan {
    entries: Vec<Vec<f64>>,
}

impl SpendingPlan {
    /// Builds a plan from `m` rows of equal length with entries in `[0, 1]`.
    ///
    /// Row sums are checked against the budget by [`validate_instance`], not here.
    pub fn new(entries: Vec<Vec<f64>>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::DegenerateDimensions {
                name: "num_resources",
                value: 0.0,
            });
        }
        let horizon = entries[0].len();
        if horizon == 0 {
            return Err(Error::DegenerateDimensions {
                name: "horizon",
                value: 0.0,
            });
        }
        for (i, row) in entries.iter().enumerate() {
            if row.len() != horizon {
                return Err(Error::DimensionMismatch {
                    what: "plan row length",
                    expected: horizon,
                    found: row.len(),
                });
            }
            for (t, &v) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::EntryOutOfRange {
                        resource: i,
                        round: t,
                        value: v,
                    });
                }
            }
        }
        Ok(Self { entries })
    }

    /// Every entry equal to `rho` for `m` resources over `horizon` rounds.
    pub fn uniform(num_resources: usize, horizon: usize, rho: f64) -> Result<Self> {
        Self::new(vec![vec![rho; horizon]; num_resources])
    }

    pub fn num_resources(&self) -> usize {
        self.entries.len()
    }

    pub fn horizon(&self) -> usize {
        self.entries[0].len()
    }

    /// `B_t^(i)` with a zero-based round index.
    pub fn entry(&self, resource: usize, round: usize) -> f64 {
        self.entries[resource][round]
    }

    pub fn row(&self, resource: usize) -> &[f64] {
        &self.entries[resource]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.entries
    }

    /// Budgets of all resources at a zero-based round.
    pub fn column(&self, round: usize) -> Vec<f64> {
        self.entries.iter().map(|row| row[round]).collect()
    }

    pub fn row_sum(&self, resource: usize) -> f64 {
        self.entries[resource].iter().sum()
    }

    /// Smallest entry over all resources and rounds.
    pub fn rho_min(&self) -> f64 {
        self.entries
            .iter()
            .flat_map(|row| row.iter().copied())
            .fold(f64::INFINITY, f64::min)
    }

    /// Multiplies every entry by `factor`, which must lie in `[0, 1]`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&factor) {
            return Err(Error::InvalidParameters(format!(
                "plan scale factor {factor} outside [0, 1]"
            )));
        }
        Ok(Self {
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(|v| v * factor).collect())
                .collect(),
        })
    }
}

/// Raw instance description, validated into an [`Instance`].
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceParams {
    pub horizon: usize,
    pub num_arms: usize,
    pub num_resources: usize,
    pub budget: f64,
    pub plan: Vec<Vec<f64>>,
}

/// A validated problem instance. Arm 0 is the void action.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    horizon: usize,
    num_arms: usize,
    num_resources: usize,
    budget: f64,
    plan: SpendingPlan,
}

impl Instance {
    pub fn new(num_arms: usize, budget: f64, plan: SpendingPlan) -> Result<Self> {
        validate_instance(InstanceParams {
            horizon: plan.horizon(),
            num_arms,
            num_resources: plan.num_resources(),
            budget,
            plan: plan.entries,
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    pub fn num_resources(&self) -> usize {
        self.num_resources
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn plan(&self) -> &SpendingPlan {
        &self.plan
    }

    /// Average per-round budget `B / T`.
    pub fn rho(&self) -> f64 {
        self.budget / self.horizon as f64
    }

    pub fn rho_min(&self) -> f64 {
        self.plan.rho_min()
    }
}

/// Checks dimensions, entry ranges and row sums; returns the validated instance.
pub fn validate_instance(params: InstanceParams) -> Result<Instance> {
    let InstanceParams {
        horizon,
        num_arms,
        num_resources,
        budget,
        plan,
    } = params;
    if horizon < 1 {
        return Err(Error::DegenerateDimensions {
            name: "horizon",
            value: horizon as f64,
        });
    }
    if num_arms < 2 {
        return Err(Error::DegenerateDimensions {
            name: "num_arms",
            value: num_arms as f64,
        });
    }
    if num_resources < 1 {
        return Err(Error::DegenerateDimensions {
            name: "num_resources",
            value: num_resources as f64,
        });
    }
    if !budget.is_finite() || budget < 0.0 {
        return Err(Error::DegenerateDimensions {
            name: "budget",
            value: budget,
        });
    }
    if plan.len() != num_resources {
        return Err(Error::DimensionMismatch {
            what: "plan rows",
            expected: num_resources,
            found: plan.len(),
        });
    }
    let plan = SpendingPlan::new(plan)?;
    if plan.horizon() != horizon {
        return Err(Error::DimensionMismatch {
            what: "plan columns",
            expected: horizon,
            found: plan.horizon(),
        });
    }
    for i in 0..num_resources {
        let sum = plan.row_sum(i);
        if (sum - budget).abs() > PLAN_SUM_TOL {
            return Err(Error::PlanRowSumMismatch {
                resource: i,
                sum,
                budget,
            });
        }
    }
    Ok(Instance {
        horizon,
        num_arms,
        num_resources,
        budget,
        plan,
    })
}
