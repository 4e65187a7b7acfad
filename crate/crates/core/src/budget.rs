//! Budget accounting: the hard stopping rule and remaining-budget updates.

use crate::error::{Error, Result};

/// Subtracts the realized costs from the remaining budgets.
///
/// No flooring: feasibility comes from [`should_force_void`] gating play while
/// every remaining budget is at least one and costs are at most one.
pub fn update_budget(remaining: &[f64], costs: &[f64]) -> Vec<f64> {
    debug_assert_eq!(remaining.len(), costs.len());
    remaining.iter().zip(costs).map(|(r, c)| r - c).collect()
}

/// True iff some remaining budget is strictly below one.
pub fn should_force_void(remaining: &[f64]) -> bool {
    remaining.iter().any(|&r| r < 1.0)
}

/// Rescales costs of resources with unequal budgets so that all resources
/// share the common budget `min_j B_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetNormalizer {
    factors: Vec<f64>,
    common_budget: f64,
}

/// Builds the normalizer for per-resource budgets; each resource-`i` cost is
/// divided by `B_i / min_j B_j`.
pub fn normalize_budgets(per_resource_budgets: &[f64]) -> Result<BudgetNormalizer> {
    if per_resource_budgets.is_empty() {
        return Err(Error::DegenerateDimensions {
            name: "num_resources",
            value: 0.0,
        });
    }
    for (i, &b) in per_resource_budgets.iter().enumerate() {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::NonPositiveBudget {
                resource: i,
                value: b,
            });
        }
    }
    let common_budget = per_resource_budgets
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(BudgetNormalizer {
        factors: per_resource_budgets
            .iter()
            .map(|b| b / common_budget)
            .collect(),
        common_budget,
    })
}

impl BudgetNormalizer {
    pub fn common_budget(&self) -> f64 {
        self.common_budget
    }

    pub fn factors(&self) -> &[f64] {
        &self.factors
    }

    /// Scales one per-resource cost vector. A scaled cost outside `[0, 1]` is an error.
    pub fn scale_costs(&self, costs: &[f64]) -> Result<Vec<f64>> {
        if costs.len() != self.factors.len() {
            return Err(Error::DimensionMismatch {
                what: "cost vector",
                expected: self.factors.len(),
                found: costs.len(),
            });
        }
        costs
            .iter()
            .zip(&self.factors)
            .enumerate()
            .map(|(i, (c, f))| {
                let v = c / f;
                if (0.0..=1.0).contains(&v) {
                    Ok(v)
                } else {
                    Err(Error::ScaledCostOutOfRange {
                        resource: i,
                        value: v,
                    })
                }
            })
            .collect()
    }

    /// Scales a `K x m` cost matrix (one row per arm).
    pub fn scale_cost_matrix(&self, costs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        costs.iter().map(|row| self.scale_costs(row)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn update_subtracts_componentwise() {
        assert_eq!(update_budget(&[5.0], &[0.7]), vec![4.3]);
        assert_eq!(update_budget(&[1.0, 2.0], &[0.0, 0.0]), vec![1.0, 2.0]);
        assert_eq!(update_budget(&[1.0], &[1.0]), vec![0.0]);
    }

    #[test]
    fn force_void_boundary_is_inclusive() {
        assert!(!should_force_void(&[1.0, 3.2]));
        assert!(should_force_void(&[0.999, 5.0]));
        assert!(should_force_void(&[0.0]));
    }

    #[test]
    fn equal_budgets_leave_costs_unchanged() {
        let n = normalize_budgets(&[2.0, 2.0]).unwrap();
        assert_eq!(n.factors(), &[1.0, 1.0]);
        assert_eq!(n.scale_costs(&[0.3, 0.9]).unwrap(), vec![0.3, 0.9]);
    }

    #[test]
    fn unequal_budgets_scale_down() {
        let n = normalize_budgets(&[2.0, 4.0]).unwrap();
        assert_eq!(n.common_budget(), 2.0);
        assert!((n.scale_costs(&[0.0, 0.8]).unwrap()[1] - 0.4).abs() < 1e-15);
        let n = normalize_budgets(&[1.0, 10.0]).unwrap();
        assert!((n.scale_costs(&[0.0, 0.05]).unwrap()[1] - 0.005).abs() < 1e-15);
    }

    #[test]
    fn scaled_cost_above_one_is_an_error() {
        let n = normalize_budgets(&[1.0, 2.0]).unwrap();
        assert!(matches!(
            n.scale_costs(&[1.5, 0.1]),
            Err(Error::ScaledCostOutOfRange { resource: 0, .. })
        ));
        assert!(normalize_budgets(&[1.0, 0.0]).is_err());
    }

    proptest! {
        #[test]
        fn force_void_is_monotone(
            r in proptest::collection::vec(0.0f64..3.0, 1..5),
            shrink in proptest::collection::vec(0.0f64..1.0, 5),
        ) {
            let lower: Vec<f64> = r.iter().zip(&shrink).map(|(a, s)| a * s).collect();
            if should_force_void(&r) {
                prop_assert!(should_force_void(&lower));
            }
        }
    }
}
