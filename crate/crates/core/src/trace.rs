//! Per-round run records and their CSV form.

use std::io::{self, Write};

use crate::mixture::{LagrangeVector, Mixture};

/// One round of interaction as seen by the harness.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutcome {
    /// One-based round index.
    pub t: usize,
    pub mixture: Mixture,
    pub arm: usize,
    pub reward: f64,
    pub costs: Vec<f64>,
    /// Remaining budgets after this round's costs were paid.
    pub remaining_budgets: Vec<f64>,
    /// Multipliers in effect for this round's decision or feedback.
    pub lambda: LagrangeVector,
    /// Some remaining budget was below one at the start of the round.
    pub forced_void: bool,
    /// Round masked by void-skip preprocessing; no learner updates happened.
    pub skipped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub outcomes: Vec<RoundOutcome>,
    /// First round after which some remaining budget fell below one (`T` if
    /// none, `0` if the initial budget is already below one).
    pub tau: usize,
    pub total_reward: f64,
    pub initial_budget: f64,
}

impl RunTrace {
    pub(crate) fn from_outcomes(outcomes: Vec<RoundOutcome>, initial_budget: f64) -> Self {
        let horizon = outcomes.len();
        let m = outcomes.first().map_or(0, |o| o.costs.len());
        let tau = if m > 0 && initial_budget < 1.0 {
            0
        } else {
            outcomes
                .iter()
                .find(|o| o.remaining_budgets.iter().any(|&r| r < 1.0))
                .map_or(horizon, |o| o.t)
        };
        let total_reward = outcomes.iter().map(|o| o.reward).sum();
        Self {
            outcomes,
            tau,
            total_reward,
            initial_budget,
        }
    }

    pub fn horizon(&self) -> usize {
        self.outcomes.len()
    }

    pub fn num_resources(&self) -> usize {
        self.outcomes.first().map_or(0, |o| o.costs.len())
    }

    /// Total cost paid on each resource.
    pub fn spend(&self) -> Vec<f64> {
        let mut spend = vec![0.0; self.num_resources()];
        for o in &self.outcomes {
            for (s, c) in spend.iter_mut().zip(&o.costs) {
                *s += c;
            }
        }
        spend
    }

    /// Largest prefix overspend `max_{i, t} (sum_{s <= t} c_s[i] - B)`; a
    /// feasible run has a nonpositive value.
    pub fn max_prefix_overspend(&self) -> f64 {
        let mut spend = vec![0.0; self.num_resources()];
        let mut worst = f64::NEG_INFINITY;
        for o in &self.outcomes {
            for (s, c) in spend.iter_mut().zip(&o.costs) {
                *s += c;
                worst = worst.max(*s - self.initial_budget);
            }
        }
        worst
    }

    pub fn is_budget_feasible(&self) -> bool {
        self.max_prefix_overspend() <= 0.0
    }

    /// Writes `t,arm,forced_void,reward,cost_*,remaining_*,lambda_*,cum_reward`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let m = self.num_resources();
        let mut header = vec!["t".to_string(), "arm".into(), "forced_void".into(), "reward".into()];
        header.extend((0..m).map(|i| format!("cost_{i}")));
        header.extend((0..m).map(|i| format!("remaining_{i}")));
        header.extend((0..m).map(|i| format!("lambda_{i}")));
        header.push("cum_reward".into());
        writeln!(out, "{}", header.join(","))?;

        let mut cum = 0.0;
        for o in &self.outcomes {
            cum += o.reward;
            let mut fields = vec![
                o.t.to_string(),
                o.arm.to_string(),
                o.forced_void.to_string(),
                o.reward.to_string(),
            ];
            fields.extend(o.costs.iter().map(f64::to_string));
            fields.extend(o.remaining_budgets.iter().map(f64::to_string));
            fields.extend(o.lambda.values().iter().map(f64::to_string));
            fields.push(cum.to_string());
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcome(t: usize, cost: f64, remaining: f64) -> RoundOutcome {
        RoundOutcome {
            t,
            mixture: Mixture::point_mass(2, 1),
            arm: if cost > 0.0 { 1 } else { 0 },
            reward: cost,
            costs: vec![cost],
            remaining_budgets: vec![remaining],
            lambda: LagrangeVector::zeros(1, 2.0).unwrap(),
            forced_void: false,
            skipped: false,
        }
    }

    #[test]
    fn tau_and_spend() {
        let trace = RunTrace::from_outcomes(
            vec![outcome(1, 0.5, 1.5), outcome(2, 1.0, 0.5), outcome(3, 0.0, 0.5)],
            2.0,
        );
        assert_eq!(trace.tau, 2);
        assert_eq!(trace.spend(), vec![1.5]);
        assert!(trace.is_budget_feasible());
        assert_eq!(trace.total_reward, 1.5);
    }

    #[test]
    fn csv_layout() {
        let trace = RunTrace::from_outcomes(vec![outcome(1, 0.25, 1.75)], 2.0);
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,arm,forced_void,reward,cost_0,remaining_0,lambda_0,cum_reward"
        );
        assert_eq!(lines.next().unwrap(), "1,1,false,0.25,0.25,1.75,0,0.25");
    }
}
