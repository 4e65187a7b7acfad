//! Round loops for the three settings.

use rand::Rng;

use super::{expected_spend, lagrangian_scores, ora_best_response, LearnerPlan};
use crate::budget::{should_force_void, update_budget};
use crate::environments::{BanditFacade, Environment};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::minimizers::{DualMinimizer, Exp3Ix, Hedge};
use crate::mixture::Mixture;
use crate::trace::{RoundOutcome, RunTrace};

fn check_learner(inst: &Instance, dual: &dyn DualMinimizer, learner: &LearnerPlan) -> Result<()> {
    if learner.mask.len() != inst.horizon() || learner.targets.horizon() != inst.horizon() {
        return Err(Error::DimensionMismatch {
            what: "learner plan rounds",
            expected: inst.horizon(),
            found: learner.mask.len(),
        });
    }
    if learner.targets.num_resources() != inst.num_resources() {
        return Err(Error::DimensionMismatch {
            what: "learner plan resources",
            expected: inst.num_resources(),
            found: learner.targets.num_resources(),
        });
    }
    if dual.select().values().len() != inst.num_resources() {
        return Err(Error::DimensionMismatch {
            what: "dual dimension",
            expected: inst.num_resources(),
            found: dual.select().values().len(),
        });
    }
    Ok(())
}

/// `spend - B_t`, the gradient handed to the dual.
fn dual_gradient(spend: &[f64], targets: &[f64]) -> Vec<f64> {
    spend.iter().zip(targets).map(|(s, b)| s - b).collect()
}

fn skipped_round(t: usize, num_arms: usize, remaining: &[f64], dual: &dyn DualMinimizer) -> RoundOutcome {
    RoundOutcome {
        t,
        mixture: Mixture::point_mass(num_arms, 0),
        arm: 0,
        reward: 0.0,
        costs: vec![0.0; remaining.len()],
        remaining_budgets: remaining.to_vec(),
        lambda: dual.select(),
        forced_void: should_force_void(remaining),
        skipped: true,
    }
}

/// Dual learner with the functions revealed before acting: best-respond to
/// the current multipliers, play unless some budget is below one, then feed
/// the dual the expected overspend of the best response.
pub fn run_ora(inst: &Instance, env: &Environment, dual: &mut dyn DualMinimizer, learner: &LearnerPlan) -> Result<RunTrace> {
    check_learner(inst, dual, learner)?;
    let (k, m) = (inst.num_arms(), inst.num_resources());
    let mut remaining = vec![inst.budget(); m];
    let mut outcomes = Vec::with_capacity(inst.horizon());
    for t in 1..=inst.horizon() {
        if learner.mask[t - 1] {
            outcomes.push(skipped_round(t, k, &remaining, dual));
            continue;
        }
        let (f, c) = env.sample_round(t);
        let lambda = dual.select();
        let xi = ora_best_response(&f, &c, &lambda);
        let forced = should_force_void(&remaining);
        let arm = if forced { 0 } else { xi.sample_with(0.0) };
        let (reward, costs) = (f[arm], c[arm].clone());
        remaining = update_budget(&remaining, &costs);
        let grad = dual_gradient(&expected_spend(&c, &xi), &learner.targets.column(t - 1));
        dual.receive(&grad);
        outcomes.push(RoundOutcome {
            t,
            mixture: xi,
            arm,
            reward,
            costs,
            remaining_budgets: remaining.clone(),
            lambda,
            forced_void: forced,
            skipped: false,
        });
    }
    Ok(RunTrace::from_outcomes(outcomes, inst.budget()))
}

/// Primal-dual learner with full feedback: Hedge over arms on the per-round
/// Lagrangian, dual fed by expected spend under the primal mixture.
pub fn run_olrc_full<R: Rng + ?Sized>(
    inst: &Instance,
    env: &Environment,
    primal: &mut Hedge,
    dual: &mut dyn DualMinimizer,
    learner: &LearnerPlan,
    rng: &mut R,
) -> Result<RunTrace> {
    check_learner(inst, dual, learner)?;
    let (k, m) = (inst.num_arms(), inst.num_resources());
    if primal.mixture().num_arms() != k {
        return Err(Error::DimensionMismatch {
            what: "primal arms",
            expected: k,
            found: primal.mixture().num_arms(),
        });
    }
    let mut remaining = vec![inst.budget(); m];
    let mut outcomes = Vec::with_capacity(inst.horizon());
    for t in 1..=inst.horizon() {
        let u: f64 = rng.random();
        if learner.mask[t - 1] {
            outcomes.push(skipped_round(t, k, &remaining, dual));
            continue;
        }
        let xi = primal.mixture();
        let forced = should_force_void(&remaining);
        let arm = if forced { 0 } else { xi.sample_with(u) };
        let (f, c) = env.sample_round(t);
        let (reward, costs) = (f[arm], c[arm].clone());
        remaining = update_budget(&remaining, &costs);
        let lambda = dual.select();
        primal.receive(&lagrangian_scores(&f, &c, &lambda));
        let grad = dual_gradient(&expected_spend(&c, &xi), &learner.targets.column(t - 1));
        dual.receive(&grad);
        outcomes.push(RoundOutcome {
            t,
            mixture: xi,
            arm,
            reward,
            costs,
            remaining_budgets: remaining.clone(),
            lambda,
            forced_void: forced,
            skipped: false,
        });
    }
    Ok(RunTrace::from_outcomes(outcomes, inst.budget()))
}

/// Primal-dual learner under bandit feedback. Only the played arm's reward
/// and costs are ever read.
pub fn run_olrc_bandit<R: Rng + ?Sized>(
    inst: &Instance,
    env: BanditFacade<'_>,
    primal: &mut Exp3Ix,
    dual: &mut dyn DualMinimizer,
    learner: &LearnerPlan,
    rng: &mut R,
) -> Result<RunTrace> {
    check_learner(inst, dual, learner)?;
    let (k, m) = (inst.num_arms(), inst.num_resources());
    if primal.mixture().num_arms() != k {
        return Err(Error::DimensionMismatch {
            what: "primal arms",
            expected: k,
            found: primal.mixture().num_arms(),
        });
    }
    let mut remaining = vec![inst.budget(); m];
    let mut outcomes = Vec::with_capacity(inst.horizon());
    for t in 1..=inst.horizon() {
        let u: f64 = rng.random();
        if learner.mask[t - 1] {
            outcomes.push(skipped_round(t, k, &remaining, dual));
            continue;
        }
        let xi = primal.mixture();
        let forced = should_force_void(&remaining);
        let arm = if forced { 0 } else { xi.sample_with(u) };
        let (reward, costs) = env.play(t, arm);
        remaining = update_budget(&remaining, &costs);
        let lambda = dual.select();
        primal.step(arm, reward - lambda.dot(&costs))?;
        let grad = dual_gradient(&costs, &learner.targets.column(t - 1));
        dual.receive(&grad);
        outcomes.push(RoundOutcome {
            t,
            mixture: xi,
            arm,
            reward,
            costs,
            remaining_budgets: remaining.clone(),
            lambda,
            forced_void: forced,
            skipped: false,
        });
    }
    Ok(RunTrace::from_outcomes(outcomes, inst.budget()))
}
