//! Dual (functions seen first) and primal-dual (feedback after acting)
//! learners, the meta procedures for imbalanced plans, and void-skip.

mod preprocess;
mod runners;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::environments::Environment;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::minimizers::{
    default_learning_rate, DualMinimizer, EntropicDual, Exp3Ix, Hedge, MinimizerConfig,
    MinimizerKind, OgdDual, PayoffRange,
};
use crate::mixture::{LagrangeVector, Mixture};
use crate::oracles::{
    entropic_dual_regret, exp3ix_primal_regret, hedge_primal_regret, ogd_dual_regret,
    regret_bound, BoundParams,
};
use crate::trace::RunTrace;

pub use crate::oracles::Setting;
pub use preprocess::{meta_transform, void_skip_preprocess, LearnerPlan, MetaTransform, VoidSkip};
pub use runners::{run_olrc_bandit, run_olrc_full, run_ora};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualKind {
    /// Projected gradient ascent.
    Euclidean,
    /// Exponentiated weights over the scaled simplex.
    Entropic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimalKind {
    Hedge,
    Exp3Ix,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgorithmSpec {
    pub setting: Setting,
    pub meta_rescale: bool,
    pub void_skip: bool,
    pub dual_kind: DualKind,
    /// Required for the primal-dual settings, absent for ORA.
    pub primal_kind: Option<PrimalKind>,
    /// Anytime `eta_t` schedules for the arm-level minimizers.
    pub time_varying: bool,
    /// Treat any clamped payoff as a run failure.
    pub strict: bool,
}

impl AlgorithmSpec {
    /// Plain learner with the natural primal for `setting`.
    pub fn new(setting: Setting) -> Self {
        let primal_kind = match setting {
            Setting::Ora => None,
            Setting::OlrcFull => Some(PrimalKind::Hedge),
            Setting::OlrcBandit => Some(PrimalKind::Exp3Ix),
        };
        Self {
            setting,
            meta_rescale: false,
            void_skip: false,
            dual_kind: DualKind::Euclidean,
            primal_kind,
            time_varying: setting == Setting::OlrcBandit,
            strict: false,
        }
    }

    pub fn with_meta(mut self, meta: bool) -> Self {
        self.meta_rescale = meta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidAlgorithmSpec(msg.into()));
        if self.meta_rescale && self.void_skip {
            return bad("meta rescaling and void-skip are mutually exclusive");
        }
        match (self.setting, self.primal_kind) {
            (Setting::Ora, None) => Ok(()),
            (Setting::Ora, Some(_)) => bad("ORA takes no primal minimizer"),
            (Setting::OlrcFull, Some(PrimalKind::Hedge)) => Ok(()),
            (Setting::OlrcBandit, Some(PrimalKind::Exp3Ix)) => Ok(()),
            (Setting::OlrcFull, _) => bad("full feedback needs the hedge primal"),
            (Setting::OlrcBandit, _) => bad("bandit feedback needs the exp3ix primal"),
        }
    }

    pub fn name(&self) -> String {
        let mut name = self.setting.name().to_string();
        if self.meta_rescale {
            name.push_str("+meta");
        }
        if self.void_skip {
            name.push_str("+voidskip");
        }
        if self.dual_kind == DualKind::Entropic {
            name.push_str("+entropic");
        }
        name
    }
}

/// Pieces of the per-round Lagrangian at a mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangianTerms {
    /// `E_xi f`.
    pub reward_part: f64,
    /// `sum_i lambda[i] E_xi c[i]`.
    pub penalty_part: f64,
    /// `reward - penalty`, or `reward + lambda . (B_t - E_xi c)` when targets
    /// are given.
    pub value: f64,
}

pub fn lagrangian_terms(
    f: &[f64],
    c: &[Vec<f64>],
    xi: &Mixture,
    lambda: &LagrangeVector,
    targets: Option<&[f64]>,
) -> LagrangianTerms {
    let reward_part = xi.expectation(f);
    let spend = expected_spend(c, xi);
    let penalty_part = lambda.dot(&spend);
    let value = match targets {
        None => reward_part - penalty_part,
        Some(b) => reward_part + lambda.dot(b) - penalty_part,
    };
    LagrangianTerms {
        reward_part,
        penalty_part,
        value,
    }
}

/// `E_xi c[i]` for each resource.
pub fn expected_spend(c: &[Vec<f64>], xi: &Mixture) -> Vec<f64> {
    let m = c.first().map_or(0, Vec::len);
    (0..m)
        .map(|i| xi.probs().iter().zip(c).map(|(p, row)| p * row[i]).sum())
        .collect()
}

/// Score `f(k) - lambda . c(k)` of every arm.
pub fn lagrangian_scores(f: &[f64], c: &[Vec<f64>], lambda: &LagrangeVector) -> Vec<f64> {
    f.iter().zip(c).map(|(fk, ck)| fk - lambda.dot(ck)).collect()
}

/// Point mass on the best arm for the current multipliers; ties go to the
/// lowest index.
pub fn ora_best_response(f: &[f64], c: &[Vec<f64>], lambda: &LagrangeVector) -> Mixture {
    let scores = lagrangian_scores(f, c, lambda);
    let mut best = 0;
    for (k, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = k;
        }
    }
    Mixture::point_mass(f.len(), best)
}

/// Everything a harness needs from one run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trace: RunTrace,
    pub learner: LearnerPlan,
    /// Dual and primal regret terms used in the bound, in unit-range units.
    pub r_dual: f64,
    pub r_primal: f64,
    pub clamp_events: usize,
}

pub(crate) fn build_dual(kind: DualKind, m: usize, radius: f64, horizon: usize) -> Result<Box<dyn DualMinimizer>> {
    Ok(match kind {
        DualKind::Euclidean => {
            let rate = default_learning_rate(MinimizerKind::Ogd, m, radius, 1.0, horizon)?;
            Box::new(OgdDual::new(m, radius, rate.eta)?)
        }
        DualKind::Entropic => Box::new(EntropicDual::new(m, radius)?),
    })
}

/// Primal payoff range `[-D, 1 + D]`.
pub fn primal_range(radius: f64) -> Result<PayoffRange> {
    PayoffRange::new(-radius, 1.0 + radius)
}

impl RunOutput {
    /// Closed-form bound for this run's configuration. Void-skip adds the
    /// number of rounds it sat out.
    pub fn theoretical_bound(&self, spec: &AlgorithmSpec, inst: &Instance, delta: f64, delta_p: f64) -> Result<f64> {
        let params = BoundParams {
            horizon: inst.horizon(),
            rho: inst.rho(),
            rho_min: self.learner.rho_min_used,
            r_dual: self.r_dual,
            r_primal: self.r_primal,
            delta,
            delta_p,
        };
        let bound = regret_bound(spec.setting, self.learner.meta_applied, &params)?;
        Ok(bound + self.learner.masked_count() as f64)
    }
}

/// Regret terms of the minimizers `spec` would build.
pub fn minimizer_regrets(spec: &AlgorithmSpec, inst: &Instance, delta_p: f64) -> (f64, f64) {
    let (m, k, t) = (inst.num_resources(), inst.num_arms(), inst.horizon());
    let r_dual = match spec.dual_kind {
        DualKind::Euclidean => ogd_dual_regret(m, t),
        DualKind::Entropic => entropic_dual_regret(m, t),
    };
    let r_primal = match spec.primal_kind {
        None => 0.0,
        Some(PrimalKind::Hedge) => hedge_primal_regret(k, t, spec.time_varying),
        Some(PrimalKind::Exp3Ix) => exp3ix_primal_regret(k, t, delta_p, spec.time_varying),
    };
    (r_dual, r_primal)
}

/// Builds the learner plan and default minimizers for `spec` and runs it.
pub fn run_algorithm(spec: &AlgorithmSpec, inst: &Instance, env: &Environment, seed: u64, delta_p: f64) -> Result<RunOutput> {
    spec.validate()?;
    if env.num_arms() != inst.num_arms() || env.num_resources() != inst.num_resources() {
        return Err(Error::DimensionMismatch {
            what: "environment arms",
            expected: inst.num_arms(),
            found: env.num_arms(),
        });
    }
    if env.horizon() < inst.horizon() {
        return Err(Error::DimensionMismatch {
            what: "environment horizon",
            expected: inst.horizon(),
            found: env.horizon(),
        });
    }
    let learner = if spec.meta_rescale {
        LearnerPlan::meta(inst)?
    } else if spec.void_skip {
        LearnerPlan::void_skip(inst)?
    } else {
        LearnerPlan::plain(inst)?
    };
    let (m, k, t) = (inst.num_resources(), inst.num_arms(), inst.horizon());
    let mut dual = build_dual(spec.dual_kind, m, learner.radius, t)?;
    let cfg = MinimizerConfig {
        time_varying: spec.time_varying,
        ..MinimizerConfig::new(primal_range(learner.radius)?, t)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (trace, primal_clamps) = match spec.setting {
        Setting::Ora => (run_ora(inst, env, dual.as_mut(), &learner)?, 0),
        Setting::OlrcFull => {
            let mut primal = Hedge::from_config(k, &cfg)?;
            let trace = run_olrc_full(inst, env, &mut primal, dual.as_mut(), &learner, &mut rng)?;
            (trace, primal.clamp_events())
        }
        Setting::OlrcBandit => {
            let mut primal = Exp3Ix::from_config(k, &cfg)?;
            let trace = run_olrc_bandit(inst, env.bandit(), &mut primal, dual.as_mut(), &learner, &mut rng)?;
            (trace, primal.clamp_events())
        }
    };
    let clamp_events = primal_clamps + dual.clamp_events();
    if spec.strict && clamp_events > 0 {
        return Err(Error::ClampedPayoffs { count: clamp_events });
    }
    let (r_dual, r_primal) = minimizer_regrets(spec, inst, delta_p);
    Ok(RunOutput {
        trace,
        learner,
        r_dual,
        r_primal,
        clamp_events,
    })
}
