//! Black-box regret minimizers used as primal and dual subroutines.
//!
//! Every minimizer is built from a payoff range `[a, b]` and internally maps
//! payoffs affinely to `[0, 1]`. Payoffs outside the range are clamped and
//! counted; strict runs fail when any clamp happened.

mod entropic;
mod exp3ix;
mod hedge;
mod ogd;

pub use entropic::EntropicDual;
pub use exp3ix::{ix_loss_estimates, Exp3Ix};
pub use hedge::{hedge_select, hedge_update, Hedge};
pub use ogd::{ogd_dual_step, project_l1_ball, BallProjectionInput, OgdDual};

use crate::error::{Error, Result};
use crate::mixture::LagrangeVector;

/// Closed payoff interval `[lo, hi]` announced to a minimizer at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffRange {
    lo: f64,
    hi: f64,
}

impl PayoffRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::InvalidParameters(format!(
                "payoff range [{lo}, {hi}] is empty"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn unit() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Maps `x` to `[0, 1]`; the flag reports whether clamping was needed.
    pub fn rescale(&self, x: f64) -> (f64, bool) {
        // Tiny overshoot from floating-point round-off is not a clamp event.
        let slack = 1e-9 * self.width().max(1.0);
        let clamped = x < self.lo - slack || x > self.hi + slack;
        let y = ((x - self.lo) / self.width()).clamp(0.0, 1.0);
        (y, clamped)
    }
}

/// Learning-rate schedule `eta_t` for one-based rounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateSchedule {
    Constant(f64),
    /// `eta_t = scale / sqrt(t)`.
    InvSqrt(f64),
}

impl RateSchedule {
    pub fn at(&self, t: usize) -> f64 {
        match *self {
            RateSchedule::Constant(eta) => eta,
            RateSchedule::InvSqrt(scale) => scale / (t.max(1) as f64).sqrt(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            RateSchedule::Constant(eta) => format!("constant({eta})"),
            RateSchedule::InvSqrt(scale) => format!("{scale}/sqrt(t)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinimizerKind {
    Hedge,
    Ogd,
    Exp3Ix,
}

/// A learning-rate schedule plus, for EXP3-IX, the implicit-exploration schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearningRate {
    pub eta: RateSchedule,
    pub gamma: Option<RateSchedule>,
}

/// Default schedules.
///
/// * `Hedge`: `eta = sqrt(8 ln K / T)` on rescaled payoffs.
/// * `Ogd`: `eta_t = D / (G sqrt t)` with `G = sqrt(m) * max(1, W)`, where `W`
///   bounds the absolute value of a gradient coordinate.
/// * `Exp3Ix`: `eta_t = sqrt(2 ln K / (K t))`, `gamma_t = eta_t / 2`.
///
/// `dim` is `K` for Hedge and EXP3-IX and `m` for OGD.
pub fn default_learning_rate(
    kind: MinimizerKind,
    dim: usize,
    radius: f64,
    width: f64,
    horizon: usize,
) -> Result<LearningRate> {
    if dim == 0 || horizon == 0 || !(radius > 0.0) || !(width > 0.0) {
        return Err(Error::InvalidParameters(
            "learning-rate arguments must be positive".into(),
        ));
    }
    let k = dim as f64;
    Ok(match kind {
        MinimizerKind::Hedge => LearningRate {
            eta: RateSchedule::Constant((8.0 * k.ln() / horizon as f64).sqrt()),
            gamma: None,
        },
        MinimizerKind::Ogd => {
            let g = k.sqrt() * width.max(1.0);
            LearningRate {
                eta: RateSchedule::InvSqrt(radius / g),
                gamma: None,
            }
        }
        MinimizerKind::Exp3Ix => {
            let scale = (2.0 * k.ln() / k).sqrt();
            LearningRate {
                eta: RateSchedule::InvSqrt(scale),
                gamma: Some(RateSchedule::InvSqrt(scale / 2.0)),
            }
        }
    })
}

/// Construction parameters shared by the arm-level minimizers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizerConfig {
    pub range: PayoffRange,
    pub horizon: usize,
    /// Use `eta_t` shrinking with `t` instead of a horizon-tuned constant.
    pub time_varying: bool,
    /// Fixed implicit-exploration parameter for EXP3-IX; `None` uses `eta_t / 2`.
    pub gamma: Option<f64>,
}

impl MinimizerConfig {
    pub fn new(range: PayoffRange, horizon: usize) -> Self {
        Self {
            range,
            horizon,
            time_varying: false,
            gamma: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidParameters("horizon hint must be positive".into()));
        }
        if let Some(g) = self.gamma {
            if !(0.0..1.0).contains(&g) {
                return Err(Error::InvalidParameters(format!("gamma {g} outside [0, 1)")));
            }
        }
        Ok(())
    }
}

/// Full-feedback minimizer over the truncated l1 ball of Lagrange multipliers.
///
/// Feedback is the linear payoff `r(lambda) = sum_i lambda[i] * g[i]` with
/// `g = spend - B_t`, passed as the coefficient vector `g`.
pub trait DualMinimizer: Send {
    fn select(&self) -> LagrangeVector;
    fn receive(&mut self, gradient: &[f64]);
    fn radius(&self) -> f64;
    fn clamp_events(&self) -> usize;
    fn describe(&self) -> String;
}

/// Softmax of log-weights, stable against overflow and underflow.
pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_rates_match_formulas() {
        let h = default_learning_rate(MinimizerKind::Hedge, 2, 1.0, 1.0, 100).unwrap();
        assert!((h.eta.at(1) - 0.235_48).abs() < 1e-5);
        let o = default_learning_rate(MinimizerKind::Ogd, 1, 1.0, 1.0, 100).unwrap();
        assert_eq!(o.eta.at(4), 0.5);
        let e = default_learning_rate(MinimizerKind::Exp3Ix, 4, 1.0, 1.0, 100).unwrap();
        assert!((e.eta.at(1) - 0.832_6).abs() < 1e-4);
        assert!((e.gamma.unwrap().at(1) - 0.416_3).abs() < 1e-4);
    }

    #[test]
    fn rescale_flags_out_of_range() {
        let r = PayoffRange::new(-2.0, 2.0).unwrap();
        assert_eq!(r.rescale(0.0), (0.5, false));
        assert_eq!(r.rescale(3.0), (1.0, true));
        assert!(PayoffRange::new(1.0, 1.0).is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = MinimizerConfig::new(PayoffRange::unit(), 10);
        assert!(cfg.validate().is_ok());
        cfg.gamma = Some(1.0);
        assert!(cfg.validate().is_err());
    }
}
