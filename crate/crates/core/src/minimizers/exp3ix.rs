//! EXP3-IX: exponential weights on implicitly-explored loss estimates.
//!
//! Observed payoffs are rescaled to `[0, 1]` and turned into losses
//! `1 - rescaled`. The estimate for arm `k` after playing `a` is
//! `loss * 1[k = a] / (p_k + gamma)`.

use log::warn;

use super::{softmax, MinimizerConfig, PayoffRange, RateSchedule};
use crate::error::{Error, Result};
use crate::mixture::Mixture;

/// Implicit-exploration loss estimates for one round.
pub fn ix_loss_estimates(probs: &[f64], gamma: f64, played: usize, loss: f64) -> Result<Vec<f64>> {
    let denom = probs[played] + gamma;
    if !(denom > 0.0) {
        return Err(Error::ProbabilityUnderflow { arm: played });
    }
    let mut est = vec![0.0; probs.len()];
    est[played] = loss / denom;
    Ok(est)
}

#[derive(Debug, Clone)]
pub struct Exp3Ix {
    cum_loss: Vec<f64>,
    range: PayoffRange,
    eta: RateSchedule,
    gamma: RateSchedule,
    /// One-based index of the round whose mixture is currently offered.
    round: usize,
    clamps: usize,
}

impl Exp3Ix {
    pub fn new(num_arms: usize, range: PayoffRange, eta: RateSchedule, gamma: RateSchedule) -> Self {
        Self {
            cum_loss: vec![0.0; num_arms],
            range,
            eta,
            gamma,
            round: 1,
            clamps: 0,
        }
    }

    /// Anytime rates `eta_t = sqrt(2 ln K / (K t))`, `gamma_t = eta_t / 2`, or the
    /// horizon-tuned constants when `time_varying` is off.
    pub fn from_config(num_arms: usize, cfg: &MinimizerConfig) -> Result<Self> {
        cfg.validate()?;
        let k = num_arms as f64;
        let scale = (2.0 * k.ln() / k).sqrt();
        let (eta, default_gamma) = if cfg.time_varying {
            (RateSchedule::InvSqrt(scale), RateSchedule::InvSqrt(scale / 2.0))
        } else {
            let eta = scale / (cfg.horizon as f64).sqrt();
            (RateSchedule::Constant(eta), RateSchedule::Constant(eta / 2.0))
        };
        let gamma = cfg.gamma.map_or(default_gamma, RateSchedule::Constant);
        Ok(Self::new(num_arms, cfg.range, eta, gamma))
    }

    pub fn mixture(&self) -> Mixture {
        let eta = self.eta.at(self.round);
        let logits: Vec<f64> = self.cum_loss.iter().map(|l| -eta * l).collect();
        Mixture::new(softmax(&logits)).unwrap_or_else(|_| Mixture::uniform(self.cum_loss.len()))
    }

    /// Bandit feedback for the arm actually played; returns the next mixture.
    pub fn step(&mut self, played_arm: usize, observed_payoff: f64) -> Result<Mixture> {
        let (y, clamped) = self.range.rescale(observed_payoff);
        if clamped {
            self.clamps += 1;
            warn!(
                "exp3-ix payoff {observed_payoff} clamped to [{}, {}]",
                self.range.lo(),
                self.range.hi()
            );
        }
        let probs = self.mixture();
        let est = ix_loss_estimates(probs.probs(), self.gamma.at(self.round), played_arm, 1.0 - y)?;
        for (l, e) in self.cum_loss.iter_mut().zip(est) {
            *l += e;
        }
        self.round += 1;
        Ok(self.mixture())
    }

    pub fn eta(&self) -> RateSchedule {
        self.eta
    }

    pub fn gamma(&self) -> RateSchedule {
        self.gamma
    }

    pub fn clamp_events(&self) -> usize {
        self.clamps
    }
}
