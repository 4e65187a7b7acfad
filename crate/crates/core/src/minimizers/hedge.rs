//! Exponentiated weights over a finite set of arms with full feedback.

use log::warn;

use super::{softmax, MinimizerConfig, PayoffRange, RateSchedule};
use crate::error::Result;
use crate::mixture::Mixture;

/// Normalizes positive weights into a mixture without overflow or NaN.
pub fn hedge_select(weights: &[f64]) -> Mixture {
    let max = weights.iter().copied().fold(0.0, f64::max);
    let scaled: Vec<f64> = weights.iter().map(|w| w / max).collect();
    let sum: f64 = scaled.iter().sum();
    let probs: Vec<f64> = scaled.iter().map(|w| w / sum).collect();
    Mixture::new(probs).unwrap_or_else(|_| Mixture::uniform(weights.len()))
}

/// One multiplicative step `w'_k ∝ w_k exp(eta * rescaled payoff_k)`,
/// computed in log space. The result is scaled so its largest weight is one.
pub fn hedge_update(weights: &[f64], payoffs: &[f64], range: PayoffRange, eta: f64) -> Vec<f64> {
    let logits: Vec<f64> = weights
        .iter()
        .zip(payoffs)
        .map(|(w, p)| w.ln() + eta * range.rescale(*p).0)
        .collect();
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    logits.iter().map(|l| (l - max).exp()).collect()
}

/// Hedge keeping cumulative rescaled payoffs; the mixture at round `t` is
/// `softmax(eta_t * S_{t-1})`.
#[derive(Debug, Clone)]
pub struct Hedge {
    cumulative: Vec<f64>,
    range: PayoffRange,
    eta: RateSchedule,
    rounds: usize,
    clamps: usize,
}

impl Hedge {
    pub fn new(num_arms: usize, range: PayoffRange, eta: RateSchedule) -> Self {
        Self {
            cumulative: vec![0.0; num_arms],
            range,
            eta,
            rounds: 0,
            clamps: 0,
        }
    }

    /// `eta = sqrt(8 ln K / T)`, or `sqrt(8 ln K / t)` when time-varying.
    pub fn from_config(num_arms: usize, cfg: &MinimizerConfig) -> Result<Self> {
        cfg.validate()?;
        let c = (8.0 * (num_arms as f64).ln()).sqrt();
        let eta = if cfg.time_varying {
            RateSchedule::InvSqrt(c)
        } else {
            RateSchedule::Constant(c / (cfg.horizon as f64).sqrt())
        };
        Ok(Self::new(num_arms, cfg.range, eta))
    }

    pub fn mixture(&self) -> Mixture {
        let eta = self.eta.at(self.rounds + 1);
        let logits: Vec<f64> = self.cumulative.iter().map(|s| eta * s).collect();
        Mixture::new(softmax(&logits)).unwrap_or_else(|_| Mixture::uniform(self.cumulative.len()))
    }

    /// Full-information feedback: one payoff per arm, in the configured range.
    pub fn receive(&mut self, payoffs: &[f64]) {
        debug_assert_eq!(payoffs.len(), self.cumulative.len());
        for (s, &p) in self.cumulative.iter_mut().zip(payoffs) {
            let (y, clamped) = self.range.rescale(p);
            if clamped {
                self.clamps += 1;
                warn!("hedge payoff {p} clamped to [{}, {}]", self.range.lo(), self.range.hi());
            }
            *s += y;
        }
        self.rounds += 1;
    }

    pub fn range(&self) -> PayoffRange {
        self.range
    }

    pub fn eta(&self) -> RateSchedule {
        self.eta
    }

    pub fn clamp_events(&self) -> usize {
        self.clamps
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn select_normalizes() {
        let m = hedge_select(&[1.0, 1.0, 1.0]);
        for p in m.probs() {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
        let m = hedge_select(&[2.0, 1.0]);
        assert!((m.prob(0) - 2.0 / 3.0).abs() < 1e-15);
        let m = hedge_select(&[1e-300, 1.0]);
        assert!(m.prob(0) < 1e-299 && m.prob(0) >= 0.0);
        assert!((m.prob(1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn update_identity_and_doubling() {
        let w = hedge_update(&[1.0, 1.0], &[0.0, 0.0], PayoffRange::unit(), 0.7);
        assert_eq!(hedge_select(&w), Mixture::uniform(2));
        let w = hedge_update(&[1.0, 1.0], &[1.0, 0.0], PayoffRange::unit(), 2f64.ln());
        let m = hedge_select(&w);
        assert!((m.prob(0) - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.prob(1) - 1.0 / 3.0).abs() < 1e-12);
        let start = [0.2, 0.5, 0.3];
        let w = hedge_update(&start, &[0.4, 0.4, 0.4], PayoffRange::unit(), 1.3);
        let m = hedge_select(&w);
        for (a, b) in m.probs().iter().zip(start) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    /// Regret against the best fixed arm stays below `sqrt(T/2 ln K) + 1`.
    #[test]
    fn regret_bound_on_random_and_alternating_payoffs() {
        let horizon = 4000;
        for k in [2usize, 5] {
            let cfg = MinimizerConfig::new(PayoffRange::unit(), horizon);
            let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
            for pattern in 0..3 {
                let mut h = Hedge::from_config(k, &cfg).unwrap();
                let mut gained = 0.0;
                let mut totals = vec![0.0; k];
                for t in 0..horizon {
                    let payoffs: Vec<f64> = (0..k)
                        .map(|a| match pattern {
                            0 => rng.random::<f64>(),
                            1 => f64::from(u8::from((t / 50 + a) % 2 == 0)),
                            _ => {
                                if a == 0 {
                                    0.55
                                } else {
                                    rng.random::<f64>()
                                }
                            }
                        })
                        .collect();
                    gained += h.mixture().expectation(&payoffs);
                    for (s, p) in totals.iter_mut().zip(&payoffs) {
                        *s += p;
                    }
                    h.receive(&payoffs);
                }
                let best = totals.iter().copied().fold(f64::MIN, f64::max);
                let bound = (horizon as f64 / 2.0 * (k as f64).ln()).sqrt() + 1.0;
                assert!(best - gained <= bound, "k={k} pattern={pattern}");
            }
        }
    }

    proptest! {
        #[test]
        fn shift_invariance(
            payoffs in proptest::collection::vec(0.0f64..0.5, 2..6),
            shift in 0.0f64..0.5,
        ) {
            let range = PayoffRange::unit();
            let mut a = Hedge::new(payoffs.len(), range, RateSchedule::Constant(0.9));
            let mut b = a.clone();
            a.receive(&payoffs);
            let shifted: Vec<f64> = payoffs.iter().map(|p| p + shift).collect();
            b.receive(&shifted);
            for (x, y) in a.mixture().probs().iter().zip(b.mixture().probs()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
