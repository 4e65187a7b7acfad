//! Entropic dual: exponentiated weights over the `(m + 1)`-simplex scaled by
//! `D`, where the extra coordinate is slack. `lambda[i] = D * p[i]`.

use super::{DualMinimizer, Hedge, PayoffRange, RateSchedule};
use crate::error::Result;
use crate::mixture::LagrangeVector;

#[derive(Debug, Clone)]
pub struct EntropicDual {
    inner: Hedge,
    radius: f64,
    num_resources: usize,
}

impl EntropicDual {
    /// `eta_t = sqrt(8 ln(m + 1) / t)` on payoffs rescaled from `[-D, D]`.
    pub fn new(num_resources: usize, radius: f64) -> Result<Self> {
        let range = PayoffRange::new(-radius, radius)?;
        let scale = (8.0 * ((num_resources + 1) as f64).ln()).sqrt();
        Ok(Self {
            inner: Hedge::new(num_resources + 1, range, RateSchedule::InvSqrt(scale)),
            radius,
            num_resources,
        })
    }
}

impl DualMinimizer for EntropicDual {
    fn select(&self) -> LagrangeVector {
        let mix = self.inner.mixture();
        let mut values: Vec<f64> = mix.probs()[..self.num_resources]
            .iter()
            .map(|p| p * self.radius)
            .collect();
        let norm: f64 = values.iter().sum();
        if norm > self.radius {
            values.iter_mut().for_each(|v| *v *= self.radius / norm);
        }
        LagrangeVector::new(values, self.radius).expect("scaled simplex lies in the ball")
    }

    fn receive(&mut self, gradient: &[f64]) {
        let mut payoffs: Vec<f64> = gradient.iter().map(|g| self.radius * g).collect();
        payoffs.push(0.0);
        self.inner.receive(&payoffs);
    }

    fn radius(&self) -> f64 {
        self.radius
    }

    fn clamp_events(&self) -> usize {
        self.inner.clamp_events()
    }

    fn describe(&self) -> String {
        format!("entropic eta_t={}", self.inner.eta().describe())
    }
}
