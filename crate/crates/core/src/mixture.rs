//! Primal and dual decisions: probability vectors over arms and Lagrange
//! multipliers in the truncated l1 ball.

use rand::Rng;

use crate::error::{Error, Result};

const MIXTURE_SUM_TOL: f64 = 1e-12;
const BALL_TOL: f64 = 1e-9;

/// Probability vector over the `K` arms.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    probs: Vec<f64>,
}

impl Mixture {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidMixture("empty probability vector".into()));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidMixture(format!("entry {p} is not a probability")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > MIXTURE_SUM_TOL * probs.len().max(1) as f64 {
            return Err(Error::InvalidMixture(format!("entries sum to {sum}")));
        }
        Ok(Self { probs })
    }

    /// Normalizes nonnegative weights into a mixture.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum.is_finite() && sum > 0.0) {
            return Err(Error::InvalidMixture(format!("weights sum to {sum}")));
        }
        Self::new(weights.iter().map(|w| w / sum).collect())
    }

    pub fn point_mass(num_arms: usize, arm: usize) -> Self {
        let mut probs = vec![0.0; num_arms];
        probs[arm] = 1.0;
        Self { probs }
    }

    pub fn uniform(num_arms: usize) -> Self {
        Self {
            probs: vec![1.0 / num_arms as f64; num_arms],
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, arm: usize) -> f64 {
        self.probs[arm]
    }

    pub fn num_arms(&self) -> usize {
        self.probs.len()
    }

    /// `E_{x ~ xi}[values[x]]`.
    pub fn expectation(&self, values: &[f64]) -> f64 {
        self.probs.iter().zip(values).map(|(p, v)| p * v).sum()
    }

    /// Inverse-CDF sampling from a single uniform draw in `[0, 1)`.
    pub fn sample_with(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (k, p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return k;
            }
        }
        // Rounding left `acc` slightly below one: take the last arm with mass.
        self.probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.sample_with(rng.random::<f64>())
    }
}

/// Nonnegative multiplier vector with `||lambda||_1 <= radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangeVector {
    values: Vec<f64>,
    radius: f64,
}

impl LagrangeVector {
    pub fn new(values: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidLagrangeVector(format!(
                "radius {radius} must be positive"
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidLagrangeVector(format!("negative entry {v}")));
        }
        let norm: f64 = values.iter().sum();
        if norm > radius + BALL_TOL {
            return Err(Error::InvalidLagrangeVector(format!(
                "l1 norm {norm} exceeds radius {radius}"
            )));
        }
        Ok(Self { values, radius })
    }

    pub fn zeros(num_resources: usize, radius: f64) -> Result<Self> {
        Self::new(vec![0.0; num_resources], radius)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `sum_i lambda[i] * v[i]`.
    pub fn dot(&self, v: &[f64]) -> f64 {
        self.values.iter().zip(v).map(|(l, x)| l * x).sum()
    }
}
