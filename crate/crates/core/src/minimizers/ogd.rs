//! Projected online gradient ascent over `{lambda >= 0 : ||lambda||_1 <= D}`.

use log::warn;

use super::{DualMinimizer, RateSchedule};
use crate::error::Result;
use crate::mixture::LagrangeVector;

#[derive(Debug, Clone, PartialEq)]
pub struct BallProjectionInput {
    pub point: Vec<f64>,
    pub radius: f64,
}

/// Euclidean projection onto the nonnegative part of the l1 ball of radius `D`.
///
/// Negative coordinates are clipped; if the clipped vector is outside the ball
/// it is projected onto the scaled simplex `{z >= 0, sum z = D}` by the
/// sort-and-threshold rule.
pub fn project_l1_ball(input: &BallProjectionInput) -> Vec<f64> {
    let radius = input.radius;
    let clipped: Vec<f64> = input.point.iter().map(|v| v.max(0.0)).collect();
    let sum: f64 = clipped.iter().sum();
    if sum <= radius {
        return clipped;
    }
    let mut sorted = clipped.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, v) in sorted.iter().enumerate() {
        cumsum += v;
        let candidate = (cumsum - radius) / (j + 1) as f64;
        if v - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    clipped.iter().map(|v| (v - theta).max(0.0)).collect()
}

/// `project(lambda + eta * gradient)` onto the ball of `lambda`'s radius.
pub fn ogd_dual_step(lambda: &LagrangeVector, gradient: &[f64], eta: f64) -> LagrangeVector {
    let point = lambda
        .values()
        .iter()
        .zip(gradient)
        .map(|(l, g)| l + eta * g)
        .collect();
    let radius = lambda.radius();
    let projected = project_l1_ball(&BallProjectionInput { point, radius });
    // The threshold rule can overshoot the radius by a few ulps.
    let norm: f64 = projected.iter().sum();
    let projected = if norm > radius {
        projected.iter().map(|v| v * radius / norm).collect()
    } else {
        projected
    };
    LagrangeVector::new(projected, radius).expect("projection lands in the ball")
}

/// Euclidean dual minimizer starting at the origin.
#[derive(Debug, Clone)]
pub struct OgdDual {
    lambda: LagrangeVector,
    eta: RateSchedule,
    /// Bound on the absolute value of a gradient coordinate.
    coord_bound: f64,
    round: usize,
    clamps: usize,
}

impl OgdDual {
    pub fn new(num_resources: usize, radius: f64, eta: RateSchedule) -> Result<Self> {
        Ok(Self {
            lambda: LagrangeVector::zeros(num_resources, radius)?,
            eta,
            coord_bound: 1.0,
            round: 1,
            clamps: 0,
        })
    }
}

impl DualMinimizer for OgdDual {
    fn select(&self) -> LagrangeVector {
        self.lambda.clone()
    }

    fn receive(&mut self, gradient: &[f64]) {
        let bound = self.coord_bound;
        let clipped: Vec<f64> = gradient
            .iter()
            .map(|&g| {
                if g.abs() > bound + 1e-12 {
                    self.clamps += 1;
                    warn!("dual gradient coordinate {g} clamped to [-{bound}, {bound}]");
                }
                g.clamp(-bound, bound)
            })
            .collect();
        self.lambda = ogd_dual_step(&self.lambda, &clipped, self.eta.at(self.round));
        self.round += 1;
    }

    fn radius(&self) -> f64 {
        self.lambda.radius()
    }

    fn clamp_events(&self) -> usize {
        self.clamps
    }

    fn describe(&self) -> String {
        format!("ogd eta_t={}", self.eta.describe())
    }
}
