use thiserror::Error;

use crate::lp::LpError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("plan row for resource {resource} sums to {sum}, expected budget {budget}")]
    PlanRowSumMismatch { resource: usize, sum: f64, budget: f64 },

    #[error("plan entry (resource {resource}, round {round}) = {value} is outside [0, 1]")]
    EntryOutOfRange { resource: usize, round: usize, value: f64 },

    #[error("degenerate dimension {name} = {value}")]
    DegenerateDimensions { name: &'static str, value: f64 },

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("budget for resource {resource} must be positive, got {value}")]
    NonPositiveBudget { resource: usize, value: f64 },

    #[error("scaled cost {value} for resource {resource} exceeds the unit range")]
    ScaledCostOutOfRange { resource: usize, value: f64 },

    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    #[error("invalid Lagrange vector: {0}")]
    InvalidLagrangeVector(String),

    #[error("probability plus exploration is non-positive for arm {arm}")]
    ProbabilityUnderflow { arm: usize },

    #[error("minimum per-round budget is zero; enable the meta procedure or void-skip preprocessing")]
    ZeroRhoMin,

    #[error("{count} rounds fall below the void-skip threshold, more than the allowed {limit}")]
    RefusePreprocess { count: usize, limit: usize },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("bandit feedback forbids {0}")]
    BanditHygieneViolation(&'static str),

    #[error("infeasible plan spec: {0}")]
    InfeasiblePlanSpec(String),

    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),

    #[error("invalid algorithm spec: {0}")]
    InvalidAlgorithmSpec(String),

    #[error("{count} out-of-range payoffs were clamped in strict mode")]
    ClampedPayoffs { count: usize },

    #[error(transparent)]
    Lp(#[from] LpError),
}
