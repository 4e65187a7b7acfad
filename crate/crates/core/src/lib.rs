//! Online learning with a per-round spending plan: regret minimizers, dual and
//! primal-dual learners, LP baselines and synthetic environments.

pub mod algorithms;
pub mod budget;
pub mod environments;
pub mod error;
pub mod instance;
pub mod lp;
pub mod minimizers;
pub mod mixture;
pub mod oracles;
pub mod trace;

pub use error::{Error, Result};
pub use instance::{validate_instance, Instance, InstanceParams, SpendingPlan};
pub use mixture::{LagrangeVector, Mixture};
pub use trace::{RoundOutcome, RunTrace};
