//! Plan transformations applied before a run: the meta rescaling for tiny
//! `rho_min` and the void-skip alternative.

use crate::error::{Error, Result};
use crate::instance::{Instance, SpendingPlan};

#[derive(Debug, Clone, PartialEq)]
pub struct MetaTransform {
    /// `rho / T^{1/4}`.
    pub rho_hat: f64,
    /// Entries `B_t (1 - T^{-1/4})`.
    pub plan: SpendingPlan,
}

/// Capped Slater surrogate and shrunken plan used by the meta procedures. The
/// original budget still governs stopping.
pub fn meta_transform(inst: &Instance) -> Result<MetaTransform> {
    let rho = inst.rho();
    if !(rho > 0.0) {
        return Err(Error::InvalidParameters(format!(
            "meta rescaling needs rho > 0, got {rho}"
        )));
    }
    let q = (inst.horizon() as f64).powf(0.25);
    Ok(MetaTransform {
        rho_hat: rho / q,
        plan: inst.plan().scaled(1.0 - 1.0 / q)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoidSkip {
    /// `mask[t]` (zero-based) marks rounds forced to void.
    pub mask: Vec<bool>,
    /// The plan restricted to unmasked rounds. Its rows no longer sum to `B`,
    /// so it is not a validated instance.
    pub reduced_plan: Option<SpendingPlan>,
    /// Minimum entry over unmasked rounds.
    pub rho_min: f64,
}

impl VoidSkip {
    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }
}

/// Masks rounds where some plan entry is below `T^{-1/4} rho`, provided there
/// are at most `sqrt(T)` of them.
pub fn void_skip_preprocess(inst: &Instance) -> Result<VoidSkip> {
    let horizon = inst.horizon();
    let threshold = inst.rho() / (horizon as f64).powf(0.25);
    let plan = inst.plan();
    let mask: Vec<bool> = (0..horizon)
        .map(|t| plan.column(t).iter().any(|&b| b < threshold))
        .collect();
    let count = mask.iter().filter(|m| **m).count();
    let limit = (horizon as f64).sqrt().floor() as usize;
    if count > limit {
        return Err(Error::RefusePreprocess { count, limit });
    }
    let kept: Vec<Vec<f64>> = plan
        .rows()
        .iter()
        .map(|row| {
            row.iter()
                .zip(&mask)
                .filter(|(_, m)| !**m)
                .map(|(b, _)| *b)
                .collect()
        })
        .collect();
    let reduced_plan = if kept[0].is_empty() {
        None
    } else {
        Some(SpendingPlan::new(kept)?)
    };
    let rho_min = reduced_plan.as_ref().map_or(0.0, SpendingPlan::rho_min);
    Ok(VoidSkip {
        mask,
        reduced_plan,
        rho_min,
    })
}

/// What the learner sees internally: per-round targets in its feedback, the
/// dual radius, and rounds it must sit out.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerPlan {
    pub targets: SpendingPlan,
    pub radius: f64,
    pub mask: Vec<bool>,
    /// `rho_min` (or `rho_hat` under the meta procedure) behind the radius.
    pub rho_min_used: f64,
    pub meta_applied: bool,
}

impl LearnerPlan {
    /// Plain run: radius `1 / rho_min`.
    pub fn plain(inst: &Instance) -> Result<Self> {
        let rho_min = inst.rho_min();
        if !(rho_min > 0.0) {
            return Err(Error::ZeroRhoMin);
        }
        Ok(Self {
            targets: inst.plan().clone(),
            radius: 1.0 / rho_min,
            mask: vec![false; inst.horizon()],
            rho_min_used: rho_min,
            meta_applied: false,
        })
    }

    pub fn meta(inst: &Instance) -> Result<Self> {
        let MetaTransform { rho_hat, plan } = meta_transform(inst)?;
        Ok(Self {
            targets: plan,
            radius: 1.0 / rho_hat,
            mask: vec![false; inst.horizon()],
            rho_min_used: rho_hat,
            meta_applied: true,
        })
    }

    pub fn void_skip(inst: &Instance) -> Result<Self> {
        let skip = void_skip_preprocess(inst)?;
        if !(skip.rho_min > 0.0) {
            return Err(Error::ZeroRhoMin);
        }
        Ok(Self {
            targets: inst.plan().clone(),
            radius: 1.0 / skip.rho_min,
            mask: skip.mask,
            rho_min_used: skip.rho_min,
            meta_applied: false,
        })
    }

    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }
}
