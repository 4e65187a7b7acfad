//! Closed-form high-probability regret bounds and the regret terms of the
//! shipped minimizers, all in unit-payoff-range units.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Setting {
    /// Functions observed before acting; dynamic-regret benchmark.
    Ora,
    OlrcFull,
    OlrcBandit,
}

impl Setting {
    pub fn name(self) -> &'static str {
        match self {
            Setting::Ora => "ORA",
            Setting::OlrcFull => "OLRC_full",
            Setting::OlrcBandit => "OLRC_bandit",
        }
    }
}

impl std::fmt::Display for Setting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Setting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ora" => Ok(Setting::Ora),
            "olrc_full" | "full" => Ok(Setting::OlrcFull),
            "olrc_bandit" | "bandit" => Ok(Setting::OlrcBandit),
            other => Err(Error::InvalidAlgorithmSpec(format!("unknown setting {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub horizon: usize,
    /// `B / T`.
    pub rho: f64,
    pub rho_min: f64,
    pub r_dual: f64,
    /// Ignored for ORA.
    pub r_primal: f64,
    pub delta: f64,
    /// Bandit primal confidence; only enters through `r_primal`.
    pub delta_p: f64,
}

fn check(setting: Setting, meta: bool, p: &BoundParams) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidParameters(msg));
    if p.horizon == 0 {
        return bad("horizon must be positive".into());
    }
    if !(p.delta > 0.0 && p.delta < 1.0) {
        return bad(format!("delta {} outside (0, 1)", p.delta));
    }
    if setting == Setting::OlrcBandit && !(p.delta_p > 0.0 && p.delta_p < 1.0) {
        return bad(format!("delta_p {} outside (0, 1)", p.delta_p));
    }
    if meta {
        if !(p.rho > 0.0 && p.rho.is_finite()) {
            return bad(format!("rho {} must be positive", p.rho));
        }
    } else if !(p.rho_min > 0.0 && p.rho_min.is_finite()) {
        return bad(format!("rho_min {} must be positive", p.rho_min));
    }
    if !(p.r_dual >= 0.0 && p.r_dual.is_finite()) || !(p.r_primal >= 0.0 && p.r_primal.is_finite()) {
        return bad("regret terms must be finite and nonnegative".into());
    }
    Ok(())
}

/// Upper bound on dynamic regret (ORA) or static regret (OLRC) holding with
/// high probability.
pub fn regret_bound(setting: Setting, meta: bool, p: &BoundParams) -> Result<f64> {
    check(setting, meta, p)?;
    let t = p.horizon as f64;
    let conc = (2.0 * t * (t / p.delta).ln()).sqrt();
    let rd = p.r_dual;
    let rp = p.r_primal;
    if !meta {
        let inv = 1.0 / p.rho_min;
        let base = 1.0 + inv + 2.0 * inv * rd;
        return Ok(match setting {
            Setting::Ora => base + (8.0 + 8.0 * inv) * conc,
            Setting::OlrcFull => base + (1.0 + 2.0 * inv) * rp + (8.0 + 8.0 * inv) * conc,
            Setting::OlrcBandit => base + (1.0 + 2.0 * inv) * rp + (4.0 + 4.0 * inv) * conc,
        });
    }
    let q = t.powf(0.25);
    let t34 = t.powf(0.75);
    let rho = p.rho;
    let log_term = (t / p.delta).ln().sqrt();
    let sqrt_t = t.sqrt();
    Ok(match setting {
        Setting::Ora => {
            14.0 / rho * (log_term + rd / sqrt_t) * t34
                + t34
                + (8.0 + 4.0 * q / rho) * conc
                + 2.0 * q / rho * rd
        }
        Setting::OlrcFull => {
            14.0 / rho * (log_term + (rp + rd) / sqrt_t) * t34
                + t34
                + (8.0 + 4.0 * q / rho) * conc
                + 2.0 * q / rho * rd
                + (1.0 + 2.0 * q / rho) * rp
        }
        Setting::OlrcBandit => {
            14.0 / rho * ((rp + rd) / sqrt_t) * t34
                + t34
                + (4.0 + 4.0 * q / rho) * conc
                + 2.0 * q / rho * rd
                + (1.0 + 2.0 * q / rho) * rp
        }
    })
}

/// Extra regret allowed against the relaxed baselines: `(1/rho_min) * sum eps`,
/// or `(T^{1/4}/rho) * sum eps` for the meta procedures.
pub fn error_penalty(meta: bool, p: &BoundParams, eps_total: f64) -> Result<f64> {
    check(Setting::Ora, meta, p)?;
    if !(eps_total >= 0.0) {
        return Err(Error::InvalidParameters(format!("error total {eps_total} is negative")));
    }
    let factor = if meta {
        (p.horizon as f64).powf(0.25) / p.rho
    } else {
        1.0 / p.rho_min
    };
    Ok(factor * eps_total)
}

/// Projected gradient ascent over the ball with `eta_t = D / (sqrt(m) sqrt t)`:
/// raw regret at most `2 D sqrt(m T)`, i.e. `sqrt(m T)` per unit payoff width.
pub fn ogd_dual_regret(num_resources: usize, horizon: usize) -> f64 {
    ((num_resources * horizon) as f64).sqrt()
}

/// Anytime exponential weights over `m + 1` vertices.
pub fn entropic_dual_regret(num_resources: usize, horizon: usize) -> f64 {
    let n = (num_resources + 1) as f64;
    (2.0 * horizon as f64 * n.ln()).sqrt() + (n.ln() / 8.0).sqrt()
}

/// Hedge: `sqrt(T ln K / 2)` with the horizon-tuned rate, and
/// `sqrt(2 T ln K) + sqrt(ln K / 8)` with `eta_t = sqrt(8 ln K / t)`.
pub fn hedge_primal_regret(num_arms: usize, horizon: usize, time_varying: bool) -> f64 {
    let lnk = (num_arms as f64).ln();
    let t = horizon as f64;
    if time_varying {
        (2.0 * t * lnk).sqrt() + (lnk / 8.0).sqrt()
    } else {
        (t * lnk / 2.0).sqrt()
    }
}

/// EXP3-IX with `gamma = eta / 2`, holding with probability `1 - delta_p`.
pub fn exp3ix_primal_regret(num_arms: usize, horizon: usize, delta_p: f64, time_varying: bool) -> f64 {
    let k = num_arms as f64;
    let t = horizon as f64;
    let lnk = k.ln();
    let log_term = (2.0 / delta_p).ln();
    if time_varying {
        4.0 * (k * t * lnk).sqrt() + (2.0 * (k * t / lnk).sqrt() + 1.0) * log_term
    } else {
        2.0 * (2.0 * k * t * lnk).sqrt() + ((2.0 * k * t / lnk).sqrt() + 1.0) * log_term
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(horizon: usize, rho_min: f64, r_dual: f64) -> BoundParams {
        BoundParams {
            horizon,
            rho: 0.5,
            rho_min,
            r_dual,
            r_primal: 0.0,
            delta: 0.05,
            delta_p: 0.05,
        }
    }

    #[test]
    fn ora_formula() {
        let b = regret_bound(Setting::Ora, false, &params(10_000, 0.5, 100.0)).unwrap();
        let expected = 1.0 + 2.0 + 4.0 * 100.0 + 24.0 * (2.0 * 1e4 * (2e5f64).ln()).sqrt();
        assert!((b - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn olrc_full_degenerate_horizon() {
        let b = regret_bound(Setting::OlrcFull, false, &params(1, 0.5, 0.0)).unwrap();
        let expected = 1.0 + 2.0 + 24.0 * (2.0 * (1.0f64 / 0.05).ln()).sqrt();
        assert!((b - expected).abs() < 1e-12);
    }

    #[test]
    fn meta_bound_ignores_rho_min() {
        let mut p = params(4096, 0.0, 64.0);
        let a = regret_bound(Setting::Ora, true, &p).unwrap();
        p.rho_min = 1e-300;
        let b = regret_bound(Setting::Ora, true, &p).unwrap();
        assert!(a.is_finite());
        assert_eq!(a, b);
        assert!(regret_bound(Setting::Ora, false, &params(10, 0.0, 1.0)).is_err());
    }

    #[test]
    fn bandit_uses_smaller_concentration_constant() {
        let mut p = params(5000, 0.25, 10.0);
        p.r_primal = 20.0;
        let full = regret_bound(Setting::OlrcFull, false, &p).unwrap();
        let bandit = regret_bound(Setting::OlrcBandit, false, &p).unwrap();
        let conc = (2.0 * 5000.0 * (5000.0f64 / 0.05).ln()).sqrt();
        assert!((full - bandit - (4.0 + 16.0) * conc).abs() < 1e-9 * full);
    }

    #[test]
    fn penalty_scales() {
        let p = params(16, 0.25, 1.0);
        assert!((error_penalty(false, &p, 2.0).unwrap() - 8.0).abs() < 1e-12);
        assert!((error_penalty(true, &p, 2.0).unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_delta() {
        let mut p = params(10, 0.5, 1.0);
        p.delta = 1.0;
        assert!(regret_bound(Setting::Ora, false, &p).is_err());
    }
}
