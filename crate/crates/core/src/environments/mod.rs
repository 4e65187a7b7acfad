//! Seeded reward/cost sequences with sample access for learners and mean access
//! for the baselines.
//!
//! Randomness is counter-based: every `(seed, t, arm)` triple owns a
//! substream, so draws do not depend on query order and every setting sees the
//! same sample path.

mod plans;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::oracles::MeanProfile;

pub use plans::{generate_plan, PlanKind, PlanSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvKind {
    Stationary,
    /// Means jump at each phase start.
    Piecewise,
    /// Means move linearly from one phase start to the next.
    Drifting,
    /// Point masses, piecewise in time; the noise model is ignored.
    DeterministicAdversarial,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    Bernoulli,
    /// Uniform on `[mu - w, mu + w]`, with `w` shrunk near the ends of `[0, 1]`
    /// so the mean stays `mu`.
    UniformInterval { half_width: f64 },
    /// Every value in round `t` is `mu * s_t` with `s_t ~ U[1 - w, 1 + w]`
    /// shared by all arms and resources. Needs `mu (1 + w) <= 1`.
    CommonScale { spread: f64 },
}

/// Per-arm means for one phase: `rewards[k]`, `costs[k][i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmMeans {
    pub rewards: Vec<f64>,
    pub costs: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phase {
    /// One-based first round of the phase.
    pub start: usize,
    pub means: ArmMeans,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentSpec {
    pub kind: EnvKind,
    pub num_arms: usize,
    pub num_resources: usize,
    pub phases: Vec<Phase>,
    pub noise: NoiseModel,
    /// One uniform per round drives every arm and component (comonotone draws).
    pub shared_noise: bool,
    pub seed: u64,
}

impl EnvironmentSpec {
    /// Single-phase environment.
    pub fn stationary(means: ArmMeans, noise: NoiseModel, seed: u64) -> Self {
        let num_arms = means.rewards.len();
        let num_resources = means.costs.first().map_or(0, Vec::len);
        Self {
            kind: EnvKind::Stationary,
            num_arms,
            num_resources,
            phases: vec![Phase { start: 1, means }],
            noise,
            shared_noise: false,
            seed,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn substream(seed: u64, t: usize, lane: u64) -> ChaCha8Rng {
    let h = splitmix64(splitmix64(splitmix64(seed) ^ t as u64) ^ lane);
    ChaCha8Rng::seed_from_u64(h)
}

/// Lane reserved for per-round shared draws.
const SHARED_LANE: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    spec: EnvironmentSpec,
    horizon: usize,
}

impl Environment {
    pub fn new(spec: EnvironmentSpec, horizon: usize) -> Result<Self> {
        validate_spec(&spec, horizon)?;
        Ok(Self { spec, horizon })
    }

    pub fn spec(&self) -> &EnvironmentSpec {
        &self.spec
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn num_arms(&self) -> usize {
        self.spec.num_arms
    }

    pub fn num_resources(&self) -> usize {
        self.spec.num_resources
    }

    fn check_round(&self, t: usize) {
        assert!(
            (1..=self.horizon).contains(&t),
            "round {t} outside 1..={}",
            self.horizon
        );
    }

    /// Means at one-based round `t` for one arm.
    fn arm_mean(&self, t: usize, arm: usize) -> (f64, Vec<f64>) {
        let phases = &self.spec.phases;
        let idx = phases.partition_point(|p| p.start <= t) - 1;
        let cur = &phases[idx].means;
        let here = (cur.rewards[arm], cur.costs[arm].clone());
        match self.spec.kind {
            EnvKind::Drifting if idx + 1 < phases.len() => {
                let next = &phases[idx + 1];
                let span = (next.start - phases[idx].start) as f64;
                let w = (t - phases[idx].start) as f64 / span;
                let mix = |a: f64, b: f64| (1.0 - w) * a + w * b;
                let f = mix(here.0, next.means.rewards[arm]);
                let c = here
                    .1
                    .iter()
                    .zip(&next.means.costs[arm])
                    .map(|(a, b)| mix(*a, *b))
                    .collect();
                (f, c)
            }
            _ => here,
        }
    }

    /// Exact expected reward vector and `K x m` cost matrix at round `t`.
    pub fn mean_round(&self, t: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        self.check_round(t);
        (0..self.num_arms()).map(|k| self.arm_mean(t, k)).unzip()
    }

    fn draw(&self, mu: f64, u: f64, scale: f64) -> f64 {
        if self.spec.kind == EnvKind::DeterministicAdversarial {
            return mu;
        }
        let v = match self.spec.noise {
            NoiseModel::Bernoulli => f64::from(u8::from(u < mu)),
            NoiseModel::UniformInterval { half_width } => {
                let w = half_width.min(mu).min(1.0 - mu);
                mu + w * (2.0 * u - 1.0)
            }
            NoiseModel::CommonScale { .. } => mu * scale,
        };
        v.clamp(0.0, 1.0)
    }

    fn round_scale(&self, t: usize) -> f64 {
        match self.spec.noise {
            NoiseModel::CommonScale { spread } => {
                let u: f64 = substream(self.spec.seed, t, SHARED_LANE).random();
                1.0 + spread * (2.0 * u - 1.0)
            }
            _ => 1.0,
        }
    }

    /// Realized reward and costs of one arm at round `t`.
    pub fn sample_arm(&self, t: usize, arm: usize) -> (f64, Vec<f64>) {
        self.check_round(t);
        if arm == 0 {
            return (0.0, vec![0.0; self.num_resources()]);
        }
        let (f, c) = self.arm_mean(t, arm);
        let scale = self.round_scale(t);
        let mut rng = if self.spec.shared_noise {
            substream(self.spec.seed, t, SHARED_LANE - 1)
        } else {
            substream(self.spec.seed, t, arm as u64)
        };
        if self.spec.shared_noise {
            let u: f64 = rng.random();
            let reward = self.draw(f, u, scale);
            let costs = c.iter().map(|&mu| self.draw(mu, u, scale)).collect();
            (reward, costs)
        } else {
            let reward = self.draw(f, rng.random(), scale);
            let costs = c.iter().map(|&mu| self.draw(mu, rng.random(), scale)).collect();
            (reward, costs)
        }
    }

    /// Full realized functions at round `t`: rewards per arm and a `K x m` cost
    /// matrix. Deterministic in `(seed, t)`.
    pub fn sample_round(&self, t: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        (0..self.num_arms()).map(|k| self.sample_arm(t, k)).unzip()
    }

    pub fn mean_profile(&self) -> Result<MeanProfile> {
        let (f, c) = (1..=self.horizon).map(|t| self.mean_round(t)).unzip();
        MeanProfile::new(f, c)
    }

    /// Read-only view that reveals the played arm only.
    pub fn bandit(&self) -> BanditFacade<'_> {
        BanditFacade { env: self }
    }
}

/// Environment access under bandit feedback.
#[derive(Debug, Clone, Copy)]
pub struct BanditFacade<'a> {
    env: &'a Environment,
}

impl BanditFacade<'_> {
    pub fn play(&self, t: usize, arm: usize) -> (f64, Vec<f64>) {
        self.env.sample_arm(t, arm)
    }

    pub fn mean_round(&self, _t: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        Err(Error::BanditHygieneViolation("mean access"))
    }

    pub fn sample_round(&self, _t: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        Err(Error::BanditHygieneViolation("full-function access"))
    }

    pub fn num_arms(&self) -> usize {
        self.env.num_arms()
    }

    pub fn num_resources(&self) -> usize {
        self.env.num_resources()
    }
}

fn validate_spec(spec: &EnvironmentSpec, horizon: usize) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidEnvironment(msg));
    let (k, m) = (spec.num_arms, spec.num_resources);
    if horizon == 0 || k < 2 || m < 1 {
        return bad(format!("need T >= 1, K >= 2, m >= 1; got {horizon}, {k}, {m}"));
    }
    if spec.phases.is_empty() {
        return bad("no phases".into());
    }
    if spec.kind == EnvKind::Stationary && spec.phases.len() != 1 {
        return bad("a stationary environment has exactly one phase".into());
    }
    if spec.phases[0].start != 1 {
        return bad("the first phase must start at round 1".into());
    }
    for w in spec.phases.windows(2) {
        if w[1].start <= w[0].start {
            return bad("phase starts must be strictly increasing".into());
        }
    }
    if let Some(p) = spec.phases.iter().find(|p| p.start > horizon) {
        return bad(format!("phase start {} exceeds horizon {horizon}", p.start));
    }
    let scale_cap = match spec.noise {
        NoiseModel::Bernoulli => 1.0,
        NoiseModel::UniformInterval { half_width } => {
            if !(0.0..=0.5).contains(&half_width) {
                return bad(format!("half width {half_width} outside [0, 0.5]"));
            }
            1.0
        }
        NoiseModel::CommonScale { spread } => {
            if !(0.0..=1.0).contains(&spread) {
                return bad(format!("spread {spread} outside [0, 1]"));
            }
            1.0 + spread
        }
    };
    for (j, phase) in spec.phases.iter().enumerate() {
        let ArmMeans { rewards, costs } = &phase.means;
        if rewards.len() != k || costs.len() != k || costs.iter().any(|c| c.len() != m) {
            return bad(format!("phase {j} means do not match K = {k}, m = {m}"));
        }
        if rewards[0] != 0.0 || costs[0].iter().any(|&c| c != 0.0) {
            return bad(format!("phase {j}: the void arm must have zero means"));
        }
        for v in rewards.iter().chain(costs.iter().flatten()) {
            if !(0.0..=1.0).contains(v) {
                return bad(format!("phase {j}: mean {v} outside [0, 1]"));
            }
            if spec.kind != EnvKind::DeterministicAdversarial && v * scale_cap > 1.0 + 1e-12 {
                return bad(format!("phase {j}: mean {v} times the largest scale exceeds 1"));
            }
        }
    }
    Ok(())
}

/// Two deterministic environments that agree for the first half of the horizon
/// and differ afterwards. Arm 1 pays 1/2 in the first half in both; in the
/// second half it pays nothing in the first environment and 1 in the second.
/// Every play of arm 1 costs 1. Without knowing which world it is in, a learner
/// with budget `rho T` cannot do well in both.
pub fn hard_pair(horizon: usize, seed: u64) -> Result<(Environment, Environment)> {
    if horizon < 2 {
        return Err(Error::InvalidEnvironment("hard pair needs T >= 2".into()));
    }
    let means = |r: f64| ArmMeans {
        rewards: vec![0.0, r],
        costs: vec![vec![0.0], vec![1.0]],
    };
    let build = |late: f64| {
        Environment::new(
            EnvironmentSpec {
                kind: EnvKind::DeterministicAdversarial,
                num_arms: 2,
                num_resources: 1,
                phases: vec![
                    Phase { start: 1, means: means(0.5) },
                    Phase {
                        start: horizon / 2 + 1,
                        means: means(late),
                    },
                ],
                noise: NoiseModel::Bernoulli,
                shared_noise: false,
                seed,
            },
            horizon,
        )
    };
    Ok((build(0.0)?, build(1.0)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn means(r: f64, c: f64) -> ArmMeans {
        ArmMeans {
            rewards: vec![0.0, r],
            costs: vec![vec![0.0], vec![c]],
        }
    }

    fn env(noise: NoiseModel, r: f64, c: f64, horizon: usize) -> Environment {
        Environment::new(EnvironmentSpec::stationary(means(r, c), noise, 5), horizon).unwrap()
    }

    #[test]
    fn deterministic_samples_equal_means() {
        let mut spec = EnvironmentSpec::stationary(means(0.37, 0.61), NoiseModel::Bernoulli, 1);
        spec.kind = EnvKind::DeterministicAdversarial;
        let e = Environment::new(spec, 10).unwrap();
        for t in 1..=10 {
            assert_eq!(e.sample_round(t), e.mean_round(t));
        }
    }

    #[test]
    fn bernoulli_zero_mean_is_zero() {
        let e = env(NoiseModel::Bernoulli, 0.0, 0.0, 1000);
        assert!((1..=1000).all(|t| e.sample_arm(t, 1) == (0.0, vec![0.0])));
    }

    #[test]
    fn means_of_noise_models() {
        assert_eq!(env(NoiseModel::Bernoulli, 0.3, 0.2, 5).mean_round(2).0[1], 0.3);
        let e = env(NoiseModel::UniformInterval { half_width: 0.2 }, 0.5, 0.4, 5);
        // the interval [0.3, 0.7] has midpoint 0.5
        assert_eq!(e.mean_round(3).0[1], 0.5);
        assert_eq!(e.mean_round(3).1[1][0], 0.4);
    }

    /// Monte Carlo: sample means within three standard deviations of the means.
    #[test]
    fn empirical_means_converge() {
        let n = 100_000;
        for noise in [
            NoiseModel::Bernoulli,
            NoiseModel::UniformInterval { half_width: 0.3 },
            NoiseModel::CommonScale { spread: 0.5 },
        ] {
            let e = env(noise, 0.35, 0.6, n);
            let (mut sf, mut sf2, mut sc, mut sc2) = (0.0, 0.0, 0.0, 0.0);
            for t in 1..=n {
                let (f, c) = e.sample_arm(t, 1);
                sf += f;
                sf2 += f * f;
                sc += c[0];
                sc2 += c[0] * c[0];
            }
            let nn = n as f64;
            for (s, s2, mu) in [(sf, sf2, 0.35), (sc, sc2, 0.6)] {
                let mean = s / nn;
                let sd = ((s2 / nn - mean * mean) / nn).sqrt();
                assert!((mean - mu).abs() <= 3.0 * sd, "{noise:?}: {mean} vs {mu}");
            }
        }
    }

    #[test]
    fn samples_stay_in_unit_range_and_void_is_zero() {
        let e = env(NoiseModel::UniformInterval { half_width: 0.5 }, 0.9, 0.05, 2000);
        for t in 1..=2000 {
            let (f, c) = e.sample_round(t);
            assert_eq!(f[0], 0.0);
            assert_eq!(c[0], vec![0.0]);
            assert!(f.iter().chain(c.iter().flatten()).all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn order_independent_reproducibility() {
        let e = env(NoiseModel::Bernoulli, 0.5, 0.5, 100);
        let forward: Vec<_> = (1..=100).map(|t| e.sample_round(t)).collect();
        let backward: Vec<_> = (1..=100).rev().map(|t| e.sample_round(t)).collect();
        let mut backward = backward;
        backward.reverse();
        assert_eq!(forward, backward);
        let e2 = env(NoiseModel::Bernoulli, 0.5, 0.5, 100);
        assert_eq!(forward[41], e2.sample_round(42));
        // bandit view agrees with the full view on the played arm
        assert_eq!(e.bandit().play(17, 1), e.sample_arm(17, 1));
    }

    #[test]
    fn bandit_facade_refuses_full_access() {
        let e = env(NoiseModel::Bernoulli, 0.5, 0.5, 10);
        assert!(matches!(e.bandit().mean_round(1), Err(Error::BanditHygieneViolation(_))));
        assert!(matches!(e.bandit().sample_round(1), Err(Error::BanditHygieneViolation(_))));
    }

    #[test]
    fn piecewise_and_drifting_means() {
        let phases = vec![
            Phase { start: 1, means: means(0.2, 0.4) },
            Phase { start: 11, means: means(0.6, 0.0) },
        ];
        let mut spec = EnvironmentSpec {
            kind: EnvKind::Piecewise,
            num_arms: 2,
            num_resources: 1,
            phases,
            noise: NoiseModel::Bernoulli,
            shared_noise: false,
            seed: 0,
        };
        let e = Environment::new(spec.clone(), 20).unwrap();
        assert_eq!(e.mean_round(10).0[1], 0.2);
        assert_eq!(e.mean_round(11).0[1], 0.6);
        spec.kind = EnvKind::Drifting;
        let e = Environment::new(spec, 20).unwrap();
        assert!((e.mean_round(6).0[1] - 0.4).abs() < 1e-12);
        assert!((e.mean_round(6).1[1][0] - 0.2).abs() < 1e-12);
        assert_eq!(e.mean_round(15).0[1], 0.6);
    }

    #[test]
    fn shared_noise_is_comonotone() {
        let mut spec = EnvironmentSpec::stationary(
            ArmMeans {
                rewards: vec![0.0, 0.5, 0.5],
                costs: vec![vec![0.0], vec![0.5], vec![0.5]],
            },
            NoiseModel::Bernoulli,
            3,
        );
        spec.shared_noise = true;
        let e = Environment::new(spec, 50).unwrap();
        for t in 1..=50 {
            let (f, c) = e.sample_round(t);
            assert_eq!(f[1], f[2]);
            assert_eq!(f[1], c[1][0]);
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut spec = EnvironmentSpec::stationary(means(0.5, 0.5), NoiseModel::Bernoulli, 0);
        spec.phases[0].means.rewards[0] = 0.1;
        assert!(Environment::new(spec, 10).is_err());
        let spec = EnvironmentSpec::stationary(means(0.8, 0.5), NoiseModel::CommonScale { spread: 0.5 }, 0);
        assert!(Environment::new(spec, 10).is_err());
        let spec = EnvironmentSpec::stationary(means(1.5, 0.5), NoiseModel::Bernoulli, 0);
        assert!(Environment::new(spec, 10).is_err());
    }

    #[test]
    fn hard_pair_agrees_then_splits() {
        let (a, b) = hard_pair(10, 0).unwrap();
        for t in 1..=5 {
            assert_eq!(a.sample_round(t), b.sample_round(t));
        }
        assert_ne!(a.sample_round(6), b.sample_round(6));
    }
}
