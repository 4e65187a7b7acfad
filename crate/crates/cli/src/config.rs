//! TOML experiment configuration and its translation into core types.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use planpace_core::algorithms::{AlgorithmSpec, DualKind, PrimalKind, Setting};
use planpace_core::environments::{
    generate_plan, ArmMeans, EnvKind, Environment, EnvironmentSpec, NoiseModel, Phase, PlanKind, PlanSpec,
};
use planpace_core::oracles::ErrorSchedule;
use planpace_core::{Instance, SpendingPlan};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceSection,
    pub plan: PlanSection,
    pub environment: EnvironmentSection,
    pub algorithm: AlgorithmSection,
    #[serde(default)]
    pub errors: Option<ErrorsSection>,
    #[serde(default)]
    pub runs: RunsSection,
    #[serde(default)]
    pub output: OutputSection,
    /// Directory of the config file; relative paths resolve against it.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSection {
    /// `T`; the default horizon when no sweep is given.
    pub horizon: usize,
    pub num_arms: usize,
    pub num_resources: usize,
    /// Total budget `B` at `horizon`. Sweeps keep `B / T` fixed.
    pub budget: Option<f64>,
    /// Alternative to `budget`.
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSection {
    pub kind: String,
    pub imbalance: Option<f64>,
    pub period: Option<usize>,
    pub low_factor: Option<f64>,
    /// CSV with one row per resource, one column per round.
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSection {
    /// One-based first round.
    pub start: Option<usize>,
    /// First round as a fraction of the horizon, for sweeps.
    pub at: Option<f64>,
    pub rewards: Vec<f64>,
    pub costs: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSection {
    pub kind: String,
    #[serde(default = "default_noise")]
    pub noise: String,
    pub half_width: Option<f64>,
    pub spread: Option<f64>,
    #[serde(default)]
    pub shared_noise: bool,
    /// Mixed into every run seed.
    #[serde(default)]
    pub seed: u64,
    pub phases: Vec<PhaseSection>,
}

fn default_noise() -> String {
    "bernoulli".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum MetaChoice {
    Flag(bool),
    Auto(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

impl Default for MetaChoice {
    fn default() -> Self {
        MetaChoice::Auto(AutoTag::Auto)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSection {
    pub setting: String,
    /// `true`, `false` or `"auto"` (meta exactly when `rho_min <= rho / T^{1/4}`).
    #[serde(default)]
    pub meta: MetaChoice,
    #[serde(default)]
    pub void_skip: bool,
    #[serde(default = "default_dual")]
    pub dual: String,
    pub primal: Option<String>,
    pub time_varying: Option<bool>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_delta")]
    pub delta_p: f64,
    #[serde(default)]
    pub strict: bool,
}

fn default_dual() -> String {
    "euclidean".into()
}

fn default_delta() -> f64 {
    0.05
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorsSection {
    /// Same error for every round and resource.
    pub uniform: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunsSection {
    pub seeds: Option<Vec<u64>>,
    /// Seeds `0..count` when no list is given.
    pub count: Option<u64>,
    pub horizons: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_out")]
    pub dir: PathBuf,
    #[serde(default)]
    pub traces: bool,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_out(),
            traces: false,
        }
    }
}

/// Size caps that keep a single config from exhausting memory.
pub const MAX_HORIZON: usize = 10_000_000;
pub const MAX_ARMS: usize = 1024;
pub const MAX_RESOURCES: usize = 256;
pub const MAX_SEEDS: u64 = 1_000_000;
/// Cap on `num_resources * T` for the largest horizon.
pub const MAX_PLAN_CELLS: usize = 50_000_000;

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Parses and validates a config held in memory. Relative paths resolve
/// against `base_dir`.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<ExperimentConfig, CliError> {
    let mut cfg: ExperimentConfig = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
    cfg.base_dir = base_dir.to_path_buf();
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(&text, base).map_err(|e| match e {
        CliError::Config(msg) => config_err(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Reads an `m x T` plan matrix: one line per resource, comma separated.
pub fn parse_plan_csv(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| config_err(format!("plan csv: {e}")))?;
        let row = record
            .iter()
            .enumerate()
            .map(|(col, field)| {
                field.parse::<f64>().map_err(|_| {
                    config_err(format!("plan csv line {}, column {}: {field:?} is not a number", line + 1, col + 1))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(config_err("plan csv is empty"));
    }
    Ok(rows)
}

impl ExperimentConfig {
    fn validate(&self) -> Result<(), CliError> {
        let inst = &self.instance;
        if inst.horizon == 0 || inst.num_arms < 2 || inst.num_resources == 0 {
            return Err(config_err("instance: need horizon >= 1, num_arms >= 2, num_resources >= 1"));
        }
        if inst.num_arms > MAX_ARMS || inst.num_resources > MAX_RESOURCES {
            return Err(config_err(format!(
                "instance: at most {MAX_ARMS} arms and {MAX_RESOURCES} resources"
            )));
        }
        if self.runs.count.is_some_and(|c| c > MAX_SEEDS) {
            return Err(config_err(format!("runs.count above {MAX_SEEDS}")));
        }
        if std::iter::once(inst.horizon)
            .chain(self.runs.horizons.iter().flatten().copied())
            .any(|t| t > MAX_HORIZON || t.saturating_mul(inst.num_resources) > MAX_PLAN_CELLS)
        {
            return Err(config_err(format!("horizons above {MAX_HORIZON} are not supported")));
        }
        match (inst.budget, inst.rho) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(config_err("instance: give exactly one of budget and rho"));
            }
            _ => {}
        }
        for (name, d) in [("delta", self.algorithm.delta), ("delta_p", self.algorithm.delta_p)] {
            if !(d > 0.0 && d < 1.0) {
                return Err(config_err(format!("algorithm.{name} = {d} outside (0, 1)")));
            }
        }
        if let Some(e) = &self.errors {
            if !(e.uniform >= 0.0 && e.uniform.is_finite()) {
                return Err(config_err(format!("errors.uniform = {} must be nonnegative", e.uniform)));
            }
        }
        if self.seeds().is_empty() {
            return Err(config_err("runs: empty seed list"));
        }
        if self.horizons().contains(&0) {
            return Err(config_err("runs.horizons: horizons must be positive"));
        }
        self.base_spec()?.validate().map_err(|e| config_err(format!("algorithm: {e}")))?;
        self.plan_kind()?;
        self.noise()?;
        self.env_kind()?;
        for &t in &self.horizons() {
            self.environment(t, 0)?;
            self.instance(t)?;
        }
        Ok(())
    }

    pub fn seeds(&self) -> Vec<u64> {
        match (&self.runs.seeds, self.runs.count) {
            (Some(list), _) => list.clone(),
            (None, Some(n)) => (0..n).collect(),
            (None, None) => vec![0],
        }
    }

    pub fn horizons(&self) -> Vec<usize> {
        self.runs.horizons.clone().unwrap_or_else(|| vec![self.instance.horizon])
    }

    pub fn rho(&self) -> f64 {
        match (self.instance.budget, self.instance.rho) {
            (Some(b), _) => b / self.instance.horizon as f64,
            (None, Some(r)) => r,
            (None, None) => 0.0,
        }
    }

    pub fn setting(&self) -> Result<Setting, CliError> {
        self.algorithm
            .setting
            .parse()
            .map_err(|_| config_err(format!("algorithm.setting: unknown {:?}", self.algorithm.setting)))
    }

    /// Spec before the auto-meta decision; `meta_rescale` holds only an explicit `true`.
    pub fn base_spec(&self) -> Result<AlgorithmSpec, CliError> {
        let a = &self.algorithm;
        let mut spec = AlgorithmSpec::new(self.setting()?);
        spec.dual_kind = match a.dual.to_ascii_lowercase().as_str() {
            "euclidean" | "ogd" => DualKind::Euclidean,
            "entropic" => DualKind::Entropic,
            other => return Err(config_err(format!("algorithm.dual: unknown {other:?}"))),
        };
        if let Some(p) = &a.primal {
            spec.primal_kind = match p.to_ascii_lowercase().as_str() {
                "hedge" => Some(PrimalKind::Hedge),
                "exp3ix" | "exp3-ix" => Some(PrimalKind::Exp3Ix),
                "none" => None,
                other => return Err(config_err(format!("algorithm.primal: unknown {other:?}"))),
            };
        }
        if let Some(tv) = a.time_varying {
            spec.time_varying = tv;
        }
        spec.void_skip = a.void_skip;
        spec.meta_rescale = a.meta == MetaChoice::Flag(true);
        spec.strict = a.strict;
        Ok(spec)
    }

    /// Spec for horizon `horizon` with the auto-meta rule applied.
    pub fn spec_for(&self, inst: &Instance) -> Result<AlgorithmSpec, CliError> {
        let mut spec = self.base_spec()?;
        if self.algorithm.meta == MetaChoice::Auto(AutoTag::Auto) && !spec.void_skip {
            let threshold = inst.rho() / (inst.horizon() as f64).powf(0.25);
            spec.meta_rescale = inst.rho_min() <= threshold;
            if spec.meta_rescale {
                log::info!(
                    "T = {}: rho_min {} <= rho / T^(1/4) = {threshold}, using the meta procedure",
                    inst.horizon(),
                    inst.rho_min()
                );
            }
        }
        Ok(spec)
    }

    fn plan_kind(&self) -> Result<PlanKind, CliError> {
        let p = &self.plan;
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| config_err(format!("plan: {} needs {name}", p.kind)));
        Ok(match p.kind.to_ascii_lowercase().as_str() {
            "uniform" => PlanKind::Uniform,
            "frontloaded" => PlanKind::Frontloaded {
                imbalance: need(p.imbalance, "imbalance")?,
            },
            "backloaded" => PlanKind::Backloaded {
                imbalance: need(p.imbalance, "imbalance")?,
            },
            "spiky" => PlanKind::Spiky {
                period: p.period.ok_or_else(|| config_err("plan: spiky needs period"))?,
                low_factor: p.low_factor,
            },
            "custom" => {
                let rel = p.path.as_ref().ok_or_else(|| config_err("plan: custom needs path"))?;
                let path = self.base_dir.join(rel);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| config_err(format!("plan: cannot read {}: {e}", path.display())))?;
                PlanKind::Custom(parse_plan_csv(&text)?)
            }
            other => return Err(config_err(format!("plan.kind: unknown {other:?}"))),
        })
    }

    pub fn budget_at(&self, horizon: usize) -> f64 {
        match (self.instance.budget, horizon == self.instance.horizon) {
            (Some(b), true) => b,
            _ => self.rho() * horizon as f64,
        }
    }

    pub fn plan(&self, horizon: usize) -> Result<SpendingPlan, CliError> {
        let spec = PlanSpec { kind: self.plan_kind()? };
        generate_plan(&spec, horizon, self.instance.num_resources, self.budget_at(horizon))
            .map_err(|e| config_err(format!("plan at T = {horizon}: {e}")))
    }

    pub fn instance(&self, horizon: usize) -> Result<Instance, CliError> {
        Instance::new(self.instance.num_arms, self.budget_at(horizon), self.plan(horizon)?)
            .map_err(|e| config_err(format!("instance at T = {horizon}: {e}")))
    }

    fn noise(&self) -> Result<NoiseModel, CliError> {
        let e = &self.environment;
        Ok(match e.noise.to_ascii_lowercase().as_str() {
            "bernoulli" => NoiseModel::Bernoulli,
            "uniform" => NoiseModel::UniformInterval {
                half_width: e.half_width.ok_or_else(|| config_err("environment: uniform noise needs half_width"))?,
            },
            "common_scale" => NoiseModel::CommonScale {
                spread: e.spread.ok_or_else(|| config_err("environment: common_scale noise needs spread"))?,
            },
            other => return Err(config_err(format!("environment.noise: unknown {other:?}"))),
        })
    }

    fn env_kind(&self) -> Result<EnvKind, CliError> {
        Ok(match self.environment.kind.to_ascii_lowercase().as_str() {
            "stationary" => EnvKind::Stationary,
            "piecewise" => EnvKind::Piecewise,
            "drifting" => EnvKind::Drifting,
            "deterministic" | "adversarial" => EnvKind::DeterministicAdversarial,
            other => return Err(config_err(format!("environment.kind: unknown {other:?}"))),
        })
    }

    /// Environment seed for a run seed.
    pub fn env_seed(&self, run_seed: u64) -> u64 {
        run_seed ^ self.environment.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
    }

    pub fn environment(&self, horizon: usize, run_seed: u64) -> Result<Environment, CliError> {
        let mut phases = Vec::with_capacity(self.environment.phases.len());
        for (j, p) in self.environment.phases.iter().enumerate() {
            let start = match (p.start, p.at) {
                (Some(s), None) => s,
                (None, Some(a)) if (0.0..1.0).contains(&a) => (a * horizon as f64).floor() as usize + 1,
                (None, None) if j == 0 => 1,
                _ => {
                    return Err(config_err(format!(
                        "environment.phases[{j}]: give exactly one of start and at (in [0, 1))"
                    )))
                }
            };
            phases.push(Phase {
                start,
                means: ArmMeans {
                    rewards: p.rewards.clone(),
                    costs: p.costs.clone(),
                },
            });
        }
        let spec = EnvironmentSpec {
            kind: self.env_kind()?,
            num_arms: self.instance.num_arms,
            num_resources: self.instance.num_resources,
            phases,
            noise: self.noise()?,
            shared_noise: self.environment.shared_noise,
            seed: self.env_seed(run_seed),
        };
        Environment::new(spec, horizon).map_err(|e| config_err(format!("environment: {e}")))
    }

    pub fn error_schedule(&self, horizon: usize) -> Result<Option<ErrorSchedule>, CliError> {
        self.errors
            .as_ref()
            .map(|e| {
                ErrorSchedule::uniform(self.instance.num_resources, horizon, e.uniform)
                    .map_err(|err| config_err(format!("errors: {err}")))
            })
            .transpose()
    }
}
