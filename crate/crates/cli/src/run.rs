//! The `run` command: seeded runs over a horizon sweep, fanned out to a
//! worker pool and merged in `(T, seed)` order.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use planpace_core::algorithms::run_algorithm;
use planpace_core::oracles::{oracle_report, realized_regrets, OracleReport};

use crate::config::{load_config, ExperimentConfig};
use crate::{thread_cap, CliError};

#[derive(Debug, Clone, Default)]
pub struct RunOverrides {
    /// Run this single seed instead of the configured list.
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub setting: String,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub seed: u64,
    pub total_reward: f64,
    pub opt_dynamic: f64,
    pub opt_static: f64,
    pub dynamic_regret: f64,
    pub static_regret: f64,
    pub tau: usize,
    pub theoretical_bound: f64,
    pub rho_min_used: f64,
    pub meta_applied: bool,
}

/// A finished run with its trace kept for optional dumping.
struct Finished {
    row: SummaryRow,
    trace: planpace_core::RunTrace,
}

fn run_one(cfg: &ExperimentConfig, horizon: usize, seed: u64, strict: bool, report: &OracleReport) -> Result<Finished, CliError> {
    let inst = cfg.instance(horizon)?;
    let mut spec = cfg.spec_for(&inst)?;
    spec.strict |= strict;
    let env = cfg.environment(horizon, seed)?;
    let fail = |e: planpace_core::Error| CliError::Run(format!("T = {horizon}, seed {seed}: {e}"));
    let out = run_algorithm(&spec, &inst, &env, seed, cfg.algorithm.delta_p).map_err(fail)?;
    let bound = out
        .theoretical_bound(&spec, &inst, cfg.algorithm.delta, cfg.algorithm.delta_p)
        .map_err(fail)?;
    let (dynamic_regret, static_regret) = realized_regrets(&out.trace, report);
    Ok(Finished {
        row: SummaryRow {
            algorithm: spec.name(),
            setting: spec.setting.name().to_string(),
            horizon,
            seed,
            total_reward: out.trace.total_reward,
            opt_dynamic: report.opt_dynamic,
            opt_static: report.opt_static,
            dynamic_regret,
            static_regret,
            tau: out.trace.tau,
            theoretical_bound: bound,
            rho_min_used: out.learner.rho_min_used,
            meta_applied: out.learner.meta_applied,
        },
        trace: out.trace,
    })
}

fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Run(format!("worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Oracle baselines per horizon. The means do not depend on the run seed.
pub fn horizon_reports(cfg: &ExperimentConfig) -> Result<BTreeMap<usize, OracleReport>, CliError> {
    let horizons = cfg.horizons();
    let reports: Vec<_> = with_pool(|| {
        horizons
            .par_iter()
            .map(|&t| {
                let inst = cfg.instance(t)?;
                let profile = cfg
                    .environment(t, 0)?
                    .mean_profile()
                    .map_err(|e| CliError::Run(e.to_string()))?;
                let errs = cfg.error_schedule(t)?;
                let relaxed = errs.as_ref().map(|e| (e, inst.budget()));
                let report = oracle_report(&profile, inst.plan(), relaxed)
                    .map_err(|e| CliError::Run(format!("oracle at T = {t}: {e}")))?;
                Ok((t, report))
            })
            .collect::<Result<Vec<_>, CliError>>()
    })??;
    Ok(reports.into_iter().collect())
}

fn execute_inner(cfg: &ExperimentConfig, overrides: &RunOverrides) -> Result<Vec<Finished>, CliError> {
    let seeds = overrides.seed.map_or_else(|| cfg.seeds(), |s| vec![s]);
    let reports = horizon_reports(cfg)?;
    let jobs: Vec<(usize, u64)> = reports
        .keys()
        .flat_map(|&t| seeds.iter().map(move |&s| (t, s)))
        .collect();
    let mut done = with_pool(|| {
        jobs.par_iter()
            .map(|&(t, s)| run_one(cfg, t, s, overrides.strict, &reports[&t]))
            .collect::<Result<Vec<_>, CliError>>()
    })??;
    done.sort_by_key(|f| (f.row.horizon, f.row.seed));
    Ok(done)
}

/// Runs every `(T, seed)` pair and returns the summary rows in `(T, seed)` order.
pub fn execute(cfg: &ExperimentConfig, overrides: &RunOverrides) -> Result<Vec<SummaryRow>, CliError> {
    Ok(execute_inner(cfg, overrides)?.into_iter().map(|f| f.row).collect())
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(())
}

fn write_metadata(path: &Path, cfg: &ExperimentConfig, overrides: &RunOverrides, rows: usize) -> Result<(), CliError> {
    let spec = cfg.base_spec()?;
    let seeds = overrides.seed.map_or_else(|| cfg.seeds(), |s| vec![s]);
    let join = |v: Vec<String>| v.join(" ");
    let entries = [
        ("version", env!("CARGO_PKG_VERSION").to_string()),
        ("setting", spec.setting.name().to_string()),
        ("dual", format!("{:?}", spec.dual_kind)),
        ("primal", format!("{:?}", spec.primal_kind)),
        ("time_varying", spec.time_varying.to_string()),
        ("meta", format!("{:?}", cfg.algorithm.meta)),
        ("void_skip", spec.void_skip.to_string()),
        ("delta", cfg.algorithm.delta.to_string()),
        ("delta_p", cfg.algorithm.delta_p.to_string()),
        ("rho", cfg.rho().to_string()),
        ("horizons", join(cfg.horizons().iter().map(ToString::to_string).collect())),
        ("seeds", join(seeds.iter().map(ToString::to_string).collect())),
        ("strict", (spec.strict || overrides.strict).to_string()),
        ("rows", rows.to_string()),
    ];
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["key", "value"])?;
    for (k, v) in entries {
        w.write_record([k, v.as_str()])?;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(())
}

/// Loads the config, runs it and writes `summary.csv`, `metadata.csv` and
/// (when enabled) one trace per run. Returns the output directory.
pub fn cmd_run(config_path: &Path, overrides: &RunOverrides) -> Result<PathBuf, CliError> {
    let cfg = load_config(config_path)?;
    let out_dir = overrides
        .out
        .clone()
        .unwrap_or_else(|| cfg.base_dir.join(&cfg.output.dir));
    std::fs::create_dir_all(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;
    let finished = execute_inner(&cfg, overrides)?;
    if cfg.output.traces {
        for f in &finished {
            let path = out_dir.join(format!("trace_T{}_seed{}.csv", f.row.horizon, f.row.seed));
            let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
            f.trace
                .write_csv(BufWriter::new(file))
                .map_err(|e| CliError::io(&path, e))?;
        }
    }
    let rows: Vec<SummaryRow> = finished.into_iter().map(|f| f.row).collect();
    write_summary(&out_dir.join("summary.csv"), &rows)?;
    write_metadata(&out_dir.join("metadata.csv"), &cfg, overrides, rows.len())?;
    log::info!("wrote {} summary rows to {}", rows.len(), out_dir.display());
    Ok(out_dir)
}
