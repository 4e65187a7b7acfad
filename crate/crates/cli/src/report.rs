//! The `report` command: aggregates summary CSVs per `(algorithm, T)`.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::run::SummaryRow;
use crate::svg::{line_chart, Series};
use crate::CliError;

#[derive(Debug, Clone, Copy, Default)]
pub struct ReportOptions {
    pub svg: bool,
    /// Malformed rows fail the command instead of being skipped.
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub algorithm: String,
    pub setting: String,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub runs: usize,
    /// Dynamic regret for ORA, static regret otherwise.
    pub median_regret: f64,
    pub q1_regret: f64,
    pub q3_regret: f64,
    pub iqr_regret: f64,
    pub median_bound: f64,
    /// Median over seeds of `regret / bound`.
    pub median_bound_ratio: f64,
    /// Next smaller horizon of the same algorithm, if any.
    pub prev_t: Option<usize>,
    /// `median_regret / median_regret(prev_t)`.
    pub growth_ratio: Option<f64>,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn summary_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if name.starts_with("summary") && name.ends_with(".csv") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Parses summary CSV text; returns good rows and the number of bad ones.
pub fn parse_summary(text: &str) -> (Vec<SummaryRow>, usize) {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut rows = Vec::new();
    let mut bad = 0;
    for record in reader.deserialize::<SummaryRow>() {
        match record {
            Ok(row) if row.total_reward.is_finite() && row.theoretical_bound.is_finite() => rows.push(row),
            _ => bad += 1,
        }
    }
    (rows, bad)
}

/// All summary rows under `dir` plus the count of skipped malformed rows.
pub fn read_summaries(dir: &Path) -> Result<(Vec<SummaryRow>, usize), CliError> {
    let mut rows = Vec::new();
    let mut bad = 0;
    for path in summary_files(dir)? {
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let (r, b) = parse_summary(&text);
        rows.extend(r);
        bad += b;
    }
    Ok((rows, bad))
}

fn regret_of(row: &SummaryRow) -> f64 {
    if row.setting == "ORA" {
        row.dynamic_regret
    } else {
        row.static_regret
    }
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

pub fn aggregate(rows: &[SummaryRow]) -> Vec<ReportRow> {
    let mut groups: BTreeMap<(String, String, usize), Vec<&SummaryRow>> = BTreeMap::new();
    for row in rows {
        groups
            .entry((row.algorithm.clone(), row.setting.clone(), row.horizon))
            .or_default()
            .push(row);
    }
    let mut out: Vec<ReportRow> = Vec::new();
    for ((algorithm, setting, horizon), members) in groups {
        let regrets = sorted(members.iter().map(|r| regret_of(r)).collect());
        let bounds = sorted(members.iter().map(|r| r.theoretical_bound).collect());
        let ratios = sorted(members.iter().map(|r| regret_of(r) / r.theoretical_bound).collect());
        let (q1, q3) = (quantile(&regrets, 0.25), quantile(&regrets, 0.75));
        let median = quantile(&regrets, 0.5);
        let prev = out
            .last()
            .filter(|p| p.algorithm == algorithm && p.setting == setting)
            .map(|p| (p.horizon, p.median_regret));
        out.push(ReportRow {
            algorithm,
            setting,
            horizon,
            runs: members.len(),
            median_regret: median,
            q1_regret: q1,
            q3_regret: q3,
            iqr_regret: q3 - q1,
            median_bound: quantile(&bounds, 0.5),
            median_bound_ratio: quantile(&ratios, 0.5),
            prev_t: prev.map(|p| p.0),
            growth_ratio: prev.map(|p| median / p.1),
        });
    }
    out
}

fn write_svg(path: &Path, report: &[ReportRow]) -> std::io::Result<()> {
    let mut series: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for r in report {
        if r.median_regret > 0.0 {
            series
                .entry(&r.algorithm)
                .or_default()
                .push((r.horizon as f64, r.median_regret));
        }
    }
    let series: Vec<Series> = series
        .into_iter()
        .map(|(name, points)| Series {
            name: name.to_string(),
            points,
        })
        .collect();
    std::fs::write(path, line_chart(&series, "T", "median regret"))
}

/// Reads `summary*.csv` under `dir`, writes `report.csv` (and `report.svg`)
/// next to them and returns the aggregate rows.
pub fn cmd_report(dir: &Path, opts: ReportOptions) -> Result<Vec<ReportRow>, CliError> {
    let (rows, bad) = read_summaries(dir)?;
    if bad > 0 {
        eprintln!("warning: skipped {bad} malformed summary rows");
    }
    if rows.is_empty() {
        return Err(CliError::EmptyInput(dir.to_path_buf()));
    }
    let report = aggregate(&rows);
    let path = dir.join("report.csv");
    let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for r in &report {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;
    if opts.svg {
        let svg = dir.join("report.svg");
        if let Err(e) = write_svg(&svg, &report) {
            log::warn!("could not write {}: {e}", svg.display());
        }
    }
    if opts.strict && bad > 0 {
        return Err(CliError::Malformed(bad));
    }
    Ok(report)
}
