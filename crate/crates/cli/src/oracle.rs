//! The `oracle` command: baselines only, no simulation.

use std::io::Write;
use std::path::Path;

use crate::config::load_config;
use crate::run::horizon_reports;
use crate::CliError;

/// Writes one CSV line per configured horizon; relaxed baselines are empty
/// unless an `[errors]` section is present.
pub fn cmd_oracle<W: Write>(config_path: &Path, out: W) -> Result<(), CliError> {
    let cfg = load_config(config_path)?;
    let reports = horizon_reports(&cfg)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["T", "opt_dynamic", "opt_static", "opt_dynamic_eps", "opt_static_eps"])?;
    let opt = |v: Option<f64>| v.map_or_else(String::new, |x| x.to_string());
    for (t, r) in &reports {
        w.write_record([
            t.to_string(),
            r.opt_dynamic.to_string(),
            r.opt_static.to_string(),
            opt(r.opt_dynamic_eps),
            opt(r.opt_static_eps),
        ])?;
    }
    w.flush().map_err(|e| CliError::io("stdout", e))?;
    Ok(())
}
