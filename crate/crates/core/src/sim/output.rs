//! Result persistence: CSV tables and JSON run manifests.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use super::config::ExperimentConfig;
use super::fer::FerRecord;
use crate::error::{Error, Result};
use crate::par;
use crate::search::csv_err;

pub const FER_HEADER: [&str; 8] = [
    "ebn0_db",
    "frames",
    "errors",
    "fer",
    "ci_lo",
    "ci_hi",
    "bound_chernoff",
    "bound_asymptotic",
];

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:e}")).unwrap_or_default()
}

/// Writes FER records with the fixed column set.
pub fn write_fer_csv<W: Write>(out: W, records: &[FerRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FER_HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record([
            r.ebn0_db.to_string(),
            r.frames.to_string(),
            r.errors.to_string(),
            format!("{:e}", r.fer),
            format!("{:e}", r.ci_lo),
            format!("{:e}", r.ci_hi),
            opt(r.bound_chernoff),
            opt(r.bound_asymptotic),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Run manifest: configuration, seed, stop rule and tool versions.
pub fn manifest(cfg: &ExperimentConfig, extra: Value) -> Value {
    json!({
        "config": cfg,
        "seed": cfg.seed,
        "stop_rule": cfg.stop,
        "interval": "95% Wilson score interval on the frame error count",
        "versions": {
            "pstc-core": env!("CARGO_PKG_VERSION"),
        },
        "backend": par::backend(),
        "extra": extra,
    })
}

/// Fails when `path` exists and `force` is not set.
pub fn check_collision(path: &Path, force: bool) -> Result<()> {
    if path.exists() && !force {
        return Err(Error::Io(format!(
            "{} already exists; pass --force to overwrite",
            path.display()
        )));
    }
    Ok(())
}

/// Writes `data` to `path`, creating parent directories.
pub fn write_file(path: &Path, data: &[u8], force: bool) -> Result<()> {
    check_collision(path, force)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, data)?;
    Ok(())
}

pub fn write_json(path: &Path, v: &Value, force: bool) -> Result<()> {
    let mut s = serde_json::to_vec_pretty(v)?;
    s.push(b'\n');
    write_file(path, &s, force)
}
