//! Experiment orchestration: configs, Monte Carlo FER, bounds and output.

mod bound;
mod config;
mod fer;
mod output;

pub use bound::{run_bound, BoundCurve};
pub use config::{BoundSpec, ExperimentConfig, OutputPaths, ReferenceMode, StopRule, MIN_ERRORS_FLOOR};
pub use fer::{count_errors, frame_rng, run_fer, run_point, wilson_interval, FerRecord};
pub use output::{check_collision, manifest, write_fer_csv, write_file, write_json, FER_HEADER};

use crate::error::Result;

/// Simulated FER with both bound columns filled in.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<(Vec<FerRecord>, Option<BoundCurve>)> {
    let mut records = run_fer(cfg)?;
    let curve = match cfg.bound {
        Some(_) => Some(run_bound(cfg)?),
        None => None,
    };
    if let Some(c) = &curve {
        for (r, (a, ch)) in records.iter_mut().zip(c.asymptotic.iter().zip(&c.chernoff)) {
            r.bound_asymptotic = Some(*a);
            r.bound_chernoff = Some(*ch);
        }
    }
    Ok((records, curve))
}
