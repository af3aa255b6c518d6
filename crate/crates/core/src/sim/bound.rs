//! Analytic bound curves for a simulation sweep.

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::gtf::{analyze, TruncationPolicy};
use crate::search::free_distance;

/// Asymptotic and Chernoff bound values over the sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    pub eta_min: usize,
    pub diversity_order: usize,
    /// `F_min(m) / N`.
    pub f_min_per_frame: f64,
    pub d_f: u32,
    pub delta_h: u32,
    pub ebn0_db: Vec<f64>,
    pub asymptotic: Vec<f64>,
    pub chernoff: Vec<f64>,
}

/// Evaluates both bounds at every sweep point.
///
/// The asymptotic curve uses the configured truncation. The Chernoff sum
/// runs over every term within `delta_h` and falls back to the truncated
/// set when that exceeds the term cap.
pub fn run_bound(cfg: &ExperimentConfig) -> Result<BoundCurve> {
    let gens = cfg.generator_set()?;
    let enc = cfg.encoder();
    let spec = cfg.bound.unwrap_or_default();
    let d_f = free_distance(&gens, &enc)?;
    let policy = spec.policy(d_f);
    let mode = spec.mode();
    let cm = analyze(&gens, &enc, cfg.blocks, &policy, &mode)?;
    let wide = TruncationPolicy {
        term_cap: policy.term_cap,
        ..TruncationPolicy::untruncated(policy.delta_h)
    };
    let cm_all = match analyze(&gens, &enc, cfg.blocks, &wide, &mode) {
        Ok(m) => m,
        Err(Error::TermBudget { .. }) => cm.clone(),
        Err(e) => return Err(e),
    };
    let mut asymptotic = Vec::new();
    let mut chernoff = Vec::new();
    for &db in &cfg.ebn0_db {
        let es = cfg.es_n0(db);
        asymptotic.push(cm.asymptotic_bound(es).min(1.0));
        chernoff.push(cm_all.chernoff_bound(es).min(1.0));
    }
    Ok(BoundCurve {
        eta_min: cm.eta_min,
        diversity_order: cm.diversity_order(),
        f_min_per_frame: cm.f_min_per_frame(),
        d_f,
        delta_h: policy.delta_h.unwrap_or_default(),
        ebn0_db: cfg.ebn0_db.clone(),
        asymptotic,
        chernoff,
    })
}
