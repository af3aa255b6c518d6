//! Space-time generalized transfer function.

mod dyadic;
mod error_trellis;
mod forward;
mod metrics;
mod polynomial;

pub use dyadic::Dyadic;
pub use error_trellis::{build_error_trellis, ErrorTrellis, EventScope, GtfMode, Reference};
pub use forward::{gtf_forward, TruncationPolicy, DEFAULT_DELTA_P, DEFAULT_TERM_CAP};
pub use metrics::{code_metrics, term_summaries, CodeMetrics, TermSummary};
pub use polynomial::{MatrixExponentPolynomial, TermKey};

use crate::channel::assign_blocks;
use crate::error::Result;
use crate::generators::GeneratorSet;
use crate::trellis::{build_trellis, EncoderConfig};

/// Builds the trellis, runs the forward pass over a periodically
/// interleaved frame of `cfg.frame_len` steps and `blocks` fading blocks,
/// and extracts the metrics for `cfg.m` receive antennas.
///
/// Time-0 analysis is scaled by the frame length; other scopes by 1.
pub fn analyze(
    gens: &GeneratorSet,
    cfg: &EncoderConfig,
    blocks: usize,
    policy: &TruncationPolicy,
    mode: &GtfMode,
) -> Result<CodeMetrics> {
    let poly = transfer_function(gens, cfg, blocks, policy, mode)?;
    let mult = match mode.scope {
        EventScope::Time0 => cfg.frame_len as f64,
        _ => 1.0,
    };
    code_metrics(&poly, cfg.m, mult, policy.delta_p)
}

/// The transfer function of a code under a periodic interleaver.
pub fn transfer_function(
    gens: &GeneratorSet,
    cfg: &EncoderConfig,
    blocks: usize,
    policy: &TruncationPolicy,
    mode: &GtfMode,
) -> Result<MatrixExponentPolynomial> {
    let t = build_trellis(gens, cfg)?;
    let et = build_error_trellis(&t)?;
    let a = assign_blocks(cfg.frame_len, blocks)?;
    let mut mode = mode.clone();
    mode.zero_tail = cfg.zero_tail;
    gtf_forward(&et, &a, policy, &mode)
}
