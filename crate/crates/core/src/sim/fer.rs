//! Monte Carlo frame error rate estimation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::channel::{resample_gains, sample_channel, transmit, ChannelConfig};
use crate::encoder::encode_with;
use crate::error::Result;
use crate::par;
use crate::trellis::{build_trellis, EncoderConfig, Trellis};
use crate::viterbi::Decoder;

/// Frames one worker simulates back to back with shared scratch buffers.
const CHUNK: u64 = 64;

/// Normal quantile for a two-sided 95% interval.
const Z95: f64 = 1.959_963_984_540_054;

/// Simulated frame error rate at one SNR point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FerRecord {
    pub ebn0_db: f64,
    pub frames: u64,
    pub errors: u64,
    pub fer: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub bound_chernoff: Option<f64>,
    pub bound_asymptotic: Option<f64>,
}

impl FerRecord {
    pub fn new(ebn0_db: f64, frames: u64, errors: u64) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(errors, frames);
        Self {
            ebn0_db,
            frames,
            errors,
            fer: if frames == 0 { 0.0 } else { errors as f64 / frames as f64 },
            ci_lo,
            ci_hi,
            bound_chernoff: None,
            bound_asymptotic: None,
        }
    }
}

/// 95% Wilson score interval for `errors` successes in `frames` trials.
pub fn wilson_interval(errors: u64, frames: u64) -> (f64, f64) {
    if frames == 0 {
        return (0.0, 1.0);
    }
    let n = frames as f64;
    let p = errors as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

/// RNG of frame `frame` at sweep point `point`.
pub fn frame_rng(seed: u64, point: usize, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (point as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.set_stream(frame);
    rng
}

/// Simulates frames `start..end` and counts frame errors.
pub fn count_errors(
    trellis: &Trellis,
    enc: &EncoderConfig,
    ch: &ChannelConfig,
    point: usize,
    start: u64,
    end: u64,
) -> Result<u64> {
    let mut dec = Decoder::new(trellis);
    let mut bits = vec![0u8; enc.info_bits()];
    let mut real = None;
    let mut errors = 0;
    for f in start..end {
        let mut rng = frame_rng(ch.seed, point, f);
        for b in bits.iter_mut() {
            *b = rng.random::<bool>() as u8;
        }
        let r = match real.as_mut() {
            None => real.insert(sample_channel(ch, &mut rng)?),
            Some(r) => {
                resample_gains(r, ch.blocks, &mut rng);
                r
            }
        };
        let cw = encode_with(&bits, trellis, enc)?;
        let rx = transmit(&cw, r, ch, &mut rng)?;
        let out = dec.decode(&rx, r, enc, 1.0)?;
        if out.info_bits != bits {
            errors += 1;
        }
    }
    Ok(errors)
}

/// Runs one SNR point until the stop rule fires.
///
/// Frames are processed in fixed batches and counted exactly, so the
/// result does not depend on the number of workers.
pub fn run_point(cfg: &ExperimentConfig, trellis: &Trellis, point: usize) -> Result<FerRecord> {
    let enc = cfg.encoder();
    let ebn0 = cfg.ebn0_db[point];
    let ch = cfg.channel(ebn0);
    let mut frames = 0u64;
    let mut errors = 0u64;
    while errors < cfg.stop.min_errors && frames < cfg.stop.max_frames {
        let end = (frames + cfg.batch_frames).min(cfg.stop.max_frames);
        let chunks = (end - frames).div_ceil(CHUNK);
        let counts = par::map_range(0, chunks, |c| {
            let a = frames + c * CHUNK;
            count_errors(trellis, &enc, &ch, point, a, (a + CHUNK).min(end))
        });
        for c in counts {
            errors += c?;
        }
        frames = end;
    }
    Ok(FerRecord::new(ebn0, frames, errors))
}

/// Simulated FER over the whole sweep.
pub fn run_fer(cfg: &ExperimentConfig) -> Result<Vec<FerRecord>> {
    cfg.validate()?;
    let trellis = build_trellis(&cfg.generator_set()?, &cfg.encoder())?;
    (0..cfg.ebn0_db.len())
        .map(|p| run_point(cfg, &trellis, p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(g: &str, ebn0: Vec<f64>) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(g, 2, 1, 1, 3, 32, 1, 1);
        c.ebn0_db = ebn0;
        c.stop.min_errors = 20;
        c.stop.max_frames = 2000;
        c.allow_low_confidence = true;
        c.batch_frames = 256;
        c
    }

    #[test]
    fn wilson_contains_estimate() {
        for (e, n) in [(0, 10), (5, 10), (10, 10), (200, 1_000_000)] {
            let (lo, hi) = wilson_interval(e, n);
            let p = e as f64 / n as f64;
            assert!(lo <= p && p <= hi, "{e}/{n}");
            assert!((0.0..=1.0).contains(&lo) && hi <= 1.0);
        }
        let (lo, hi) = wilson_interval(100, 10_000);
        assert!((hi - lo) / 2.0 / 0.01 < 0.21);
    }

    #[test]
    fn noiseless_has_no_errors() {
        let mut c = quick("5,7", vec![0.0]);
        c.noiseless = true;
        c.stop.max_frames = 500;
        let r = run_fer(&c).unwrap();
        assert_eq!(r[0].errors, 0);
        assert_eq!(r[0].frames, 500);
    }

    #[test]
    fn deterministic_and_batch_independent() {
        let c = quick("5,7", vec![2.0, 4.0]);
        let a = run_fer(&c).unwrap();
        let b = run_fer(&c).unwrap();
        assert_eq!(a, b);
        let mut d = c.clone();
        d.batch_frames = 64;
        d.stop.min_errors = u64::MAX;
        d.stop.max_frames = 512;
        let mut e = d.clone();
        e.batch_frames = 512;
        assert_eq!(run_fer(&d).unwrap(), run_fer(&e).unwrap());
    }

    #[test]
    fn fer_decreases_with_snr() {
        let r = run_fer(&quick("5,7", vec![0.0, 10.0])).unwrap();
        assert!(r[0].fer > r[1].fer);
        assert!(r[0].errors >= 20);
    }
}
