//! MIMO block-fading Rayleigh channel with additive white Gaussian noise.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modulation::SuperSymbol;

/// Channel parameters for one frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub n: usize,
    pub m: usize,
    /// Fading blocks per frame.
    #[serde(rename = "L")]
    pub blocks: usize,
    /// Super-symbols per frame.
    #[serde(rename = "N")]
    pub frame_len: usize,
    /// Linear `Es/N0`; `f64::INFINITY` gives a noiseless channel.
    pub es_n0: f64,
    pub seed: u64,
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 || self.blocks == 0 {
            return Err(Error::InvalidConfig("n, m and L must be at least 1".into()));
        }
        if self.frame_len % self.blocks != 0 {
            return Err(Error::BlocksDoNotDivide {
                frame_len: self.frame_len,
                blocks: self.blocks,
            });
        }
        if self.es_n0.is_nan() || self.es_n0 <= 0.0 {
            return Err(Error::OutOfRange(format!("Es/N0 = {}", self.es_n0)));
        }
        Ok(())
    }

    /// Block length `B = N / L`.
    pub fn block_len(&self) -> usize {
        self.frame_len / self.blocks
    }

    /// Noise variance per real dimension, `N0 / 2` with `Es = 1`.
    pub fn noise_variance(&self) -> f64 {
        0.5 / self.es_n0
    }
}

/// Periodic symbol interleaver: time `t` (0-based) sees block `t mod L`.
pub fn assign_blocks(frame_len: usize, blocks: usize) -> Result<Vec<usize>> {
    if blocks == 0 || frame_len % blocks != 0 {
        return Err(Error::BlocksDoNotDivide { frame_len, blocks });
    }
    Ok((0..frame_len).map(|t| t % blocks).collect())
}

/// Checks an explicit assignment map: every block used `N / L` times.
pub fn validate_assignment(assignment: &[usize], blocks: usize) -> Result<()> {
    if blocks == 0 || assignment.len() % blocks != 0 {
        return Err(Error::BlocksDoNotDivide {
            frame_len: assignment.len(),
            blocks,
        });
    }
    let mut count = vec![0usize; blocks];
    for &l in assignment {
        if l >= blocks {
            return Err(Error::InvalidAssignment(format!("block {l} >= L = {blocks}")));
        }
        count[l] += 1;
    }
    let b = assignment.len() / blocks;
    if let Some(l) = count.iter().position(|&c| c != b) {
        return Err(Error::InvalidAssignment(format!(
            "block {l} used {} times, expected {b}",
            count[l]
        )));
    }
    Ok(())
}

/// One standard normal deviate by the Box-Muller transform.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    gaussian_pair(rng).0
}

/// Two independent standard normal deviates by the Box-Muller transform.
pub fn gaussian_pair<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    // 1 - U lies in (0, 1], keeping the log finite
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
    (r * c, r * s)
}

/// Circularly symmetric complex Gaussian with variance `var` per dimension.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let (a, b) = gaussian_pair(rng);
    let s = var.sqrt();
    Complex64::new(a * s, b * s)
}

/// Fading gains of one frame and the time-to-block map.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub n: usize,
    pub m: usize,
    /// `L * n * m` gains, indexed `[l][i][s]`.
    pub gains: Vec<Complex64>,
    /// Block index for each de-interleaved time.
    pub assignment: Vec<usize>,
}

impl ChannelRealization {
    pub fn blocks(&self) -> usize {
        self.gains.len() / (self.n * self.m)
    }

    /// Gain from transmit antenna `i` to receive antenna `s` in block `l`.
    #[inline]
    pub fn gain(&self, l: usize, i: usize, s: usize) -> Complex64 {
        self.gains[(l * self.n + i) * self.m + s]
    }

    /// The `n * m` gains seen at time `t`, indexed `[i][s]`.
    #[inline]
    pub fn gains_at(&self, t: usize) -> &[Complex64] {
        let l = self.assignment[t];
        let nm = self.n * self.m;
        &self.gains[l * nm..(l + 1) * nm]
    }
}

/// Draws `L n m` independent unit-power Rayleigh gains.
pub fn sample_channel<R: Rng + ?Sized>(cfg: &ChannelConfig, rng: &mut R) -> Result<ChannelRealization> {
    cfg.validate()?;
    let mut r = ChannelRealization {
        n: cfg.n,
        m: cfg.m,
        gains: Vec::new(),
        assignment: assign_blocks(cfg.frame_len, cfg.blocks)?,
    };
    resample_gains(&mut r, cfg.blocks, rng);
    Ok(r)
}

/// Refills the gains of an existing realization in place.
pub fn resample_gains<R: Rng + ?Sized>(r: &mut ChannelRealization, blocks: usize, rng: &mut R) {
    r.gains.clear();
    r.gains
        .extend((0..blocks * r.n * r.m).map(|_| complex_gaussian(rng, 0.5)));
}

/// Samples received at the `m` antennas for each of the `N` times.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedFrame {
    pub m: usize,
    /// `N * m` samples indexed `[t][s]`.
    pub samples: Vec<Complex64>,
}

impl ReceivedFrame {
    pub fn len(&self) -> usize {
        self.samples.len() / self.m
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn at(&self, t: usize) -> &[Complex64] {
        &self.samples[t * self.m..(t + 1) * self.m]
    }
}

/// `r_s = sqrt(Es) sum_i h_is c_i + noise` with `Es = 1`.
pub fn transmit<R: Rng + ?Sized>(
    codeword: &[SuperSymbol],
    real: &ChannelRealization,
    cfg: &ChannelConfig,
    rng: &mut R,
) -> Result<ReceivedFrame> {
    if codeword.len() != real.assignment.len() {
        return Err(Error::LengthMismatch {
            expected: real.assignment.len(),
            got: codeword.len(),
        });
    }
    let mut samples = Vec::with_capacity(codeword.len() * cfg.m);
    let noisy = cfg.es_n0.is_finite();
    let var = cfg.noise_variance();
    for (t, c) in codeword.iter().enumerate() {
        if c.len() != real.n {
            return Err(Error::Dimension(format!(
                "super-symbol has {} components, channel has {} transmit antennas",
                c.len(),
                real.n
            )));
        }
        let g = real.gains_at(t);
        for s in 0..real.m {
            let mut r: Complex64 = (0..real.n).map(|i| g[i * real.m + s] * c.symbols[i]).sum();
            if noisy {
                r += complex_gaussian(rng, var);
            }
            samples.push(r);
        }
    }
    Ok(ReceivedFrame { m: real.m, samples })
}

/// `Es/N0 = (Eb/N0) h R` with `R = k / (n h)`.
///
/// With `tail_correction` the rate is scaled by `(N - mu + 1) / N`.
pub fn ebn0_to_esn0(
    ebn0: f64,
    k: usize,
    n: usize,
    h: usize,
    mu: usize,
    frame_len: usize,
    tail_correction: bool,
) -> f64 {
    let mut rate = k as f64 / (n * h) as f64;
    if tail_correction {
        rate *= (frame_len + 1 - mu) as f64 / frame_len as f64;
    }
    ebn0 * h as f64 * rate
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
