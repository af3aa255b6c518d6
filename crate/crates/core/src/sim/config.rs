//! Experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::catastrophic::is_catastrophic;
use crate::channel::{db_to_linear, ebn0_to_esn0, ChannelConfig};
use crate::error::{Error, Result};
use crate::generators::{parse_generator_list, GeneratorSet};
use crate::gtf::{GtfMode, TruncationPolicy, DEFAULT_DELTA_P, DEFAULT_TERM_CAP};
use crate::trellis::EncoderConfig;

/// Smallest `min_errors` accepted unless low confidence is allowed.
pub const MIN_ERRORS_FLOOR: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopRule {
    pub min_errors: u64,
    pub max_frames: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_errors: 200,
            max_frames: 5_000_000,
        }
    }
}

/// Reference mode of the transfer-function analysis.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceMode {
    #[default]
    AllCodewords,
    FixedZero,
}

/// Truncation used for the analytic bound curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundSpec {
    /// `None` uses `2 d_f + 1`.
    pub delta_h: Option<u32>,
    pub delta_p: Option<f64>,
    pub reference: ReferenceMode,
    pub term_cap: usize,
}

impl Default for BoundSpec {
    fn default() -> Self {
        Self {
            delta_h: None,
            delta_p: Some(DEFAULT_DELTA_P),
            reference: ReferenceMode::AllCodewords,
            term_cap: DEFAULT_TERM_CAP,
        }
    }
}

impl BoundSpec {
    pub fn policy(&self, d_f: u32) -> TruncationPolicy {
        TruncationPolicy {
            delta_h: Some(self.delta_h.unwrap_or(2 * d_f + 1)),
            delta_p: self.delta_p,
            term_cap: self.term_cap,
            ..TruncationPolicy::default()
        }
    }

    pub fn mode(&self) -> GtfMode {
        match self.reference {
            ReferenceMode::AllCodewords => GtfMode::time0(),
            ReferenceMode::FixedZero => GtfMode::fixed_zero(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
}

fn default_seed() -> u64 {
    1
}

fn default_true() -> bool {
    true
}

fn default_batch() -> u64 {
    4096
}

/// A complete Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Octal generators, e.g. `"06,13,11,16"`.
    pub generators: String,
    pub n: usize,
    pub k: usize,
    pub h: usize,
    pub mu: usize,
    #[serde(rename = "N")]
    pub frame_len: usize,
    #[serde(rename = "L")]
    pub blocks: usize,
    /// Block length; when given it must equal `N / L`.
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub block_len: Option<usize>,
    pub m: usize,
    pub ebn0_db: Vec<f64>,
    #[serde(default)]
    pub stop: StopRule,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_true")]
    pub zero_tail: bool,
    /// Scale the rate by `(N - mu + 1) / N` when converting `Eb/N0`.
    #[serde(default)]
    pub tail_correction: bool,
    /// Transmit without noise; every SNR point then has `Es/N0 = inf`.
    #[serde(default)]
    pub noiseless: bool,
    /// Permit `min_errors` below the confidence floor.
    #[serde(default)]
    pub allow_low_confidence: bool,
    /// Frames per deterministic batch.
    #[serde(default = "default_batch")]
    pub batch_frames: u64,
    #[serde(default)]
    pub bound: Option<BoundSpec>,
    #[serde(default)]
    pub output: OutputPaths,
}

impl ExperimentConfig {
    pub fn new(generators: &str, n: usize, k: usize, h: usize, mu: usize, frame_len: usize, blocks: usize, m: usize) -> Self {
        Self {
            generators: generators.to_string(),
            n,
            k,
            h,
            mu,
            frame_len,
            blocks,
            block_len: None,
            m,
            ebn0_db: Vec::new(),
            stop: StopRule::default(),
            seed: default_seed(),
            zero_tail: true,
            tail_correction: false,
            noiseless: false,
            allow_low_confidence: false,
            batch_frames: default_batch(),
            bound: None,
            output: OutputPaths::default(),
        }
    }

    /// Reads a JSON config; a missing file is reported as "config not found".
    pub fn from_path(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::Config(format!("config not found: {}", path.display())));
        }
        let text = std::fs::read_to_string(path)?;
        let cfg: Self = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn encoder(&self) -> EncoderConfig {
        let mut e = EncoderConfig::new(self.n, self.m, self.k, self.h, self.mu, self.frame_len);
        e.zero_tail = self.zero_tail;
        e
    }

    pub fn generator_set(&self) -> Result<GeneratorSet> {
        parse_generator_list(&self.generators, self.k, self.mu)
    }

    /// Linear `Es/N0` for a sweep point.
    pub fn es_n0(&self, ebn0_db: f64) -> f64 {
        if self.noiseless {
            return f64::INFINITY;
        }
        ebn0_to_esn0(
            db_to_linear(ebn0_db),
            self.k,
            self.n,
            self.h,
            self.mu,
            self.frame_len,
            self.tail_correction,
        )
    }

    pub fn channel(&self, ebn0_db: f64) -> ChannelConfig {
        ChannelConfig {
            n: self.n,
            m: self.m,
            blocks: self.blocks,
            frame_len: self.frame_len,
            es_n0: self.es_n0(ebn0_db),
            seed: self.seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let enc = self.encoder();
        enc.check_generators(&self.generator_set()?)?;
        if self.ebn0_db.is_empty() {
            return Err(Error::Config("the SNR sweep is empty".into()));
        }
        if self.ebn0_db.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("SNR values must be finite".into()));
        }
        if self.blocks == 0 || self.frame_len % self.blocks != 0 {
            return Err(Error::BlocksDoNotDivide {
                frame_len: self.frame_len,
                blocks: self.blocks,
            });
        }
        if let Some(b) = self.block_len {
            if b * self.blocks != self.frame_len {
                return Err(Error::Config(format!(
                    "B = {b} and L = {} do not multiply to N = {}",
                    self.blocks, self.frame_len
                )));
            }
        }
        if self.stop.min_errors == 0 || self.stop.max_frames == 0 {
            return Err(Error::Config("stop rule counts must be positive".into()));
        }
        if self.stop.min_errors < MIN_ERRORS_FLOOR && !self.allow_low_confidence {
            return Err(Error::Config(format!(
                "min_errors = {} is below {MIN_ERRORS_FLOOR}; set allow_low_confidence to accept it",
                self.stop.min_errors
            )));
        }
        if self.batch_frames == 0 {
            return Err(Error::Config("batch_frames must be positive".into()));
        }
        if is_catastrophic(&self.generator_set()?, &enc)? {
            return Err(Error::Catastrophic);
        }
        Ok(())
    }
}
