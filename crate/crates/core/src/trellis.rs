//! Encoder configuration and the code trellis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::GeneratorSet;
use crate::modulation::SuperSymbol;

/// Parameters of a rate `k/(n h)` pragmatic space-time encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderConfig {
    /// Transmit antennas.
    pub n: usize,
    /// Receive antennas.
    pub m: usize,
    /// Input bits per trellis step.
    pub k: usize,
    /// Bits per modulation symbol: 1 for BPSK, 2 for QPSK.
    pub h: usize,
    /// Constraint length.
    pub mu: usize,
    /// Super-symbols per frame.
    #[serde(rename = "N")]
    pub frame_len: usize,
    pub zero_tail: bool,
}

impl EncoderConfig {
    pub fn new(n: usize, m: usize, k: usize, h: usize, mu: usize, frame_len: usize) -> Self {
        Self {
            n,
            m,
            k,
            h,
            mu,
            frame_len,
            zero_tail: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 || self.k == 0 {
            return Err(Error::InvalidConfig("n, m and k must be at least 1".into()));
        }
        if self.h != 1 && self.h != 2 {
            return Err(Error::UnsupportedModulation(self.h));
        }
        if self.mu < 2 {
            return Err(Error::InvalidConfig(format!("mu = {} < 2", self.mu)));
        }
        if self.frame_len < self.mu {
            return Err(Error::InvalidConfig(format!(
                "frame length {} shorter than mu = {}",
                self.frame_len, self.mu
            )));
        }
        if self.k * (self.mu - 1) > 24 {
            return Err(Error::InvalidConfig(format!(
                "2^{} states is beyond the supported range",
                self.k * (self.mu - 1)
            )));
        }
        if self.n * self.h > 32 {
            return Err(Error::InvalidConfig("more than 32 coded bits per step".into()));
        }
        Ok(())
    }

    pub fn state_bits(&self) -> usize {
        self.k * (self.mu - 1)
    }

    pub fn num_states(&self) -> usize {
        1 << self.state_bits()
    }

    /// Number of generators, `n * h`.
    pub fn num_generators(&self) -> usize {
        self.n * self.h
    }

    /// Steps that carry information: `N - mu + 1` when zero tailed.
    pub fn info_steps(&self) -> usize {
        if self.zero_tail {
            self.frame_len - self.mu + 1
        } else {
            self.frame_len
        }
    }

    pub fn info_bits(&self) -> usize {
        self.k * self.info_steps()
    }

    /// Code rate `k / (n h)`.
    pub fn rate(&self) -> f64 {
        self.k as f64 / (self.n * self.h) as f64
    }

    /// Checks that `g` fits this configuration.
    pub fn check_generators(&self, g: &GeneratorSet) -> Result<()> {
        self.validate()?;
        if g.len() != self.num_generators() {
            return Err(Error::GeneratorCount {
                expected: self.num_generators(),
                got: g.len(),
            });
        }
        if g.width() as usize != self.k * self.mu {
            return Err(Error::InvalidConfig(format!(
                "generator register width {} differs from k*mu = {}",
                g.width(),
                self.k * self.mu
            )));
        }
        Ok(())
    }
}

/// Fully tabulated encoder trellis.
///
/// Edges are indexed by `state << k | input`. The shift register holds
/// `(input << k(mu-1)) | state`; its top `k(mu-1)` bits become the next
/// state, so the newest input occupies the most significant cells.
#[derive(Debug, Clone)]
pub struct Trellis {
    pub n: usize,
    pub k: usize,
    pub h: usize,
    pub mu: usize,
    num_states: usize,
    next: Vec<u32>,
    output: Vec<u32>,
    labels: Vec<SuperSymbol>,
    preds: Vec<Vec<(u32, u32)>>,
}

impl Trellis {
    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_inputs(&self) -> usize {
        1 << self.k
    }

    pub fn num_words(&self) -> usize {
        1 << (self.n * self.h)
    }

    #[inline]
    pub fn next_state(&self, state: usize, input: usize) -> usize {
        self.next[(state << self.k) | input] as usize
    }

    /// Coded output word; bit `j` is the output of generator `j`.
    #[inline]
    pub fn output_word(&self, state: usize, input: usize) -> u32 {
        self.output[(state << self.k) | input]
    }

    pub fn label(&self, state: usize, input: usize) -> &SuperSymbol {
        &self.labels[(state << self.k) | input]
    }

    /// Incoming edges of `state` as `(predecessor, input)`, ordered by
    /// input word then predecessor index.
    pub fn predecessors(&self, state: usize) -> &[(u32, u32)] {
        &self.preds[state]
    }
}

/// Tabulates the trellis of the encoder defined by `gens`.
pub fn build_trellis(gens: &GeneratorSet, cfg: &EncoderConfig) -> Result<Trellis> {
    cfg.check_generators(gens)?;
    let k = cfg.k;
    let sb = cfg.state_bits();
    let ns = cfg.num_states();
    let ni = 1usize << k;
    let mut next = vec![0u32; ns * ni];
    let mut output = vec![0u32; ns * ni];
    let mut labels = Vec::with_capacity(ns * ni);
    let mut preds = vec![Vec::with_capacity(ni); ns];
    for s in 0..ns {
        for u in 0..ni {
            let reg = ((u as u64) << sb) | s as u64;
            let ns_ = (reg >> k) as u32;
            let mut word = 0u32;
            for (j, &g) in gens.taps().iter().enumerate() {
                word |= ((g & reg).count_ones() & 1) << j;
            }
            next[(s << k) | u] = ns_;
            output[(s << k) | u] = word;
            labels.push(SuperSymbol::from_word(word, cfg.n, cfg.h));
            preds[ns_ as usize].push((s as u32, u as u32));
        }
    }
    for p in &mut preds {
        p.sort_by_key(|&(s, u)| (u, s));
    }
    Ok(Trellis {
        n: cfg.n,
        k,
        h: cfg.h,
        mu: cfg.mu,
        num_states: ns,
        next,
        output,
        labels,
        preds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::parse_generators;

    fn bpsk(gens: &[&str], mu: usize) -> Trellis {
        let cfg = EncoderConfig::new(2, 1, 1, 1, mu, 16);
        build_trellis(&parse_generators(gens, 1, mu).unwrap(), &cfg).unwrap()
    }

    #[test]
    fn five_seven_labels() {
        let t = bpsk(&["5", "7"], 3);
        assert_eq!(t.num_states(), 4);
        // state bits: MSB is the most recent input
        let lab = |s: usize, u: usize| {
            let l = t.label(s, u);
            (l.symbols[0].re as i32, l.symbols[1].re as i32)
        };
        assert_eq!(lab(0, 0), (-1, -1));
        assert_eq!(lab(0, 1), (1, 1));
        assert_eq!(t.next_state(0, 1), 2);
        assert_eq!(lab(2, 0), (-1, 1));
        assert_eq!(lab(2, 1), (1, -1));
        assert_eq!(lab(1, 0), (1, 1));
        assert_eq!(lab(1, 1), (-1, -1));
        assert_eq!(lab(3, 0), (1, -1));
        assert_eq!(lab(3, 1), (-1, 1));
    }

    #[test]
    fn one_three_two_states() {
        let t = bpsk(&["1", "3"], 2);
        assert_eq!(t.num_states(), 2);
        assert_eq!(t.output_word(0, 0), 0b00);
        assert_eq!(t.output_word(0, 1), 0b10);
        assert_eq!(t.output_word(1, 0), 0b11);
        assert_eq!(t.output_word(1, 1), 0b01);
    }

    #[test]
    fn qpsk_four_state() {
        let cfg = EncoderConfig::new(2, 2, 2, 2, 2, 130);
        let g = parse_generators(&["06", "13", "11", "16"], 2, 2).unwrap();
        let t = build_trellis(&g, &cfg).unwrap();
        assert_eq!(t.num_states(), 4);
        assert_eq!(t.num_inputs(), 4);
        for s in 0..4 {
            assert_eq!(t.predecessors(s).len(), 4);
        }
    }

    #[test]
    fn generator_count_checked() {
        let cfg = EncoderConfig::new(2, 1, 1, 2, 3, 16);
        let g = parse_generators(&["5", "7"], 1, 3).unwrap();
        assert!(matches!(
            build_trellis(&g, &cfg),
            Err(Error::GeneratorCount { expected: 4, got: 2 })
        ));
    }

    #[test]
    fn config_validation() {
        let mut c = EncoderConfig::new(2, 1, 1, 1, 3, 16);
        assert!(c.validate().is_ok());
        c.h = 3;
        assert!(c.validate().is_err());
        c.h = 1;
        c.mu = 1;
        assert!(c.validate().is_err());
        c.mu = 20;
        assert!(c.validate().is_err());
    }
}
