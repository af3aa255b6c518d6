//! Maximum-likelihood sequence decoding with the space-time branch metric.

use num_complex::Complex64;

use crate::channel::{ChannelRealization, ReceivedFrame};
use crate::encoder::unpack_word;
use crate::error::{Error, Result};
use crate::modulation::SuperSymbol;
use crate::trellis::{EncoderConfig, Trellis};

/// Decoded information bits and the winning path metric.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub info_bits: Vec<u8>,
    pub path_metric: f64,
}

/// `sum_s |r_s - sqrt(es) sum_i h_is c_i|^2`.
///
/// `gains` holds the `n * m` gains at this time, indexed `[i][s]`.
pub fn branch_metric(received: &[Complex64], gains: &[Complex64], label: &SuperSymbol, es: f64) -> f64 {
    let m = received.len();
    let a = es.sqrt();
    received
        .iter()
        .enumerate()
        .map(|(s, &r)| {
            let y: Complex64 = label
                .symbols
                .iter()
                .enumerate()
                .map(|(i, &c)| gains[i * m + s] * c)
                .sum();
            (r - y * a).norm_sqr()
        })
        .sum()
}

/// Reusable decoder; holds scratch buffers sized for one trellis.
#[derive(Debug, Clone)]
pub struct Decoder<'a> {
    trellis: &'a Trellis,
    words: Vec<SuperSymbol>,
    expected: Vec<Complex64>,
    metric: Vec<f64>,
    next_metric: Vec<f64>,
    word_metric: Vec<f64>,
    decisions: Vec<u8>,
}

impl<'a> Decoder<'a> {
    pub fn new(trellis: &'a Trellis) -> Self {
        let words = (0..trellis.num_words() as u32)
            .map(|w| SuperSymbol::from_word(w, trellis.n, trellis.h))
            .collect();
        Self {
            trellis,
            words,
            expected: Vec::new(),
            metric: Vec::new(),
            next_metric: Vec::new(),
            word_metric: Vec::new(),
            decisions: Vec::new(),
        }
    }

    /// Decodes one frame; the returned path is ML under the branch metric.
    pub fn decode(
        &mut self,
        frame: &ReceivedFrame,
        real: &ChannelRealization,
        cfg: &EncoderConfig,
        es: f64,
    ) -> Result<DecodeResult> {
        let t_len = frame.len();
        let tr = self.trellis;
        if t_len != cfg.frame_len || real.assignment.len() != t_len {
            return Err(Error::Dimension(format!(
                "frame length {t_len}, assignment length {}, config N = {}",
                real.assignment.len(),
                cfg.frame_len
            )));
        }
        if real.n != tr.n || real.m != frame.m {
            return Err(Error::Dimension(format!(
                "channel is {}x{}, trellis has n = {} and frame has m = {}",
                real.n, real.m, tr.n, frame.m
            )));
        }
        let m = frame.m;
        let nw = tr.num_words();
        let ns = tr.num_states();
        let a = es.sqrt();

        // noiseless prediction per block and output word
        let blocks = real.blocks();
        self.expected.clear();
        for l in 0..blocks {
            for w in &self.words {
                for s in 0..m {
                    let y: Complex64 = w
                        .symbols
                        .iter()
                        .enumerate()
                        .map(|(i, &c)| real.gain(l, i, s) * c)
                        .sum();
                    self.expected.push(y * a);
                }
            }
        }

        self.metric.clear();
        self.metric.resize(ns, f64::INFINITY);
        self.metric[0] = 0.0;
        self.next_metric.resize(ns, 0.0);
        self.word_metric.resize(nw, 0.0);
        self.decisions.clear();
        self.decisions.resize(t_len * ns, u8::MAX);
        let tail_from = if cfg.zero_tail { cfg.info_steps() } else { t_len };

        for t in 0..t_len {
            let r = frame.at(t);
            let base = real.assignment[t] * nw * m;
            for (w, wm) in self.word_metric.iter_mut().enumerate() {
                let e = &self.expected[base + w * m..base + (w + 1) * m];
                *wm = r.iter().zip(e).map(|(&x, &y)| (x - y).norm_sqr()).sum();
            }
            let tail = t >= tail_from;
            for j in 0..ns {
                let mut best = f64::INFINITY;
                let mut arg = u8::MAX;
                for (p, &(s, u)) in tr.predecessors(j).iter().enumerate() {
                    if tail && u != 0 {
                        continue;
                    }
                    let cand = self.metric[s as usize]
                        + self.word_metric[tr.output_word(s as usize, u as usize) as usize];
                    if cand < best {
                        best = cand;
                        arg = p as u8;
                    }
                }
                self.next_metric[j] = best;
                self.decisions[t * ns + j] = arg;
            }
            std::mem::swap(&mut self.metric, &mut self.next_metric);
        }

        let mut state = if cfg.zero_tail {
            0
        } else {
            let mut b = 0;
            for s in 1..ns {
                if self.metric[s] < self.metric[b] {
                    b = s;
                }
            }
            b
        };
        let path_metric = self.metric[state];
        let mut inputs = vec![0usize; t_len];
        for t in (0..t_len).rev() {
            let p = self.decisions[t * ns + state];
            if p == u8::MAX {
                return Err(Error::Dimension("no surviving path".into()));
            }
            let (s, u) = tr.predecessors(state)[p as usize];
            inputs[t] = u as usize;
            state = s as usize;
        }
        let mut info_bits = Vec::with_capacity(cfg.info_bits());
        for &u in &inputs[..cfg.info_steps()] {
            unpack_word(u, cfg.k, &mut info_bits);
        }
        Ok(DecodeResult {
            info_bits,
            path_metric,
        })
    }
}

/// Decodes one frame with `Es = 1`.
pub fn decode(
    frame: &ReceivedFrame,
    real: &ChannelRealization,
    trellis: &Trellis,
    cfg: &EncoderConfig,
) -> Result<DecodeResult> {
    Decoder::new(trellis).decode(frame, real, cfg, 1.0)
}
