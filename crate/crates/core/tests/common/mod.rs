//! Brute-force references shared by the oracle and acceptance suites.
#![allow(dead_code)]

use std::collections::HashMap;

use pstc_core::channel::{ChannelRealization, ReceivedFrame};
use pstc_core::encoder::encode_words;
use pstc_core::generators::GeneratorSet;
use pstc_core::gtf::{Dyadic, MatrixExponentPolynomial, TermKey};
use pstc_core::modulation::SuperSymbol;
use pstc_core::pep::HermitianAccumulator;
use pstc_core::trellis::{EncoderConfig, Trellis};
use pstc_core::viterbi::branch_metric;

/// Every information sequence of the frame, in counting order.
pub fn all_messages(cfg: &EncoderConfig) -> Vec<Vec<u8>> {
    let len = cfg.info_bits();
    (0..1u64 << len)
        .map(|x| (0..len).map(|i| ((x >> i) & 1) as u8).collect())
        .collect()
}

/// Exponent of the pair `(c, g)`: per-block `F` matrices and bit distance.
pub fn pair_key(wc: &[u32], wg: &[u32], n: usize, h: usize, assignment: &[usize], blocks: usize) -> TermKey {
    let mut f = vec![HermitianAccumulator::zeros(n); blocks];
    let mut hw = 0;
    for t in 0..wc.len() {
        f[assignment[t]].add_words(wc[t], wg[t], h);
        hw += (wc[t] ^ wg[t]).count_ones();
    }
    let mut key = TermKey::zero(n, blocks);
    for (l, x) in f.iter().enumerate() {
        key.blocks[l * n * n..(l + 1) * n * n].copy_from_slice(x.packed());
    }
    key.hw = hw;
    key
}

/// Sum over all ordered pairs `c != g` of `2^-K D^F(c, g)`, without the
/// constant term.
pub fn all_pairs_polynomial(t: &Trellis, cfg: &EncoderConfig, assignment: &[usize]) -> MatrixExponentPolynomial {
    let blocks = assignment.iter().max().unwrap() + 1;
    let words: Vec<Vec<u32>> = all_messages(cfg)
        .iter()
        .map(|b| encode_words(b, t, cfg).unwrap())
        .collect();
    let mut counts: HashMap<TermKey, u128> = HashMap::new();
    for (i, wc) in words.iter().enumerate() {
        for (j, wg) in words.iter().enumerate() {
            if i != j {
                *counts.entry(pair_key(wc, wg, cfg.n, cfg.h, assignment, blocks)).or_default() += 1;
            }
        }
    }
    let mut p = MatrixExponentPolynomial::new(cfg.n, blocks);
    for (k, c) in counts.into_iter().filter(|(k, _)| !k.is_constant()) {
        p.add_term(k, Dyadic::new(c, cfg.info_bits() as u32)).unwrap();
    }
    p
}

/// Sum over `g != c` of `D^F(c, g)` for one transmitted message, without
/// the constant term.
pub fn fixed_reference_polynomial(t: &Trellis, cfg: &EncoderConfig, assignment: &[usize], c: &[u8]) -> MatrixExponentPolynomial {
    let blocks = assignment.iter().max().unwrap() + 1;
    let wc = encode_words(c, t, cfg).unwrap();
    let mut p = MatrixExponentPolynomial::new(cfg.n, blocks);
    for b in all_messages(cfg) {
        if b != c {
            let wg = encode_words(&b, t, cfg).unwrap();
            let k = pair_key(&wc, &wg, cfg.n, cfg.h, assignment, blocks);
            if !k.is_constant() {
                p.add_term(k, Dyadic::ONE).unwrap();
            }
        }
    }
    p
}

/// Exhaustive maximum-likelihood search over precomputed codewords: the
/// smallest metric, the runner-up and the index of the winner.
pub fn ml_decode(words: &[Vec<SuperSymbol>], rx: &ReceivedFrame, real: &ChannelRealization) -> (f64, f64, usize) {
    let mut best = (f64::INFINITY, f64::INFINITY, 0);
    for (i, cw) in words.iter().enumerate() {
        let m: f64 = (0..cw.len())
            .map(|t| branch_metric(rx.at(t), real.gains_at(t), &cw[t], 1.0))
            .sum();
        if m < best.0 {
            best = (m, best.0, i);
        } else if m < best.1 {
            best.1 = m;
        }
    }
    best
}

/// All generator pairs of a rate 1/2 BPSK code with `mu` taps each.
pub fn all_bpsk_pairs(mu: usize) -> Vec<GeneratorSet> {
    let w = mu as u32;
    let mut out = Vec::new();
    for a in 0..1u64 << w {
        for b in 0..1u64 << w {
            out.push(GeneratorSet::from_taps(vec![a, b], w).unwrap());
        }
    }
    out
}
