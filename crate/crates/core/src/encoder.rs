//! Frame encoding.

use crate::error::{Error, Result};
use crate::generators::GeneratorSet;
use crate::modulation::SuperSymbol;
use crate::trellis::{build_trellis, EncoderConfig, Trellis};

/// Packs `k` bits into an input word, first bit most significant.
pub fn pack_word(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | (b & 1) as usize)
}

/// Inverse of [`pack_word`].
pub fn unpack_word(word: usize, k: usize, out: &mut Vec<u8>) {
    for j in (0..k).rev() {
        out.push(((word >> j) & 1) as u8);
    }
}

/// Input words for a whole frame, including the zero tail when enabled.
pub fn input_words(info_bits: &[u8], cfg: &EncoderConfig) -> Result<Vec<usize>> {
    let expected = cfg.info_bits();
    if info_bits.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            got: info_bits.len(),
        });
    }
    let mut words: Vec<usize> = info_bits.chunks(cfg.k).map(pack_word).collect();
    words.resize(cfg.frame_len, 0);
    Ok(words)
}

/// Runs the trellis from the zero state; returns the visited edges as
/// `(state, input)` pairs, one per step.
pub fn trace_path(trellis: &Trellis, words: &[usize]) -> Vec<(usize, usize)> {
    let mut s = 0;
    words
        .iter()
        .map(|&u| {
            let e = (s, u);
            s = trellis.next_state(s, u);
            e
        })
        .collect()
}

/// Coded output words of a frame.
pub fn encode_words(info_bits: &[u8], trellis: &Trellis, cfg: &EncoderConfig) -> Result<Vec<u32>> {
    let words = input_words(info_bits, cfg)?;
    Ok(trace_path(trellis, &words)
        .into_iter()
        .map(|(s, u)| trellis.output_word(s, u))
        .collect())
}

/// Encodes a frame with a prebuilt trellis.
pub fn encode_with(info_bits: &[u8], trellis: &Trellis, cfg: &EncoderConfig) -> Result<Vec<SuperSymbol>> {
    let words = input_words(info_bits, cfg)?;
    Ok(trace_path(trellis, &words)
        .into_iter()
        .map(|(s, u)| trellis.label(s, u).clone())
        .collect())
}

/// Encodes `k(N - mu + 1)` information bits (or `kN` without a tail) into
/// `N` super-symbols.
pub fn encode_frame(info_bits: &[u8], gens: &GeneratorSet, cfg: &EncoderConfig) -> Result<Vec<SuperSymbol>> {
    let t = build_trellis(gens, cfg)?;
    encode_with(info_bits, &t, cfg)
}

/// State reached after encoding the whole frame.
pub fn final_state(info_bits: &[u8], trellis: &Trellis, cfg: &EncoderConfig) -> Result<usize> {
    let words = input_words(info_bits, cfg)?;
    Ok(words.iter().fold(0, |s, &u| trellis.next_state(s, u)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::parse_generators;

    #[test]
    fn all_zero_input_maps_to_minus_one() {
        let cfg = EncoderConfig::new(2, 1, 1, 1, 3, 10);
        let g = parse_generators(&["5", "7"], 1, 3).unwrap();
        let out = encode_frame(&vec![0; cfg.info_bits()], &g, &cfg).unwrap();
        assert_eq!(out.len(), 10);
        for s in out {
            for c in s.symbols {
                assert_eq!(c.re, -1.0);
                assert_eq!(c.im, 0.0);
            }
        }
    }

    #[test]
    fn one_three_single_one() {
        let cfg = EncoderConfig::new(2, 1, 1, 1, 2, 4);
        let g = parse_generators(&["1", "3"], 1, 2).unwrap();
        let out = encode_frame(&[1, 0, 0], &g, &cfg).unwrap();
        let re: Vec<(f64, f64)> = out.iter().map(|s| (s.symbols[0].re, s.symbols[1].re)).collect();
        assert_eq!(re, vec![(-1.0, 1.0), (1.0, 1.0), (-1.0, -1.0), (-1.0, -1.0)]);
    }

    #[test]
    fn length_checked() {
        let cfg = EncoderConfig::new(2, 1, 1, 1, 3, 10);
        let g = parse_generators(&["5", "7"], 1, 3).unwrap();
        assert_eq!(
            encode_frame(&[0; 3], &g, &cfg).unwrap_err(),
            Error::LengthMismatch { expected: 8, got: 3 }
        );
    }

    #[test]
    fn word_packing_roundtrip() {
        let mut v = Vec::new();
        unpack_word(pack_word(&[1, 0, 1]), 3, &mut v);
        assert_eq!(v, vec![1, 0, 1]);
    }
}
