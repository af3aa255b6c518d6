//! Convolutional generator sets and their octal notation.
//!
//! A generator is a tap mask over the encoder's single `k * mu` bit shift
//! register. Bit `k * mu - 1` (the mask MSB) is the newest register cell.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The `n * h` tap masks of a pragmatic encoder.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorSet {
    taps: Vec<u64>,
    width: u32,
}

impl GeneratorSet {
    /// Builds a set from raw tap masks over a `width` bit register.
    pub fn from_taps(taps: Vec<u64>, width: u32) -> Result<Self> {
        if width == 0 || width > 63 {
            return Err(Error::InvalidConfig(format!(
                "register width {width} outside 1..=63"
            )));
        }
        if taps.is_empty() {
            return Err(Error::EmptyGenerator);
        }
        for &t in &taps {
            let bits = 64 - t.leading_zeros();
            if bits > width {
                return Err(Error::GeneratorTooWide {
                    generator: format!("{t:o}"),
                    bits,
                    width,
                });
            }
        }
        Ok(Self { taps, width })
    }

    pub fn taps(&self) -> &[u64] {
        &self.taps
    }

    /// Register length `k * mu` in bits.
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// Octal digits per generator in canonical form.
    pub fn digits(&self) -> usize {
        self.width.div_ceil(3) as usize
    }

    /// Canonical octal strings, zero padded to a common width.
    pub fn octal(&self) -> Vec<String> {
        let d = self.digits();
        self.taps.iter().map(|t| format!("{t:0d$o}")).collect()
    }

    /// Tap vector of generator `j` as bits, newest register cell first.
    pub fn tap_bits(&self, j: usize) -> Vec<u8> {
        let t = self.taps[j];
        (0..self.width)
            .rev()
            .map(|b| ((t >> b) & 1) as u8)
            .collect()
    }
}

impl fmt::Display for GeneratorSet {
    /// Renders as `(g1,g2,...)_8`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})_8", self.octal().join(","))
    }
}

/// Parses octal generator strings for an encoder with `k` inputs and
/// constraint length `mu`.
pub fn parse_generators<S: AsRef<str>>(octal: &[S], k: usize, mu: usize) -> Result<GeneratorSet> {
    let width = (k * mu) as u32;
    let mut taps = Vec::with_capacity(octal.len());
    for s in octal {
        let s = s.as_ref().trim();
        if s.is_empty() {
            return Err(Error::EmptyGenerator);
        }
        let mut v: u64 = 0;
        for c in s.chars() {
            let d = c.to_digit(8).ok_or_else(|| Error::InvalidOctal {
                generator: s.to_string(),
                digit: c,
            })?;
            v = v
                .checked_mul(8)
                .and_then(|x| x.checked_add(d as u64))
                .ok_or_else(|| Error::GeneratorTooWide {
                    generator: s.to_string(),
                    bits: 64,
                    width,
                })?;
        }
        let bits = 64 - v.leading_zeros();
        if bits > width {
            return Err(Error::GeneratorTooWide {
                generator: s.to_string(),
                bits,
                width,
            });
        }
        taps.push(v);
    }
    GeneratorSet::from_taps(taps, width)
}

/// Splits a list such as `(06,13,11,16)_8`, `06,13,11,16` or `06 13 11 16`
/// into its generator strings.
pub fn split_generator_list(s: &str) -> Vec<String> {
    let s = s.trim();
    let s = s.strip_suffix("_8").unwrap_or(s);
    let s = s.trim_start_matches('(').trim_end_matches(')');
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|p| !p.is_empty())
        .map(str::to_string)
        .collect()
}

/// Parses the list form accepted by [`split_generator_list`].
pub fn parse_generator_list(s: &str, k: usize, mu: usize) -> Result<GeneratorSet> {
    parse_generators(&split_generator_list(s), k, mu)
}

/// Parses `(g1,...)_8` using the width implied by the longest string.
impl FromStr for GeneratorSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts = split_generator_list(s);
        if parts.is_empty() {
            return Err(Error::EmptyGenerator);
        }
        let digits = parts.iter().map(|p| p.len()).max().unwrap_or(1);
        let set = parse_generators(&parts, 1, 3 * digits)?;
        Ok(set)
    }
}
