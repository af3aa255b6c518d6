//! Gray mapping of coded bits onto BPSK and QPSK symbols.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Maps `h` coded bits onto a unit-modulus symbol.
///
/// BPSK sends `2b - 1`; QPSK sends `((2a - 1) + j(2b - 1)) / sqrt(2)`.
pub fn map_symbol(bits: &[u8], h: usize) -> Result<Complex64> {
    if bits.len() != h {
        return Err(Error::LengthMismatch {
            expected: h,
            got: bits.len(),
        });
    }
    match h {
        1 => Ok(Complex64::new(antipodal(bits[0]), 0.0)),
        2 => Ok(Complex64::new(
            antipodal(bits[0]) * FRAC_1_SQRT_2,
            antipodal(bits[1]) * FRAC_1_SQRT_2,
        )),
        _ => Err(Error::UnsupportedModulation(h)),
    }
}

fn antipodal(b: u8) -> f64 {
    if b & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Integer lattice point of a symbol before the QPSK `1/sqrt(2)` scale:
/// BPSK `(2b - 1, 0)`, QPSK `(2a - 1, 2b - 1)`.
pub fn lattice_point(bits: u32, h: usize) -> (i32, i32) {
    let a = 2 * (bits & 1) as i32 - 1;
    if h == 1 {
        (a, 0)
    } else {
        let b = 2 * ((bits >> 1) & 1) as i32 - 1;
        (a, b)
    }
}

/// The `n` symbols sent simultaneously, one per transmit antenna.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperSymbol {
    pub symbols: SmallVec<[Complex64; 4]>,
}

impl SuperSymbol {
    pub fn new(symbols: &[Complex64]) -> Self {
        Self {
            symbols: SmallVec::from_slice(symbols),
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Maps an `n * h` bit output word. Bit `h*i` is the in-phase bit of
    /// antenna `i`, bit `h*i + 1` its quadrature bit.
    pub fn from_word(word: u32, n: usize, h: usize) -> Self {
        let scale = if h == 2 { FRAC_1_SQRT_2 } else { 1.0 };
        let symbols = (0..n)
            .map(|i| {
                let (re, im) = lattice_point(word >> (h * i), h);
                Complex64::new(re as f64 * scale, im as f64 * scale)
            })
            .collect();
        Self { symbols }
    }
}
