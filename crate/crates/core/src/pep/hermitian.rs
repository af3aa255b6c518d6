//! Exact Hermitian matrices with Gaussian-integer entries.

use std::fmt;

use num_complex::Complex64;
use smallvec::SmallVec;

use crate::modulation::lattice_point;

/// Packed storage: `n` real diagonal entries followed by `(re, im)` pairs
/// of the strict upper triangle in row-major order, `n * n` integers total.
pub type Packed = SmallVec<[i32; 16]>;

/// Index of the `re` part of entry `(p, q)`, `p < q`, inside packed storage.
#[inline]
pub fn upper_index(n: usize, p: usize, q: usize) -> usize {
    // pairs before row p: sum_{r<p} (n - 1 - r)
    let before = p * (2 * n - p - 1) / 2;
    n + 2 * (before + (q - p - 1))
}

/// Entry `(p, q)` of packed storage as `(re, im)`.
#[inline]
pub fn packed_entry(n: usize, data: &[i32], p: usize, q: usize) -> (i64, i64) {
    use std::cmp::Ordering::*;
    match p.cmp(&q) {
        Equal => (data[p] as i64, 0),
        Less => {
            let i = upper_index(n, p, q);
            (data[i] as i64, data[i + 1] as i64)
        }
        Greater => {
            let i = upper_index(n, q, p);
            (data[i] as i64, -(data[i + 1] as i64))
        }
    }
}

/// Adds `d d^H / scale` into packed storage.
#[inline]
pub fn add_outer_packed(n: usize, data: &mut [i32], d: &[(i32, i32)], scale: i32) {
    for p in 0..n {
        let (a, b) = d[p];
        data[p] += (a * a + b * b) / scale;
        for q in p + 1..n {
            let (c, e) = d[q];
            // (a + jb)(c - je)
            let i = upper_index(n, p, q);
            data[i] += (a * c + b * e) / scale;
            data[i + 1] += (b * c - a * e) / scale;
        }
    }
}

/// Lattice difference `c - g` of two coded output words, one Gaussian
/// integer per antenna. Components are in `{0, +-2}`.
pub fn word_difference(wc: u32, wg: u32, n: usize, h: usize) -> SmallVec<[(i32, i32); 4]> {
    (0..n)
        .map(|i| {
            let (a, b) = lattice_point(wc >> (h * i), h);
            let (c, d) = lattice_point(wg >> (h * i), h);
            (a - c, b - d)
        })
        .collect()
}

/// Outer-product scale so that `A = (c - g)(c - g)^H` holds for unit-energy
/// symbols: lattice points carry an extra `sqrt(2)` under QPSK.
pub fn lattice_scale(h: usize) -> i32 {
    if h == 2 {
        2
    } else {
        1
    }
}

/// An `n x n` Hermitian matrix with exact integer entries.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HermitianAccumulator {
    n: usize,
    data: Packed,
}

impl HermitianAccumulator {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: SmallVec::from_elem(0, n * n),
        }
    }

    /// Wraps packed storage; see [`Packed`].
    pub fn from_packed(n: usize, data: &[i32]) -> Self {
        assert_eq!(data.len(), n * n, "packed length must be n^2");
        Self {
            n,
            data: SmallVec::from_slice(data),
        }
    }

    /// Builds from a full matrix of `(re, im)` entries given row by row.
    /// Only the diagonal and upper triangle are read.
    pub fn from_rows(rows: &[Vec<(i32, i32)>]) -> Self {
        let n = rows.len();
        let mut h = Self::zeros(n);
        for p in 0..n {
            h.data[p] = rows[p][p].0;
            for q in p + 1..n {
                let i = upper_index(n, p, q);
                h.data[i] = rows[p][q].0;
                h.data[i + 1] = rows[p][q].1;
            }
        }
        h
    }

    /// Real symmetric matrix from its rows.
    pub fn from_real_rows(rows: &[&[i32]]) -> Self {
        let r: Vec<Vec<(i32, i32)>> = rows.iter().map(|row| row.iter().map(|&x| (x, 0)).collect()).collect();
        Self::from_rows(&r)
    }

    /// `A = (c - g)(c - g)^H` for the two coded words of one time instant.
    pub fn from_words(wc: u32, wg: u32, n: usize, h: usize) -> Self {
        let mut a = Self::zeros(n);
        a.add_words(wc, wg, h);
        a
    }

    pub fn add_words(&mut self, wc: u32, wg: u32, h: usize) {
        let d = word_difference(wc, wg, self.n, h);
        add_outer_packed(self.n, &mut self.data, &d, lattice_scale(h));
    }

    /// Adds `d d^H / scale`.
    pub fn add_outer(&mut self, d: &[(i32, i32)], scale: i32) {
        add_outer_packed(self.n, &mut self.data, d, scale);
    }

    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += *b;
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn packed(&self) -> &[i32] {
        &self.data
    }

    pub fn entry(&self, p: usize, q: usize) -> (i64, i64) {
        packed_entry(self.n, &self.data, p, q)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn trace(&self) -> i64 {
        self.data[..self.n].iter().map(|&x| x as i64).sum()
    }

    /// Dense complex copy, row-major.
    pub fn to_complex(&self) -> Vec<Complex64> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for p in 0..n {
            for q in 0..n {
                let (re, im) = self.entry(p, q);
                out.push(Complex64::new(re as f64, im as f64));
            }
        }
        out
    }
}

impl fmt::Debug for HermitianAccumulator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for HermitianAccumulator {
    /// `[[a,b+cj],[b-cj,d]]`; purely real entries print as integers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for p in 0..self.n {
            if p > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for q in 0..self.n {
                if q > 0 {
                    write!(f, ",")?;
                }
                let (re, im) = self.entry(p, q);
                if im == 0 {
                    write!(f, "{re}")?;
                } else {
                    write!(f, "{re}{im:+}j")?;
                }
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_layout() {
        assert_eq!(upper_index(2, 0, 1), 2);
        assert_eq!(upper_index(3, 0, 1), 3);
        assert_eq!(upper_index(3, 0, 2), 5);
        assert_eq!(upper_index(3, 1, 2), 7);
        assert_eq!(upper_index(4, 2, 3), 4 + 2 * 5);
    }

    #[test]
    fn appendix_matrices() {
        // (1,3) code: branch 0 -> 1 against 0 -> 0, then 1 -> 0 against 0 -> 0
        let c = HermitianAccumulator::from_words(0b10, 0b00, 2, 1);
        assert_eq!(c, HermitianAccumulator::from_real_rows(&[&[0, 0], &[0, 4]]));
        let d = HermitianAccumulator::from_words(0b11, 0b00, 2, 1);
        assert_eq!(d, HermitianAccumulator::from_real_rows(&[&[4, 4], &[4, 4]]));
        let mut f = c.clone();
        f.add_assign(&d);
        assert_eq!(f, HermitianAccumulator::from_real_rows(&[&[4, 4], &[4, 8]]));
        assert_eq!(f.to_string(), "[[4,4],[4,8]]");
    }

    #[test]
    fn qpsk_entries_even() {
        for wc in 0..16u32 {
            for wg in 0..16u32 {
                let a = HermitianAccumulator::from_words(wc, wg, 2, 2);
                for p in 0..2 {
                    for q in 0..2 {
                        let (re, im) = a.entry(p, q);
                        assert_eq!(re % 2, 0);
                        assert_eq!(im % 2, 0);
                        assert_eq!(a.entry(q, p), (re, -im));
                    }
                }
            }
        }
    }

    #[test]
    fn qpsk_single_antenna_flip() {
        // both bits of antenna 0 flipped: |c - g|^2 = |sqrt2 (1 + j)|^2 = 4
        let a = HermitianAccumulator::from_words(0b0011, 0b0000, 2, 2);
        assert_eq!(a.entry(0, 0), (4, 0));
        assert_eq!(a.entry(1, 1), (0, 0));
    }

    #[test]
    fn complex_offdiagonal() {
        let mut a = HermitianAccumulator::zeros(2);
        a.add_outer(&[(2, 0), (0, 2)], 2);
        assert_eq!(a.entry(0, 1), (0, -2));
        assert_eq!(a.entry(1, 0), (0, 2));
        assert_eq!(a.to_string(), "[[2,0-2j],[0+2j,2]]");
    }
}
