//! Error trellis with matrix labels.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pep::{add_outer_packed, lattice_scale, word_difference};
use crate::trellis::Trellis;

/// Which codewords serve as the transmitted reference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reference {
    /// Average over all transmitted codewords with matrix labels.
    AllCodewords,
    /// A single reference codeword given by its input words; `None` is
    /// the all-zero codeword.
    Fixed(Option<Vec<usize>>),
}

/// Which error events the transfer function enumerates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventScope {
    /// First events diverging at time 0.
    Time0,
    /// Sum of first-event functions over every start time.
    AllStarts,
    /// All codeword pairs of the frame.
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GtfMode {
    pub reference: Reference,
    pub scope: EventScope,
    /// Force `mu - 1` zero input words at the end of the frame.
    pub zero_tail: bool,
}

impl GtfMode {
    pub fn new(reference: Reference, scope: EventScope) -> Self {
        Self {
            reference,
            scope,
            zero_tail: true,
        }
    }

    /// All-codeword time-0 first events, the default analysis.
    pub fn time0() -> Self {
        Self::new(Reference::AllCodewords, EventScope::Time0)
    }

    /// Time-0 first events against the all-zero codeword.
    pub fn fixed_zero() -> Self {
        Self::new(Reference::Fixed(None), EventScope::Time0)
    }

    pub fn full() -> Self {
        Self::new(Reference::AllCodewords, EventScope::Full)
    }

    pub fn is_matrix(&self) -> bool {
        self.reference == Reference::AllCodewords
    }
}

/// Labels of every (error edge, reference edge) pair.
///
/// Error edge `(es, e)` leads to `es' = next(es, e)` with output Hamming
/// weight `hw(es, e)` whatever the reference. Its matrix label for the
/// reference edge `(rs, u)` is `A = (c - g)(c - g)^H` with `c` the output
/// of `(rs, u)` and `g` the output of `(rs ^ es, u ^ e)`.
#[derive(Debug, Clone)]
pub struct ErrorTrellis {
    pub n: usize,
    pub k: usize,
    pub h: usize,
    pub mu: usize,
    num_states: usize,
    err_next: Vec<u32>,
    err_hw: Vec<u32>,
    ref_next: Vec<u32>,
    labels: Vec<i32>,
    dist_to_zero: Vec<u32>,
}

/// Largest label table accepted, in matrix entries.
const LABEL_LIMIT: usize = 1 << 24;

impl ErrorTrellis {
    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_inputs(&self) -> usize {
        1 << self.k
    }

    #[inline]
    pub fn error_next(&self, es: usize, e: usize) -> usize {
        self.err_next[(es << self.k) | e] as usize
    }

    #[inline]
    pub fn error_weight(&self, es: usize, e: usize) -> u32 {
        self.err_hw[(es << self.k) | e]
    }

    #[inline]
    pub fn reference_next(&self, rs: usize, u: usize) -> usize {
        self.ref_next[(rs << self.k) | u] as usize
    }

    /// Packed `n x n` label of error edge `(es, e)` over reference edge `(rs, u)`.
    #[inline]
    pub fn label(&self, es: usize, e: usize, rs: usize, u: usize) -> &[i32] {
        let nn = self.n * self.n;
        let ei = (es << self.k) | e;
        let ri = (rs << self.k) | u;
        let idx = (ei * (self.num_states << self.k) + ri) * nn;
        &self.labels[idx..idx + nn]
    }

    /// Smallest output weight of any error path from `es` back to zero.
    #[inline]
    pub fn distance_to_zero(&self, es: usize) -> u32 {
        self.dist_to_zero[es]
    }
}

/// Tabulates the error trellis of `t`.
pub fn build_error_trellis(t: &Trellis) -> Result<ErrorTrellis> {
    let ns = t.num_states();
    let ni = t.num_inputs();
    let n = t.n;
    let nn = n * n;
    let edges = ns * ni;
    if edges * edges * nn > LABEL_LIMIT {
        return Err(Error::InvalidConfig(format!(
            "error trellis with {ns} states is too large to tabulate"
        )));
    }
    let mut err_next = vec![0u32; edges];
    let mut err_hw = vec![0u32; edges];
    let mut ref_next = vec![0u32; edges];
    for s in 0..ns {
        for u in 0..ni {
            let i = s * ni + u;
            err_next[i] = t.next_state(s, u) as u32;
            err_hw[i] = t.output_word(s, u).count_ones();
            ref_next[i] = t.next_state(s, u) as u32;
        }
    }
    let scale = lattice_scale(t.h);
    let mut labels = vec![0i32; edges * edges * nn];
    for es in 0..ns {
        for e in 0..ni {
            let ei = es * ni + e;
            for rs in 0..ns {
                for u in 0..ni {
                    let ri = rs * ni + u;
                    let wc = t.output_word(rs, u);
                    let wg = t.output_word(rs ^ es, u ^ e);
                    let d = word_difference(wc, wg, n, t.h);
                    let idx = (ei * edges + ri) * nn;
                    add_outer_packed(n, &mut labels[idx..idx + nn], &d, scale);
                }
            }
        }
    }
    let dist_to_zero = distances_to_zero(ns, ni, &err_next, &err_hw);
    Ok(ErrorTrellis {
        n,
        k: t.k,
        h: t.h,
        mu: t.mu,
        num_states: ns,
        err_next,
        err_hw,
        ref_next,
        labels,
        dist_to_zero,
    })
}

/// Dijkstra on reversed error edges from the zero state.
fn distances_to_zero(ns: usize, ni: usize, next: &[u32], hw: &[u32]) -> Vec<u32> {
    let mut rev: Vec<Vec<(usize, u32)>> = vec![Vec::new(); ns];
    for s in 0..ns {
        for u in 0..ni {
            rev[next[s * ni + u] as usize].push((s, hw[s * ni + u]));
        }
    }
    let mut dist = vec![u32::MAX; ns];
    dist[0] = 0;
    let mut heap = BinaryHeap::from([Reverse((0u32, 0usize))]);
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(p, w) in &rev[v] {
            let nd = d + w;
            if nd < dist[p] {
                dist[p] = nd;
                heap.push(Reverse((nd, p)));
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::parse_generators;
    use crate::trellis::{build_trellis, EncoderConfig};

    fn appendix() -> ErrorTrellis {
        let cfg = EncoderConfig::new(2, 1, 1, 1, 2, 16);
        let t = build_trellis(&parse_generators(&["1", "3"], 1, 2).unwrap(), &cfg).unwrap();
        build_error_trellis(&t).unwrap()
    }

    #[test]
    fn appendix_labels() {
        let et = appendix();
        // diverge: c = diag(0, 4) for every reference edge
        for rs in 0..2 {
            for u in 0..2 {
                assert_eq!(et.label(0, 1, rs, u), &[0, 4, 0, 0]);
            }
        }
        // stay in error state 1: b = diag(4, 0)
        assert_eq!(et.label(1, 1, 0, 0), &[4, 0, 0, 0]);
        // merge over reference edge 0 -> 0 and 1 -> 0: d = [[4,4],[4,4]]
        assert_eq!(et.label(1, 0, 0, 0), &[4, 4, 4, 0]);
        assert_eq!(et.label(1, 0, 1, 0), &[4, 4, 4, 0]);
        // zero error self-loop carries the zero exponent
        assert_eq!(et.label(0, 0, 1, 1), &[0, 0, 0, 0]);
    }

    #[test]
    fn error_weights_and_distance() {
        let et = appendix();
        assert_eq!(et.error_weight(0, 1), 1);
        assert_eq!(et.error_weight(1, 0), 2);
        assert_eq!(et.error_weight(1, 1), 1);
        assert_eq!(et.distance_to_zero(1), 2);
        assert_eq!(et.distance_to_zero(0), 0);
    }
}
