//! Forward propagation of node polynomials along the error trellis.

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::dyadic::Dyadic;
use super::error_trellis::{ErrorTrellis, EventScope, GtfMode, Reference};
use super::polynomial::{MatrixExponentPolynomial, TermKey};
use crate::error::{Error, Result};
use crate::par;

/// Thresholds that keep the transfer function finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    /// Largest bit Hamming weight of a retained term.
    pub delta_h: Option<u32>,
    /// Largest ratio of a minimum-diversity term's eigen product to the
    /// smallest such product.
    pub delta_p: Option<f64>,
    /// Partial terms whose diversity exceeds the best completed diversity
    /// by more than this are dropped. `None` disables diversity pruning.
    pub rank_slack: Option<usize>,
    /// Keep only what is needed to find the minimum diversity.
    pub diversity_only: bool,
    /// Largest number of terms any node may hold after pruning.
    pub term_cap: usize,
}

pub const DEFAULT_DELTA_P: f64 = 100.0;
pub const DEFAULT_TERM_CAP: usize = 10_000;

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            delta_h: None,
            delta_p: Some(DEFAULT_DELTA_P),
            rank_slack: Some(0),
            diversity_only: false,
            term_cap: DEFAULT_TERM_CAP,
        }
    }
}

impl TruncationPolicy {
    /// Default pruning with a Hamming-weight threshold.
    pub fn with_delta_h(delta_h: u32) -> Self {
        Self {
            delta_h: Some(delta_h),
            ..Self::default()
        }
    }

    /// No pruning beyond the optional Hamming threshold.
    pub fn untruncated(delta_h: Option<u32>) -> Self {
        Self {
            delta_h,
            delta_p: None,
            rank_slack: None,
            diversity_only: false,
            term_cap: 1_000_000,
        }
    }

    /// Rank-only pruning for the first search stage.
    pub fn diversity(delta_h: Option<u32>) -> Self {
        Self {
            delta_h,
            delta_p: None,
            rank_slack: Some(0),
            diversity_only: true,
            term_cap: DEFAULT_TERM_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    w: Dyadic,
    eta: u32,
    prod: f64,
}

type NodeMap = FxHashMap<TermKey, Entry>;

/// Best completed diversity so far and the smallest eigen product at it.
#[derive(Clone, Copy, Debug, Default)]
struct Front {
    eta_min: Option<u32>,
    min_prod: f64,
}

impl Front {
    fn record(&mut self, eta: u32, prod: f64) {
        if eta == 0 {
            return;
        }
        match self.eta_min {
            Some(e) if eta > e => {}
            Some(e) if eta == e => self.min_prod = self.min_prod.min(prod),
            _ => {
                self.eta_min = Some(eta);
                self.min_prod = prod;
            }
        }
    }

    fn keep(&self, p: &TruncationPolicy, eta: u32, prod: f64) -> bool {
        let Some(em) = self.eta_min else { return true };
        if p.diversity_only && eta >= em {
            return false;
        }
        let Some(slack) = p.rank_slack else { return true };
        if eta > em + slack as u32 {
            return false;
        }
        if let Some(dp) = p.delta_p {
            if eta == em && prod > dp * self.min_prod {
                return false;
            }
        }
        true
    }
}

struct Pass<'a> {
    et: &'a ErrorTrellis,
    assignment: &'a [usize],
    policy: &'a TruncationPolicy,
    mode: &'a GtfMode,
    info_steps: usize,
    /// Reference inputs and states at each time, fixed-codeword mode only.
    ref_path: Option<(Vec<usize>, Vec<usize>)>,
}

impl Pass<'_> {
    fn matrix(&self) -> bool {
        self.ref_path.is_none()
    }

    fn slots(&self) -> usize {
        if self.matrix() {
            self.et.num_states()
        } else {
            1
        }
    }

    fn run(&self, start: usize) -> Result<MatrixExponentPolynomial> {
        let et = self.et;
        let n = et.n;
        let nn = n * n;
        let blocks = self.assignment.iter().max().map_or(1, |&l| l + 1);
        let ns = et.num_states();
        let ni = et.num_inputs();
        let slots = self.slots();
        let full = self.mode.scope == EventScope::Full;
        let mut cur: Vec<NodeMap> = vec![NodeMap::default(); ns * slots];
        let mut next: Vec<NodeMap> = vec![NodeMap::default(); ns * slots];
        let zero = TermKey::zero(n, blocks);
        let seed = Entry {
            w: Dyadic::ONE,
            eta: 0,
            prod: 1.0,
        };
        if full || !self.matrix() {
            cur[0].insert(zero, seed);
        } else {
            for rs in 0..ns {
                cur[rs].insert(zero.clone(), seed);
            }
        }
        let mut result = MatrixExponentPolynomial::new(n, blocks);
        let mut front = Front::default();
        let t_end = self.assignment.len();

        for t in start..t_end {
            let tail = self.mode.zero_tail && t >= self.info_steps;
            let l = self.assignment[t];
            let shift = if self.matrix() && !tail { et.k as u32 } else { 0 };
            for node in 0..ns * slots {
                if cur[node].is_empty() {
                    continue;
                }
                let es = node / slots;
                let rs = match &self.ref_path {
                    None => node % slots,
                    Some((_, states)) => states[t],
                };
                let terms = std::mem::take(&mut cur[node]);
                for e in 0..ni {
                    if (tail && e != 0) || (!full && es == 0 && e == 0) {
                        continue;
                    }
                    let es2 = et.error_next(es, e);
                    let dhw = et.error_weight(es, e);
                    let togo = et.distance_to_zero(es2);
                    let inputs: &[usize] = match &self.ref_path {
                        Some((u, _)) => std::slice::from_ref(&u[t]),
                        None if tail => &[0],
                        None => &ALL_INPUTS[..ni],
                    };
                    for &u in inputs {
                        let rs2 = et.reference_next(rs, u);
                        let merged = es2 == 0 && !full;
                        if merged && self.matrix() && rs2 != 0 {
                            continue;
                        }
                        let label = et.label(es, e, rs, u);
                        let dst = es2 * slots + if self.matrix() { rs2 } else { 0 };
                        for (key, ent) in &terms {
                            let hw = key.hw + dhw;
                            if let Some(dh) = self.policy.delta_h {
                                if hw.saturating_add(togo) > dh {
                                    continue;
                                }
                            }
                            let mut k2 = key.clone();
                            k2.hw = hw;
                            for (a, b) in k2.blocks[l * nn..(l + 1) * nn].iter_mut().zip(label) {
                                *a += *b;
                            }
                            let w = ent.w.shr(shift);
                            if merged {
                                let (eta, prod) = k2.diversity(n);
                                front.record(eta as u32, prod);
                                result.add_term(k2, w)?;
                            } else {
                                insert(&mut next[dst], k2, w, n)?;
                            }
                        }
                    }
                }
                let mut terms = terms;
                terms.clear();
                cur[node] = terms;
            }
            std::mem::swap(&mut cur, &mut next);

            let mut any = false;
            for (node, map) in cur.iter_mut().enumerate() {
                if map.is_empty() {
                    continue;
                }
                if !full {
                    map.retain(|_, ent| front.keep(self.policy, ent.eta, ent.prod));
                }
                if map.len() > self.policy.term_cap {
                    return Err(Error::TermBudget {
                        node: format!("error state {}, slot {} at t = {t}", node / slots, node % slots),
                        terms: map.len(),
                        cap: self.policy.term_cap,
                        delta_h: self.policy.delta_h,
                        delta_p: self.policy.delta_p,
                    });
                }
                any |= !map.is_empty();
            }
            if !any {
                break;
            }
        }

        if full {
            for slot in 0..slots {
                for (k, ent) in cur[slot].drain() {
                    result.add_term(k, ent.w)?;
                }
            }
            result.take_constant();
        }
        Ok(result)
    }
}

const ALL_INPUTS: [usize; 256] = {
    let mut a = [0usize; 256];
    let mut i = 0;
    while i < 256 {
        a[i] = i;
        i += 1;
    }
    a
};

#[inline]
fn insert(map: &mut NodeMap, key: TermKey, w: Dyadic, n: usize) -> Result<()> {
    use std::collections::hash_map::Entry as E;
    match map.entry(key) {
        E::Occupied(mut o) => {
            let ent = o.get_mut();
            ent.w = ent.w.checked_add(w)?;
        }
        E::Vacant(v) => {
            let (eta, prod) = v.key().diversity(n);
            v.insert(Entry {
                w,
                eta: eta as u32,
                prod,
            });
        }
    }
    Ok(())
}

/// Runs the forward pass over a frame of `assignment.len()` steps.
///
/// In all-codeword mode every branch of an information step carries the
/// input probability `2^-k`; tail steps carry weight 1. Time-0 passes
/// start from every reference state with weight 1 and read a completed
/// event out only where the reference path returns to state 0.
pub fn gtf_forward(
    et: &ErrorTrellis,
    assignment: &[usize],
    policy: &TruncationPolicy,
    mode: &GtfMode,
) -> Result<MatrixExponentPolynomial> {
    let frame_len = assignment.len();
    if frame_len < et.mu {
        return Err(Error::InvalidConfig(format!(
            "frame of {frame_len} steps is shorter than mu = {}",
            et.mu
        )));
    }
    if et.k > 8 {
        return Err(Error::InvalidConfig("k > 8 is not supported".into()));
    }
    let info_steps = if mode.zero_tail {
        frame_len + 1 - et.mu
    } else {
        frame_len
    };
    let ref_path = match &mode.reference {
        Reference::AllCodewords => None,
        Reference::Fixed(inputs) => {
            let u = match inputs {
                Some(u) => {
                    if u.len() != frame_len {
                        return Err(Error::LengthMismatch {
                            expected: frame_len,
                            got: u.len(),
                        });
                    }
                    if u.iter().any(|&x| x >= et.num_inputs()) {
                        return Err(Error::InvalidConfig("reference input word out of range".into()));
                    }
                    if mode.zero_tail && u[info_steps..].iter().any(|&x| x != 0) {
                        return Err(Error::InvalidConfig("reference path must end in a zero tail".into()));
                    }
                    u.clone()
                }
                None => vec![0; frame_len],
            };
            let mut states = Vec::with_capacity(frame_len);
            let mut s = 0;
            for &x in &u {
                states.push(s);
                s = et.reference_next(s, x);
            }
            Some((u, states))
        }
    };
    let pass = Pass {
        et,
        assignment,
        policy,
        mode,
        info_steps,
        ref_path,
    };
    match mode.scope {
        EventScope::Time0 | EventScope::Full => pass.run(0),
        EventScope::AllStarts => {
            let parts = par::map_range(0, info_steps as u64, |r| pass.run(r as usize));
            let blocks = assignment.iter().max().map_or(1, |&l| l + 1);
            let mut total = MatrixExponentPolynomial::new(et.n, blocks);
            for p in parts {
                total.add_assign(&p?)?;
            }
            Ok(total)
        }
    }
}
