//! Exhaustive generator search ranked by diversity and performance factor.

use std::collections::{BTreeMap, BinaryHeap};
use std::cmp::Reverse;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::catastrophic::has_zero_output_cycle;
use crate::channel::assign_blocks;
use crate::error::{Error, Result};
use crate::generators::GeneratorSet;
use crate::gtf::{build_error_trellis, code_metrics, gtf_forward, EventScope, GtfMode, TruncationPolicy};
use crate::par;
use crate::trellis::{build_trellis, EncoderConfig, Trellis};

/// Largest number of candidates a search will enumerate, as a power of two.
pub const SEARCH_GUARD_LOG2: u32 = 24;

/// Relative performance-factor spread that defines a class.
pub const DEFAULT_CLASS_TOLERANCE: f64 = 1e-2;

/// Candidates evaluated between checkpoints.
const CHUNK: u64 = 1 << 12;

/// `1 + floor(L n (1 - k/(n h)))`, the diversity ceiling under block fading.
pub fn singleton_bound(n: usize, k: usize, h: usize, blocks: usize) -> Result<usize> {
    if h == 0 || n == 0 || k > n * h {
        return Err(Error::OutOfRange(format!("rate k/(nh) = {k}/{} exceeds 1", n * h)));
    }
    Ok(1 + blocks * (n * h - k) / h)
}

/// Free Hamming distance of the underlying convolutional code.
pub fn free_distance(gens: &GeneratorSet, cfg: &EncoderConfig) -> Result<u32> {
    let t = build_trellis(gens, cfg)?;
    trellis_free_distance(&t)
}

/// Smallest output weight of a path that leaves state 0 and returns to it.
pub fn trellis_free_distance(t: &Trellis) -> Result<u32> {
    if has_zero_output_cycle(t) {
        return Err(Error::Catastrophic);
    }
    let ns = t.num_states();
    let mut dist = vec![u32::MAX; ns];
    let mut best = u32::MAX;
    let mut heap = BinaryHeap::new();
    for u in 1..t.num_inputs() {
        let s = t.next_state(0, u);
        let w = t.output_word(0, u).count_ones();
        if s == 0 {
            best = best.min(w);
        } else if w < dist[s] {
            dist[s] = w;
            heap.push(Reverse((w, s)));
        }
    }
    while let Some(Reverse((d, s))) = heap.pop() {
        if d > dist[s] || d >= best {
            continue;
        }
        for u in 0..t.num_inputs() {
            let s2 = t.next_state(s, u);
            let nd = d + t.output_word(s, u).count_ones();
            if s2 == 0 {
                best = best.min(nd);
            } else if nd < dist[s2] {
                dist[s2] = nd;
                heap.push(Reverse((nd, s2)));
            }
        }
    }
    Ok(best)
}

/// Parameters of an exhaustive search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub n: usize,
    pub k: usize,
    pub h: usize,
    pub mu: usize,
    #[serde(rename = "L")]
    pub blocks: usize,
    pub m: usize,
    #[serde(rename = "N")]
    pub frame_len: usize,
    pub policy: TruncationPolicy,
    pub mode: GtfMode,
    /// Evaluate one representative per symmetry orbit.
    pub symmetry: bool,
    pub class_tolerance: f64,
}

impl SearchSpec {
    pub fn new(n: usize, k: usize, h: usize, mu: usize, blocks: usize, m: usize, frame_len: usize) -> Self {
        Self {
            n,
            k,
            h,
            mu,
            blocks,
            m,
            frame_len,
            policy: TruncationPolicy::default(),
            mode: GtfMode::time0(),
            symmetry: false,
            class_tolerance: DEFAULT_CLASS_TOLERANCE,
        }
    }

    pub fn encoder(&self) -> EncoderConfig {
        EncoderConfig::new(self.n, self.m, self.k, self.h, self.mu, self.frame_len)
    }

    pub fn width(&self) -> u32 {
        (self.k * self.mu) as u32
    }

    /// `log2` of the raw candidate count `2^(n h k mu)`.
    pub fn log2_size(&self) -> u32 {
        (self.n * self.h * self.k * self.mu) as u32
    }

    pub fn validate(&self) -> Result<()> {
        self.encoder().validate()?;
        if self.blocks == 0 || self.frame_len % self.blocks != 0 {
            return Err(Error::BlocksDoNotDivide {
                frame_len: self.frame_len,
                blocks: self.blocks,
            });
        }
        if self.mode.scope == EventScope::Full {
            return Err(Error::InvalidConfig("search ranks first events; full scope is not supported".into()));
        }
        if !(self.class_tolerance >= 0.0) {
            return Err(Error::InvalidConfig("class tolerance must be non-negative".into()));
        }
        let log2 = self.log2_size();
        let reduced = if self.symmetry {
            log2.saturating_sub(symmetry_group(self.n, self.h, self.k).len().ilog2())
        } else {
            log2
        };
        if log2 >= 64 || reduced > SEARCH_GUARD_LOG2 {
            return Err(Error::SearchSpaceTooLarge {
                log2_size: log2,
                guard: SEARCH_GUARD_LOG2,
            });
        }
        Ok(())
    }

    /// Generator set of candidate `index`; generator 0 holds the most
    /// significant tap bits.
    pub fn candidate(&self, index: u64) -> GeneratorSet {
        let w = self.width();
        let g = self.n * self.h;
        let mask = (1u64 << w) - 1;
        let taps = (0..g)
            .map(|j| (index >> ((g - 1 - j) as u32 * w)) & mask)
            .collect();
        GeneratorSet::from_taps(taps, w).expect("taps fit the register")
    }

    /// Inverse of [`SearchSpec::candidate`].
    pub fn index_of(&self, gens: &GeneratorSet) -> u64 {
        let w = self.width();
        gens.taps().iter().fold(0u64, |acc, &t| (acc << w) | t)
    }
}

/// Tap relabelings that leave diversity and performance factor unchanged:
/// antenna permutations, the joint swap of in-phase and quadrature bits,
/// and permutations of the bits inside each input word.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Symmetry {
    antennas: Vec<usize>,
    swap_iq: bool,
    inputs: Vec<usize>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn rec(p: &mut Vec<usize>, i: usize, out: &mut Vec<Vec<usize>>) {
        if i == p.len() {
            out.push(p.clone());
            return;
        }
        for j in i..p.len() {
            p.swap(i, j);
            rec(p, i + 1, out);
            p.swap(i, j);
        }
    }
    rec(&mut p, 0, &mut out);
    out
}

fn symmetry_group(n: usize, h: usize, k: usize) -> Vec<Symmetry> {
    let swaps: &[bool] = if h == 2 { &[false, true] } else { &[false] };
    let mut out = Vec::new();
    for a in permutations(n) {
        for &s in swaps {
            for i in permutations(k) {
                out.push(Symmetry {
                    antennas: a.clone(),
                    swap_iq: s,
                    inputs: i,
                });
            }
        }
    }
    out
}

impl Symmetry {
    fn apply(&self, taps: &[u64], h: usize, k: usize, mu: usize) -> Vec<u64> {
        let n = self.antennas.len();
        let mut out = vec![0u64; n * h];
        for i in 0..n {
            for b in 0..h {
                let src = h * self.antennas[i] + if self.swap_iq { b ^ 1 } else { b };
                out[h * i + b] = permute_register(taps[src], &self.inputs, k, mu);
            }
        }
        out
    }
}

fn permute_register(t: u64, perm: &[usize], k: usize, mu: usize) -> u64 {
    let mut out = 0;
    for j in 0..mu {
        for (b, &p) in perm.iter().enumerate() {
            if t >> (k * j + b) & 1 == 1 {
                out |= 1 << (k * j + p);
            }
        }
    }
    out
}

/// Smallest index in the orbit of `index` and the orbit size.
fn canonical(spec: &SearchSpec, group: &[Symmetry], index: u64) -> (u64, u64) {
    let g = spec.candidate(index);
    let mut images: Vec<u64> = group
        .iter()
        .map(|s| {
            let t = s.apply(g.taps(), spec.h, spec.k, spec.mu);
            t.iter().fold(0u64, |acc, &x| (acc << spec.width()) | x)
        })
        .collect();
    images.sort_unstable();
    images.dedup();
    (images[0], images.len() as u64)
}

/// A candidate that survived the diversity stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageOneRecord {
    pub index: u64,
    pub eta_min: usize,
    pub d_f: u32,
    /// Candidates represented, the orbit size under symmetry reduction.
    pub multiplicity: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchCounts {
    pub enumerated: u64,
    pub evaluated: u64,
    pub catastrophic: u64,
    pub zero_diversity: u64,
    /// Raw candidates per achieved diversity, orbit sizes included.
    pub diversity_histogram: BTreeMap<usize, u64>,
}

/// Resumable state of the diversity stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub spec: SearchSpec,
    pub next_index: u64,
    pub counts: SearchCounts,
    pub best: Vec<StageOneRecord>,
}

/// One ranked code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCode {
    pub index: u64,
    pub generators: GeneratorSet,
    pub eta_min: usize,
    /// `F_min(m) / N` for time-0 analysis.
    pub f_min: f64,
    pub d_f: u32,
    /// Class number, 1 for the best class.
    pub class: usize,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub spec: SearchSpec,
    pub singleton_bound: usize,
    pub counts: SearchCounts,
    /// Maximum-diversity codes sorted by the ranking criterion.
    pub codes: Vec<RankedCode>,
    /// Raw candidates per class, orbit sizes included.
    pub class_sizes: Vec<u64>,
}

impl SearchReport {
    pub fn top(&self) -> Option<&RankedCode> {
        self.codes.first()
    }

    pub fn class_members(&self, class: usize) -> impl Iterator<Item = &RankedCode> {
        self.codes.iter().filter(move |c| c.class == class)
    }

    /// CSV with one row per reported code.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["generators", "d_f", "eta_min", "f_min", "class", "multiplicity"])
            .map_err(csv_err)?;
        for c in &self.codes {
            w.write_record([
                c.generators.octal().join(","),
                c.d_f.to_string(),
                c.eta_min.to_string(),
                format!("{:.6e}", c.f_min),
                c.class.to_string(),
                c.multiplicity.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Manifest with the spec, counts and class sizes.
    pub fn manifest(&self) -> serde_json::Value {
        serde_json::json!({
            "spec": self.spec,
            "singleton_bound": self.singleton_bound,
            "counts": self.counts,
            "class_sizes": self.class_sizes,
            "backend": par::backend(),
        })
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

enum Outcome {
    Catastrophic,
    ZeroDiversity,
    Scored(StageOneRecord),
}

fn stage_one(spec: &SearchSpec, index: u64, multiplicity: u64, assignment: &[usize]) -> Result<Outcome> {
    let cfg = spec.encoder();
    let t = build_trellis(&spec.candidate(index), &cfg)?;
    let d_f = match trellis_free_distance(&t) {
        Ok(d) => d,
        Err(Error::Catastrophic) => return Ok(Outcome::Catastrophic),
        Err(e) => return Err(e),
    };
    let et = build_error_trellis(&t)?;
    let mut policy = TruncationPolicy::diversity(spec.policy.delta_h);
    policy.term_cap = spec.policy.term_cap;
    let poly = gtf_forward(&et, assignment, &policy, &spec.mode)?;
    match code_metrics(&poly, spec.m, 1.0, None) {
        Ok(cm) => Ok(Outcome::Scored(StageOneRecord {
            index,
            eta_min: cm.eta_min,
            d_f,
            multiplicity,
        })),
        Err(Error::ZeroDiversity) => Ok(Outcome::ZeroDiversity),
        Err(e) => Err(e),
    }
}

fn f_min(spec: &SearchSpec, index: u64, assignment: &[usize]) -> Result<(usize, f64)> {
    let t = build_trellis(&spec.candidate(index), &spec.encoder())?;
    let et = build_error_trellis(&t)?;
    let poly = gtf_forward(&et, assignment, &spec.policy, &spec.mode)?;
    let cm = code_metrics(&poly, spec.m, 1.0, spec.policy.delta_p)?;
    Ok((cm.eta_min, cm.f_min))
}

/// Runs the search without checkpointing.
pub fn search(spec: &SearchSpec) -> Result<SearchReport> {
    search_with_checkpoint(spec, None)
}

/// Runs the search, saving progress of the diversity stage to
/// `checkpoint` and resuming from it when it matches `spec`.
pub fn search_with_checkpoint(spec: &SearchSpec, checkpoint: Option<&Path>) -> Result<SearchReport> {
    spec.validate()?;
    let total = 1u64 << spec.log2_size();
    let group = if spec.symmetry {
        symmetry_group(spec.n, spec.h, spec.k)
    } else {
        Vec::new()
    };
    let assignment = assign_blocks(spec.frame_len, spec.blocks)?;

    let mut state = match checkpoint.filter(|p| p.exists()) {
        Some(p) => {
            let c: Checkpoint = serde_json::from_str(&std::fs::read_to_string(p)?)?;
            if c.spec != *spec {
                return Err(Error::Config(format!(
                    "checkpoint {} belongs to a different search",
                    p.display()
                )));
            }
            c
        }
        None => Checkpoint {
            spec: spec.clone(),
            next_index: 0,
            counts: SearchCounts::default(),
            best: Vec::new(),
        },
    };

    while state.next_index < total {
        let end = (state.next_index + CHUNK).min(total);
        let results = par::map_range(state.next_index, end, |i| {
            let mult = if spec.symmetry {
                let (c, size) = canonical(spec, &group, i);
                if c != i {
                    return Ok(None);
                }
                size
            } else {
                1
            };
            stage_one(spec, i, mult, &assignment).map(|o| Some((o, mult)))
        });
        for r in results {
            let Some((outcome, mult)) = r? else { continue };
            state.counts.enumerated += mult;
            state.counts.evaluated += 1;
            match outcome {
                Outcome::Catastrophic => state.counts.catastrophic += mult,
                Outcome::ZeroDiversity => state.counts.zero_diversity += mult,
                Outcome::Scored(rec) => {
                    *state.counts.diversity_histogram.entry(rec.eta_min).or_default() += mult;
                    let cur = state.best.first().map_or(0, |b| b.eta_min);
                    if rec.eta_min > cur {
                        state.best.clear();
                    }
                    if rec.eta_min >= cur {
                        state.best.push(rec);
                    }
                }
            }
        }
        state.next_index = end;
        if let Some(p) = checkpoint {
            let tmp = p.with_extension("tmp");
            std::fs::write(&tmp, serde_json::to_vec(&state)?)?;
            std::fs::rename(&tmp, p)?;
        }
    }

    let scored = par::map_slice(&state.best, |r| f_min(spec, r.index, &assignment));
    let mut codes = Vec::with_capacity(scored.len());
    for (rec, s) in state.best.iter().zip(scored) {
        let (eta, f) = s?;
        debug_assert_eq!(eta, rec.eta_min);
        codes.push(RankedCode {
            index: rec.index,
            generators: spec.candidate(rec.index),
            eta_min: rec.eta_min,
            f_min: f,
            d_f: rec.d_f,
            class: 0,
            multiplicity: rec.multiplicity,
        });
    }
    let class_sizes = rank_and_classify(&mut codes, spec.class_tolerance);
    Ok(SearchReport {
        spec: spec.clone(),
        singleton_bound: singleton_bound(spec.n, spec.k, spec.h, spec.blocks)?,
        counts: state.counts,
        codes,
        class_sizes,
    })
}

/// Sorts by decreasing diversity, then increasing performance factor, then
/// index, and groups codes within `tol` relative distance of their class
/// leader. Returns the weighted class sizes.
pub fn rank_and_classify(codes: &mut [RankedCode], tol: f64) -> Vec<u64> {
    codes.sort_by(|a, b| {
        b.eta_min
            .cmp(&a.eta_min)
            .then(a.f_min.total_cmp(&b.f_min))
            .then(a.index.cmp(&b.index))
    });
    let mut sizes: Vec<u64> = Vec::new();
    let mut leader: Option<(usize, f64)> = None;
    for c in codes.iter_mut() {
        let same = leader.is_some_and(|(eta, f)| eta == c.eta_min && (c.f_min - f) <= tol * f.abs());
        if !same {
            leader = Some((c.eta_min, c.f_min));
            sizes.push(0);
        }
        c.class = sizes.len();
        *sizes.last_mut().unwrap() += c.multiplicity;
    }
    sizes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::parse_generator_list;

    #[test]
    fn singleton_values() {
        assert_eq!(singleton_bound(2, 1, 1, 1).unwrap(), 2);
        assert_eq!(singleton_bound(2, 1, 1, 8).unwrap(), 9);
        assert_eq!(singleton_bound(2, 2, 1, 5).unwrap(), 1);
        assert_eq!(singleton_bound(2, 4, 2, 3).unwrap(), 1);
        assert_eq!(singleton_bound(2, 2, 2, 1).unwrap(), 2);
        assert!(singleton_bound(2, 3, 1, 1).is_err());
    }

    #[test]
    fn free_distances() {
        let cases = [
            ("1,3", 1, 2, 2, 1, 3),
            ("5,7", 1, 3, 2, 1, 5),
            ("133,171", 1, 7, 2, 1, 10),
            ("06,13,11,16", 2, 2, 2, 2, 4),
            ("01,02,04,10", 2, 2, 2, 2, 2),
        ];
        for (g, k, mu, n, h, want) in cases {
            let cfg = EncoderConfig::new(n, 1, k, h, mu, 64);
            let gs = parse_generator_list(g, k, mu).unwrap();
            assert_eq!(free_distance(&gs, &cfg).unwrap(), want, "{g}");
        }
        let cfg = EncoderConfig::new(2, 1, 1, 1, 3, 64);
        let gs = parse_generator_list("5,5", 1, 3).unwrap();
        assert_eq!(free_distance(&gs, &cfg), Err(Error::Catastrophic));
    }

    #[test]
    fn candidate_round_trip() {
        let s = SearchSpec::new(2, 2, 2, 2, 1, 2, 130);
        let g = parse_generator_list("06,13,11,16", 2, 2).unwrap();
        let i = s.index_of(&g);
        assert_eq!(s.candidate(i), g);
        assert_eq!(s.log2_size(), 16);
    }

    #[test]
    fn guard() {
        let s = SearchSpec::new(2, 2, 2, 4, 1, 2, 130);
        assert!(matches!(s.validate(), Err(Error::SearchSpaceTooLarge { .. })));
    }

    #[test]
    fn orbits_partition_the_space() {
        let s = SearchSpec::new(2, 2, 2, 2, 1, 2, 130);
        let group = symmetry_group(2, 2, 2);
        assert_eq!(group.len(), 8);
        let total: u64 = (0..1u64 << 16)
            .filter_map(|i| {
                let (c, size) = canonical(&s, &group, i);
                (c == i).then_some(size)
            })
            .sum();
        assert_eq!(total, 1 << 16);
    }

    #[test]
    fn mu2_bpsk_winner() {
        let mut s = SearchSpec::new(2, 1, 1, 2, 1, 1, 130);
        s.policy = TruncationPolicy::with_delta_h(5);
        let r = search(&s).unwrap();
        let top = r.top().unwrap();
        assert_eq!(top.eta_min, 2);
        assert_eq!(top.generators.octal(), ["1", "2"]);
        assert!((top.f_min - 0.083).abs() < 0.005);
        assert!(r.codes.iter().all(|c| c.generators.taps()[0] != c.generators.taps()[1]));
    }

    #[test]
    fn symmetry_preserves_classes() {
        let mut s = SearchSpec::new(2, 1, 1, 3, 1, 1, 64);
        s.policy = TruncationPolicy::with_delta_h(9);
        let raw = search(&s).unwrap();
        s.symmetry = true;
        let red = search(&s).unwrap();
        assert_eq!(raw.class_sizes, red.class_sizes);
        assert_eq!(raw.counts.diversity_histogram, red.counts.diversity_histogram);
        assert!(red.counts.evaluated < raw.counts.evaluated);
    }

    #[test]
    fn checkpoint_resumes() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("ck.json");
        let mut s = SearchSpec::new(2, 1, 1, 3, 1, 1, 64);
        s.policy = TruncationPolicy::with_delta_h(9);
        let a = search_with_checkpoint(&s, Some(&p)).unwrap();
        let c: Checkpoint = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
        assert_eq!(c.next_index, 64);
        let b = search_with_checkpoint(&s, Some(&p)).unwrap();
        assert_eq!(a, b);
        s.m = 2;
        assert!(search_with_checkpoint(&s, Some(&p)).is_err());
    }
}
