mod common;

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pstc_core::catastrophic::is_catastrophic;
use pstc_core::channel::assign_blocks;
use pstc_core::encoder::input_words;
use pstc_core::generators::GeneratorSet;
use pstc_core::gtf::{
    build_error_trellis, code_metrics, gtf_forward, transfer_function, EventScope, GtfMode, Reference, TruncationPolicy,
    DEFAULT_DELTA_P,
};
use pstc_core::search::{free_distance, rank_and_classify, search, singleton_bound, SearchSpec};
use pstc_core::trellis::{build_trellis, EncoderConfig};

use common::{all_bpsk_pairs, all_messages, fixed_reference_polynomial};

/// Binary polynomial remainder, bit `i` being the coefficient of `x^i`.
fn poly_rem(mut a: u64, b: u64) -> u64 {
    let db = 63 - b.leading_zeros();
    while a != 0 && 63 - a.leading_zeros() >= db {
        a ^= b << (63 - a.leading_zeros() - db);
    }
    a
}

fn poly_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = poly_rem(a, b);
        a = b;
        b = r;
    }
    a
}

/// A k = 1 encoder is non-catastrophic iff the generators' gcd is a power
/// of the delay operator.
fn gcd_catastrophic(taps: &[u64]) -> bool {
    let g = taps.iter().fold(0, |acc, &t| poly_gcd(acc, t));
    g == 0 || !g.is_power_of_two()
}

#[test]
fn catastrophic_agrees_with_gcd_for_k1() {
    for mu in 2..=5 {
        for gens in all_bpsk_pairs(mu) {
            let cfg = EncoderConfig::new(2, 1, 1, 1, mu, 2 * mu);
            assert_eq!(
                is_catastrophic(&gens, &cfg).unwrap(),
                gcd_catastrophic(gens.taps()),
                "{gens}"
            );
        }
    }
    for a in 0..8 {
        for b in 0..8 {
            for c in 0..8 {
                let gens = GeneratorSet::from_taps(vec![a, b, c], 3).unwrap();
                let cfg = EncoderConfig::new(3, 1, 1, 1, 3, 6);
                assert_eq!(is_catastrophic(&gens, &cfg).unwrap(), gcd_catastrophic(gens.taps()), "{gens}");
            }
        }
    }
}

#[test]
fn named_codes_catastrophic_status() {
    let check = |g: &str, mu: usize| {
        let gens = pstc_core::generators::parse_generator_list(g, 1, mu).unwrap();
        is_catastrophic(&gens, &EncoderConfig::new(2, 1, 1, 1, mu, 2 * mu)).unwrap()
    };
    assert!(!check("1,3", 2));
    assert!(check("5,5", 3));
    assert!(!check("133,171", 7));
}

#[test]
fn pruning_preserves_minimum_terms() {
    for mu in [2, 3] {
        for gens in all_bpsk_pairs(mu) {
            for frame_len in [8, 12] {
                let cfg = EncoderConfig::new(2, 1, 1, 1, mu, frame_len);
                for blocks in [1, 2, frame_len] {
                    let pruned = TruncationPolicy {
                        delta_h: None,
                        ..TruncationPolicy::default()
                    };
                    let full = TruncationPolicy::untruncated(None);
                    let mode = GtfMode::time0();
                    let a = transfer_function(&gens, &cfg, blocks, &pruned, &mode)
                        .and_then(|p| code_metrics(&p, 1, 1.0, Some(DEFAULT_DELTA_P)));
                    let b = transfer_function(&gens, &cfg, blocks, &full, &mode)
                        .and_then(|p| code_metrics(&p, 1, 1.0, Some(DEFAULT_DELTA_P)));
                    match (a, b) {
                        (Ok(a), Ok(b)) => {
                            assert_eq!(a.eta_min, b.eta_min, "{gens} N={frame_len} L={blocks}");
                            assert_eq!(a.min_terms, b.min_terms, "{gens} N={frame_len} L={blocks}");
                            assert_eq!(a.f_min_exact_per_frame(), b.f_min_exact_per_frame(), "{gens} N={frame_len} L={blocks}");
                        }
                        (Err(a), Err(b)) => assert_eq!(a, b),
                        (a, b) => panic!("{gens} N={frame_len} L={blocks}: {a:?} vs {b:?}"),
                    }
                }
            }
        }
    }
}

#[test]
fn fixed_reference_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for mu in [2, 3] {
        for gens in all_bpsk_pairs(mu) {
            let cfg = EncoderConfig::new(2, 1, 1, 1, mu, 7);
            let t = build_trellis(&gens, &cfg).unwrap();
            let et = build_error_trellis(&t).unwrap();
            let msgs = all_messages(&cfg);
            for blocks in [1, 7] {
                let a = assign_blocks(7, blocks).unwrap();
                let c = &msgs[rng.random_range(0..msgs.len())];
                let words = input_words(c, &cfg).unwrap();
                let mode = GtfMode::new(Reference::Fixed(Some(words)), EventScope::Full);
                let p = gtf_forward(&et, &a, &TruncationPolicy::untruncated(None), &mode).unwrap();
                assert_eq!(p, fixed_reference_polynomial(&t, &cfg, &a, c), "{gens} L={blocks}");
            }
        }
    }
}

fn small_specs() -> Vec<SearchSpec> {
    let mut out = Vec::new();
    for (n, k, h, mu) in [(2, 1, 1, 3), (2, 1, 2, 2), (3, 1, 1, 2)] {
        for blocks in [1, 2] {
            let mut s = SearchSpec::new(n, k, h, mu, blocks, 1, 16);
            s.policy = TruncationPolicy::with_delta_h(9);
            out.push(s);
        }
    }
    out
}

#[test]
fn search_outputs_respect_bounds() {
    for spec in small_specs() {
        let r = search(&spec).unwrap();
        let bound = singleton_bound(spec.n, spec.k, spec.h, spec.blocks).unwrap();
        assert_eq!(r.singleton_bound, bound);
        assert!(!r.codes.is_empty());
        for c in &r.codes {
            assert!(c.eta_min <= bound, "{}", c.generators);
            assert!(c.eta_min as u32 <= c.d_f, "{}", c.generators);
            assert_eq!(c.d_f, free_distance(&c.generators, &spec.encoder()).unwrap());
        }
    }
}

#[test]
fn ranking_is_order_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for spec in small_specs() {
        let r = search(&spec).unwrap();
        let mut shuffled = r.codes.clone();
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.random_range(0..=i));
        }
        let sizes = rank_and_classify(&mut shuffled, spec.class_tolerance);
        assert_eq!(sizes, r.class_sizes);
        assert_eq!(shuffled, r.codes);
    }
}

#[test]
fn maximum_diversity_set_independent_of_m() {
    for spec in small_specs() {
        let set = |m| {
            let mut s = spec.clone();
            s.m = m;
            search(&s).unwrap().codes.iter().map(|c| c.index).collect::<BTreeSet<_>>()
        };
        let one = set(1);
        assert_eq!(one, set(2));
        assert_eq!(one, set(4));
    }
}
