//! Pairwise events, asymptotic PEP weights and the Chernoff union bound.

use std::collections::BTreeMap;
use std::io::Write;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::eigen::{principal_minor_sums, rank_and_product};
use super::hermitian::{lattice_scale, HermitianAccumulator};
use crate::error::{Error, Result};
use crate::modulation::SuperSymbol;

/// One codeword pair summarized by its per-block `F` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseEvent {
    pub f: Vec<HermitianAccumulator>,
    /// Sum of block ranks.
    pub eta: usize,
    /// Product over blocks of the nonzero-eigenvalue products.
    pub eigen_product: BigUint,
    pub hamming_weight: u32,
}

impl PairwiseEvent {
    pub fn new(f: Vec<HermitianAccumulator>, hamming_weight: u32) -> Result<Self> {
        let mut eta = 0;
        let mut prod = BigUint::one();
        for x in &f {
            let (r, p) = rank_and_product(&principal_minor_sums(x))?;
            eta += r;
            prod *= BigUint::try_from(p).expect("non-negative product");
        }
        Ok(Self {
            f,
            eta,
            eigen_product: prod,
            hamming_weight,
        })
    }

    /// Per-block characteristic coefficients `e_0..=e_n`.
    pub fn block_coefficients(&self) -> Vec<Vec<i128>> {
        self.f.iter().map(principal_minor_sums).collect()
    }
}

/// Recovers the exact lattice difference of two unit-energy symbols.
fn lattice_diff(c: num_complex::Complex64, g: num_complex::Complex64, h: usize) -> (i32, i32) {
    let s = if h == 2 { std::f64::consts::SQRT_2 } else { 1.0 };
    let d = (c - g) * s;
    (d.re.round() as i32, d.im.round() as i32)
}

/// `F^(l) = sum_{t in T(l)} (c_t - g_t)(c_t - g_t)^H` for every block.
#[allow(non_snake_case)]
pub fn accumulate_F(
    c: &[SuperSymbol],
    g: &[SuperSymbol],
    assignment: &[usize],
    h: usize,
) -> Result<Vec<HermitianAccumulator>> {
    if c.len() != g.len() || c.len() != assignment.len() {
        return Err(Error::LengthMismatch {
            expected: assignment.len(),
            got: c.len().max(g.len()),
        });
    }
    let blocks = assignment.iter().max().map_or(0, |&l| l + 1);
    let n = c.first().map_or(0, |s| s.len());
    let mut f = vec![HermitianAccumulator::zeros(n); blocks];
    for ((ct, gt), &l) in c.iter().zip(g).zip(assignment) {
        let d: Vec<(i32, i32)> = ct
            .symbols
            .iter()
            .zip(&gt.symbols)
            .map(|(&a, &b)| lattice_diff(a, b, h))
            .collect();
        f[l].add_outer(&d, lattice_scale(h));
    }
    Ok(f)
}

/// `K(d) = C(2d - 1, d) / 2^(2d)`.
pub fn k_coefficient(d: usize) -> Result<BigRational> {
    if d < 1 {
        return Err(Error::OutOfRange(format!("K(d) needs d >= 1, got {d}")));
    }
    let mut c = BigInt::one();
    // C(2d-1, d) = prod_{i=1..d} (d - 1 + i) / i
    for i in 1..=d {
        c = c * BigInt::from(d - 1 + i) / BigInt::from(i);
    }
    Ok(BigRational::new(c, BigInt::one() << (2 * d)))
}

pub fn k_coefficient_f64(d: usize) -> Result<f64> {
    Ok(k_coefficient(d)?.to_f64().unwrap_or(0.0))
}

/// `K(m eta) product^(-m) (Es / 4N0)^(-m eta)`.
pub fn asymptotic_pep_weight(event: &PairwiseEvent, m: usize, es_n0: f64) -> Result<f64> {
    if event.eta == 0 {
        return Err(Error::ZeroDiversity);
    }
    let k = k_coefficient_f64(m * event.eta)?;
    let p = event.eigen_product.to_f64().unwrap_or(f64::INFINITY);
    Ok(k * p.powi(-(m as i32)) * (es_n0 / 4.0).powi(-((m * event.eta) as i32)))
}

/// `prod_i (1 + gamma lambda_i) = sum_k e_k gamma^k` for one block.
pub fn block_chernoff_factor(e: &[i128], gamma: f64) -> f64 {
    let mut acc = 0.0;
    let mut g = 1.0;
    for &c in e {
        acc += c as f64 * g;
        g *= gamma;
    }
    acc
}

/// `prod_l prod_i (1 + gamma lambda_i^(l))^(-m)` from block coefficients.
pub fn chernoff_factor(blocks: &[Vec<i128>], m: usize, gamma: f64) -> f64 {
    blocks
        .iter()
        .map(|e| block_chernoff_factor(e, gamma).powi(-(m as i32)))
        .product()
}

/// `(1/2) sum w prod_{l,i} (1 + (Es/4N0) lambda)^(-m)` over weighted events.
pub fn chernoff_union_bound(events: &[(f64, PairwiseEvent)], m: usize, es_n0: f64) -> f64 {
    let gamma = es_n0 / 4.0;
    0.5 * events
        .iter()
        .map(|(w, ev)| w * chernoff_factor(&ev.block_coefficients(), m, gamma))
        .sum::<f64>()
}

/// Writes one CSV row per distinct `F` tuple: diversity, eigen product,
/// summed multiplicity and the smallest Hamming weight seen.
pub fn write_event_inventory<W: Write>(out: &mut W, events: &[(f64, PairwiseEvent)]) -> Result<()> {
    let mut rows: BTreeMap<Vec<HermitianAccumulator>, (usize, BigUint, f64, u32)> = BTreeMap::new();
    for (w, ev) in events {
        let e = rows
            .entry(ev.f.clone())
            .or_insert((ev.eta, ev.eigen_product.clone(), 0.0, u32::MAX));
        e.2 += w;
        e.3 = e.3.min(ev.hamming_weight);
    }
    writeln!(out, "eta,eigen_product,multiplicity,hamming_weight,blocks")?;
    for (f, (eta, p, w, hw)) in rows {
        let blocks: Vec<String> = f.iter().map(|x| x.to_string()).collect();
        writeln!(out, "{eta},{p},{w},{hw},\"{}\"", blocks.join(";"))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn appendix_event() -> PairwiseEvent {
        PairwiseEvent::new(vec![HermitianAccumulator::from_real_rows(&[&[4, 4], &[4, 8]])], 3).unwrap()
    }

    #[test]
    fn k_values() {
        assert_eq!(k_coefficient(1).unwrap(), BigRational::new(BigInt::from(1), BigInt::from(4)));
        assert_eq!(k_coefficient(2).unwrap(), BigRational::new(BigInt::from(3), BigInt::from(16)));
        assert_eq!(k_coefficient(4).unwrap(), BigRational::new(BigInt::from(35), BigInt::from(256)));
        assert!(k_coefficient(0).is_err());
    }

    #[test]
    fn appendix_weight() {
        let w = asymptotic_pep_weight(&appendix_event(), 1, 4.0).unwrap();
        assert!((w - 3.0 / 256.0).abs() < 1e-15);
    }

    #[test]
    fn zero_event_rejected() {
        let ev = PairwiseEvent::new(vec![HermitianAccumulator::zeros(2)], 0).unwrap();
        assert_eq!(asymptotic_pep_weight(&ev, 1, 1.0), Err(Error::ZeroDiversity));
        assert_eq!(chernoff_union_bound(&[(0.3, ev)], 2, 10.0), 0.15);
    }

    #[test]
    fn chernoff_matches_eigenvalues() {
        let ev = appendix_event();
        let g = 2.5;
        let l1 = 6.0 - 20f64.sqrt();
        let l2 = 6.0 + 20f64.sqrt();
        let want = 0.5 * ((1.0 + g * l1) * (1.0 + g * l2)).powi(-2);
        let got = chernoff_union_bound(&[(1.0, ev)], 2, 4.0 * g);
        assert!((got - want).abs() / want < 1e-12);
    }

    #[test]
    fn accumulate_matches_words() {
        use crate::modulation::SuperSymbol;
        let c: Vec<SuperSymbol> = [0b10u32, 0b11, 0b00].iter().map(|&w| SuperSymbol::from_word(w, 2, 1)).collect();
        let g: Vec<SuperSymbol> = [0b00u32; 3].iter().map(|&w| SuperSymbol::from_word(w, 2, 1)).collect();
        let f = accumulate_F(&c, &g, &[0, 0, 0], 1).unwrap();
        assert_eq!(f[0], HermitianAccumulator::from_real_rows(&[&[4, 4], &[4, 8]]));
        let f2 = accumulate_F(&c, &g, &[0, 1, 0], 1).unwrap();
        assert_eq!(f2.len(), 2);
        assert_eq!(PairwiseEvent::new(f2, 3).unwrap().eta, 2);
    }

    #[test]
    fn inventory_csv() {
        let mut buf = Vec::new();
        write_event_inventory(&mut buf, &[(0.5, appendix_event()), (0.25, appendix_event())]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().nth(1).unwrap(), "2,16,0.75,3,\"[[4,4],[4,8]]\"");
    }
}
