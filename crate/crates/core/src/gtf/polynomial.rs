//! Polynomials in per-block indeterminates with matrix exponents.

use std::io::Write;

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use super::dyadic::Dyadic;
use crate::error::Result;
use crate::pep::{rank_product_packed, HermitianAccumulator};

/// Exponent of one monomial: `L` packed Hermitian blocks plus the
/// accumulated bit Hamming weight of the error event.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermKey {
    pub blocks: SmallVec<[i32; 32]>,
    pub hw: u32,
}

impl TermKey {
    pub fn zero(n: usize, l: usize) -> Self {
        Self {
            blocks: SmallVec::from_elem(0, n * n * l),
            hw: 0,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.hw == 0 && self.blocks.iter().all(|&x| x == 0)
    }

    pub fn block(&self, n: usize, l: usize) -> &[i32] {
        &self.blocks[l * n * n..(l + 1) * n * n]
    }

    pub fn num_blocks(&self, n: usize) -> usize {
        self.blocks.len() / (n * n)
    }

    pub fn matrices(&self, n: usize) -> Vec<HermitianAccumulator> {
        self.blocks
            .chunks(n * n)
            .map(|c| HermitianAccumulator::from_packed(n, c))
            .collect()
    }

    /// Per-block ranks and the total diversity with the float product of
    /// the nonzero-eigenvalue products.
    pub fn diversity(&self, n: usize) -> (usize, f64) {
        let mut eta = 0;
        let mut prod = 1.0;
        for c in self.blocks.chunks(n * n) {
            let (r, p) = rank_product_packed(n, c);
            eta += r;
            prod *= p as f64;
        }
        (eta, prod)
    }
}

/// The transfer function: exact weights keyed by matrix exponents.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MatrixExponentPolynomial {
    pub n: usize,
    pub blocks: usize,
    pub terms: FxHashMap<TermKey, Dyadic>,
}

impl MatrixExponentPolynomial {
    pub fn new(n: usize, blocks: usize) -> Self {
        Self {
            n,
            blocks,
            terms: FxHashMap::default(),
        }
    }

    /// The polynomial `1 = D^O`.
    pub fn one(n: usize, blocks: usize) -> Self {
        let mut p = Self::new(n, blocks);
        p.terms.insert(TermKey::zero(n, blocks), Dyadic::ONE);
        p
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `a D^A + b D^A = (a + b) D^A`.
    pub fn add_term(&mut self, key: TermKey, w: Dyadic) -> Result<()> {
        if w.is_zero() {
            return Ok(());
        }
        let e = self.terms.entry(key).or_insert(Dyadic::ZERO);
        *e = e.checked_add(w)?;
        Ok(())
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        for (k, &w) in &other.terms {
            self.add_term(k.clone(), w)?;
        }
        Ok(())
    }

    /// Removes and returns the weight of the constant term.
    pub fn take_constant(&mut self) -> Dyadic {
        let z = TermKey::zero(self.n, self.blocks);
        self.terms.remove(&z).unwrap_or(Dyadic::ZERO)
    }

    pub fn weight(&self, key: &TermKey) -> Dyadic {
        self.terms.get(key).copied().unwrap_or(Dyadic::ZERO)
    }

    /// Terms in a canonical order: Hamming weight, then exponent.
    pub fn sorted_terms(&self) -> Vec<(&TermKey, Dyadic)> {
        let mut v: Vec<(&TermKey, Dyadic)> = self.terms.iter().map(|(k, &w)| (k, w)).collect();
        v.sort_by(|a, b| (a.0.hw, a.0).cmp(&(b.0.hw, b.0)));
        v
    }

    /// Text dump, one term per line:
    /// `weight hw blocks ranks eigen_product`.
    pub fn dump<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "# weight\thw\tblocks\tranks\teigen_product")?;
        for (k, w) in self.sorted_terms() {
            let mats = k.matrices(self.n);
            let blocks: Vec<String> = mats.iter().map(|m| m.to_string()).collect();
            let ranks: Vec<String> = k
                .blocks
                .chunks(self.n * self.n)
                .map(|c| rank_product_packed(self.n, c).0.to_string())
                .collect();
            let prod: i128 = k
                .blocks
                .chunks(self.n * self.n)
                .map(|c| rank_product_packed(self.n, c).1)
                .product();
            writeln!(
                out,
                "{w}\t{}\t{}\t({})\t{prod}",
                k.hw,
                blocks.join(" "),
                ranks.join(",")
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_like_terms() {
        let mut p = MatrixExponentPolynomial::new(2, 1);
        let mut k = TermKey::zero(2, 1);
        k.blocks[0] = 4;
        k.hw = 1;
        p.add_term(k.clone(), Dyadic::ONE.shr(1)).unwrap();
        p.add_term(k.clone(), Dyadic::ONE.shr(1)).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.weight(&k), Dyadic::ONE);
    }

    #[test]
    fn constant_term() {
        let mut p = MatrixExponentPolynomial::one(2, 2);
        assert!(p.terms.keys().next().unwrap().is_constant());
        assert_eq!(p.take_constant(), Dyadic::ONE);
        assert!(p.is_empty());
    }

    #[test]
    fn diversity_of_key() {
        let mut k = TermKey::zero(2, 2);
        k.blocks[..4].copy_from_slice(&[4, 8, 4, 0]);
        k.blocks[4..].copy_from_slice(&[4, 4, 4, 0]);
        assert_eq!(k.diversity(2), (3, 16.0 * 8.0));
    }

    #[test]
    fn dump_format() {
        let mut p = MatrixExponentPolynomial::new(2, 1);
        let mut k = TermKey::zero(2, 1);
        k.blocks.copy_from_slice(&[4, 8, 4, 0]);
        k.hw = 3;
        p.add_term(k, Dyadic::ONE).unwrap();
        let mut buf = Vec::new();
        p.dump(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().nth(1).unwrap(), "1\t3\t[[4,4],[4,8]]\t(2)\t16");
    }
}
