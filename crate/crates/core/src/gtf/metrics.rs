//! Diversity and performance factor of a transfer function.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::dyadic::Dyadic;
use super::polynomial::MatrixExponentPolynomial;
use crate::error::{Error, Result};
use crate::pep::{chernoff_factor, k_coefficient_f64, principal_minor_sums_packed, rank_and_product};

/// Exact summary of one polynomial term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermSummary {
    pub weight: Dyadic,
    pub hamming_weight: u32,
    pub ranks: Vec<usize>,
    pub eta: usize,
    pub product: BigUint,
    /// Characteristic coefficients `e_0..=e_n` of each block.
    pub coefficients: Vec<Vec<i128>>,
}

impl TermSummary {
    pub fn product_f64(&self) -> f64 {
        self.product.to_f64().unwrap_or(f64::INFINITY)
    }
}

/// Ranking key of a code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeMetrics {
    pub eta_min: usize,
    /// Receive antennas the performance factor was evaluated for.
    pub m: usize,
    /// `frame_multiplier * sum w product^-m` over retained minimum-diversity terms.
    pub f_min: f64,
    pub frame_multiplier: f64,
    /// Smallest eigen product among minimum-diversity terms.
    pub min_product: f64,
    /// Minimum-diversity terms kept after the `delta_P` filter.
    pub min_terms: usize,
    pub terms: Vec<TermSummary>,
    pub delta_p: Option<f64>,
}

impl CodeMetrics {
    /// `F_min / frame_multiplier`, the per-frame-length value tables report.
    pub fn f_min_per_frame(&self) -> f64 {
        self.f_min / self.frame_multiplier
    }

    /// Achieved diversity order `eta_min * m`.
    pub fn diversity_order(&self) -> usize {
        self.eta_min * self.m
    }

    fn selected(&self) -> impl Iterator<Item = &TermSummary> {
        let limit = self.delta_p.map(|dp| dp * self.min_product);
        self.terms
            .iter()
            .filter(move |t| t.eta == self.eta_min && limit.is_none_or(|l| t.product_f64() <= l))
    }

    /// Exact `F_min / frame_multiplier` as a rational.
    pub fn f_min_exact_per_frame(&self) -> BigRational {
        let mut acc = BigRational::zero();
        for t in self.selected() {
            let p = BigInt::from(t.product.clone()).pow(self.m as u32);
            acc += t.weight.to_rational() / BigRational::from_integer(p);
        }
        acc
    }

    /// `K(m eta_min) F_min (Es/4N0)^(-m eta_min)`.
    pub fn asymptotic_bound(&self, es_n0: f64) -> f64 {
        let d = self.diversity_order();
        k_coefficient_f64(d).unwrap_or(0.0) * self.f_min * (es_n0 / 4.0).powi(-(d as i32))
    }

    /// Chernoff union bound over every term, scaled by the frame multiplier.
    pub fn chernoff_bound(&self, es_n0: f64) -> f64 {
        let g = es_n0 / 4.0;
        0.5 * self.frame_multiplier
            * self
                .terms
                .iter()
                .map(|t| t.weight.to_f64() * chernoff_factor(&t.coefficients, self.m, g))
                .sum::<f64>()
    }
}

/// Summarizes every term of `poly` exactly.
pub fn term_summaries(poly: &MatrixExponentPolynomial) -> Result<Vec<TermSummary>> {
    let n = poly.n;
    let mut out = Vec::with_capacity(poly.len());
    for (k, w) in poly.sorted_terms() {
        let mut ranks = Vec::with_capacity(poly.blocks);
        let mut coefficients = Vec::with_capacity(poly.blocks);
        let mut product = BigUint::from(1u32);
        for c in k.blocks.chunks(n * n) {
            let e = principal_minor_sums_packed(n, c);
            let (r, p) = rank_and_product(&e)?;
            ranks.push(r);
            product *= BigUint::try_from(p).expect("non-negative product");
            coefficients.push(e);
        }
        out.push(TermSummary {
            weight: w,
            hamming_weight: k.hw,
            eta: ranks.iter().sum(),
            ranks,
            product,
            coefficients,
        });
    }
    Ok(out)
}

/// Extracts `eta_min` and `F_min(m)`.
///
/// Among minimum-diversity terms only those with eigen product at most
/// `delta_p` times the smallest one count towards `F_min`.
pub fn code_metrics(
    poly: &MatrixExponentPolynomial,
    m: usize,
    frame_multiplier: f64,
    delta_p: Option<f64>,
) -> Result<CodeMetrics> {
    let terms = term_summaries(poly)?;
    let eta_min = terms
        .iter()
        .map(|t| t.eta)
        .filter(|&e| e > 0)
        .min()
        .ok_or(Error::ZeroDiversity)?;
    let min_product = terms
        .iter()
        .filter(|t| t.eta == eta_min)
        .map(TermSummary::product_f64)
        .fold(f64::INFINITY, f64::min);
    let mut cm = CodeMetrics {
        eta_min,
        m,
        f_min: 0.0,
        frame_multiplier,
        min_product,
        min_terms: 0,
        terms,
        delta_p,
    };
    let mut f = 0.0;
    let mut count = 0;
    for t in cm.selected() {
        f += t.weight.to_f64() * t.product_f64().powi(-(m as i32));
        count += 1;
    }
    cm.f_min = f * frame_multiplier;
    cm.min_terms = count;
    Ok(cm)
}
