//! Rank and nonzero-eigenvalue product from principal-minor sums.
//!
//! For a Hermitian `X` the characteristic polynomial is
//! `det(tI + X) = sum_k e_k t^(n-k)` with `e_k` the sum of all `k x k`
//! principal minors, which equals the `k`-th elementary symmetric function
//! of the eigenvalues. For non-negative definite `X` the rank is the largest
//! `k` with `e_k != 0` and `e_rank` is the product of the nonzero eigenvalues.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hermitian::{packed_entry, HermitianAccumulator};
use crate::error::{Error, Result};

/// Rank, exact eigen product and optional floating eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSummary {
    pub rank: usize,
    /// Product of the nonzero eigenvalues; 1 for the zero matrix.
    pub product: i128,
    pub eigenvalues: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Gi {
    re: i128,
    im: i128,
}

impl Gi {
    const ZERO: Gi = Gi { re: 0, im: 0 };

    fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    fn mul(self, o: Gi) -> Gi {
        Gi {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }

    fn sub(self, o: Gi) -> Gi {
        Gi {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }

    fn neg(self) -> Gi {
        Gi {
            re: -self.re,
            im: -self.im,
        }
    }

    /// Division known to be exact.
    fn div_exact(self, o: Gi) -> Gi {
        let nrm = o.re * o.re + o.im * o.im;
        let re = self.re * o.re + self.im * o.im;
        let im = self.im * o.re - self.re * o.im;
        debug_assert!(re % nrm == 0 && im % nrm == 0, "inexact Bareiss step");
        Gi {
            re: re / nrm,
            im: im / nrm,
        }
    }
}

/// Fraction-free Gaussian elimination; `a` is a row-major `k x k` matrix.
fn bareiss_det(a: &mut [Gi], k: usize) -> Gi {
    if k == 0 {
        return Gi { re: 1, im: 0 };
    }
    let mut sign = false;
    let mut prev = Gi { re: 1, im: 0 };
    for c in 0..k - 1 {
        if a[c * k + c].is_zero() {
            match (c + 1..k).find(|&r| !a[r * k + c].is_zero()) {
                Some(r) => {
                    for j in 0..k {
                        a.swap(c * k + j, r * k + j);
                    }
                    sign = !sign;
                }
                None => return Gi::ZERO,
            }
        }
        let piv = a[c * k + c];
        for i in c + 1..k {
            for j in c + 1..k {
                let v = a[i * k + j].mul(piv).sub(a[i * k + c].mul(a[c * k + j]));
                a[i * k + j] = v.div_exact(prev);
            }
        }
        prev = piv;
    }
    let d = a[k * k - 1];
    if sign {
        d.neg()
    } else {
        d
    }
}

/// `e_0 ..= e_n` of an `n x n` packed Hermitian matrix.
pub fn principal_minor_sums_packed(n: usize, data: &[i32]) -> Vec<i128> {
    let mut e = vec![0i128; n + 1];
    e[0] = 1;
    match n {
        0 => {}
        1 => e[1] = data[0] as i128,
        2 => {
            let (a, d) = (data[0] as i128, data[1] as i128);
            let (br, bi) = (data[2] as i128, data[3] as i128);
            e[1] = a + d;
            e[2] = a * d - br * br - bi * bi;
        }
        _ => {
            let mut buf = Vec::with_capacity(n * n);
            let mut idx = Vec::with_capacity(n);
            for mask in 1u32..(1 << n) {
                idx.clear();
                idx.extend((0..n).filter(|&i| mask >> i & 1 == 1));
                let k = idx.len();
                buf.clear();
                for &p in &idx {
                    for &q in &idx {
                        let (re, im) = packed_entry(n, data, p, q);
                        buf.push(Gi {
                            re: re as i128,
                            im: im as i128,
                        });
                    }
                }
                let d = bareiss_det(&mut buf, k);
                debug_assert_eq!(d.im, 0, "principal minor of a Hermitian matrix is real");
                e[k] += d.re;
            }
        }
    }
    e
}

/// `(rank, product)` from minor sums, checking non-negativity.
pub fn rank_and_product(e: &[i128]) -> Result<(usize, i128)> {
    let mut rank = 0;
    for (k, &v) in e.iter().enumerate().skip(1) {
        if v < 0 {
            return Err(Error::NotPositiveSemidefinite { order: k, value: v });
        }
        if v != 0 {
            rank = k;
        }
    }
    Ok((rank, e[rank]))
}

/// Fast `(rank, product)` of packed storage, without validation.
#[inline]
pub fn rank_product_packed(n: usize, data: &[i32]) -> (usize, i128) {
    if n == 2 {
        let (a, d) = (data[0] as i128, data[1] as i128);
        let det = a * d - (data[2] as i128).pow(2) - (data[3] as i128).pow(2);
        return if det != 0 {
            (2, det)
        } else if a + d != 0 {
            (1, a + d)
        } else {
            (0, 1)
        };
    }
    let e = principal_minor_sums_packed(n, data);
    let rank = e.iter().rposition(|&v| v != 0).unwrap_or(0);
    (rank, e[rank])
}

pub fn principal_minor_sums(x: &HermitianAccumulator) -> Vec<i128> {
    principal_minor_sums_packed(x.dim(), x.packed())
}

/// Exact rank and nonzero-eigenvalue product.
pub fn eigen_summary(x: &HermitianAccumulator) -> Result<EigenSummary> {
    let (rank, product) = rank_and_product(&principal_minor_sums(x))?;
    Ok(EigenSummary {
        rank,
        product,
        eigenvalues: None,
    })
}

/// [`eigen_summary`] plus floating eigenvalues in ascending order.
pub fn eigen_summary_with_values(x: &HermitianAccumulator) -> Result<EigenSummary> {
    let mut s = eigen_summary(x)?;
    s.eigenvalues = Some(eigenvalues(x));
    Ok(s)
}

/// Floating eigenvalues, ascending.
pub fn eigenvalues(x: &HermitianAccumulator) -> Vec<f64> {
    let n = x.dim();
    let m = DMatrix::<Complex64>::from_row_slice(n, n, &x.to_complex());
    let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Floating rank with threshold `lambda > 1e-9 * lambda_max`, and the
/// product of the retained eigenvalues.
pub fn floating_rank_product(x: &HermitianAccumulator) -> (usize, f64) {
    let v = eigenvalues(x);
    let max = v.iter().copied().fold(0.0, f64::max);
    let nz: Vec<f64> = v.into_iter().filter(|&l| l > 1e-9 * max && max > 0.0).collect();
    (nz.len(), nz.iter().product())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: &[&[i32]]) -> HermitianAccumulator {
        HermitianAccumulator::from_real_rows(rows)
    }

    #[test]
    fn rank_one_block() {
        let s = eigen_summary(&real(&[&[4, 4], &[4, 4]])).unwrap();
        assert_eq!((s.rank, s.product), (1, 8));
    }

    #[test]
    fn appendix_sum() {
        let s = eigen_summary_with_values(&real(&[&[4, 4], &[4, 8]])).unwrap();
        assert_eq!((s.rank, s.product), (2, 16));
        let ev = s.eigenvalues.unwrap();
        assert!((ev[0] - (6.0 - 20f64.sqrt())).abs() < 1e-12);
        assert!((ev[1] - (6.0 + 20f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let s = eigen_summary(&HermitianAccumulator::zeros(3)).unwrap();
        assert_eq!((s.rank, s.product), (0, 1));
    }

    #[test]
    fn not_psd() {
        let e = eigen_summary(&real(&[&[0, 4], &[4, 0]])).unwrap_err();
        assert!(matches!(e, Error::NotPositiveSemidefinite { order: 2, value: -16 }));
    }

    #[test]
    fn three_by_three_complex() {
        let mut x = HermitianAccumulator::zeros(3);
        x.add_outer(&[(2, 0), (0, 2), (2, 2)], 2);
        x.add_outer(&[(0, 2), (2, 0), (0, 0)], 2);
        let s = eigen_summary(&x).unwrap();
        assert_eq!(s.rank, 2);
        let (r, p) = floating_rank_product(&x);
        assert_eq!(r, 2);
        assert!((p - s.product as f64).abs() / p < 1e-10);
    }

    #[test]
    fn fast_path_agrees() {
        let x = real(&[&[4, 4], &[4, 8]]);
        assert_eq!(rank_product_packed(2, x.packed()), (2, 16));
        let mut y = HermitianAccumulator::zeros(4);
        y.add_outer(&[(2, 0), (0, 0), (-2, 0), (2, 0)], 1);
        assert_eq!(rank_product_packed(4, y.packed()), (1, 12));
    }

    #[test]
    fn bareiss_needs_pivot() {
        let x = real(&[&[0, 0, 0], &[0, 4, 4], &[0, 4, 8]]);
        let e = principal_minor_sums(&x);
        assert_eq!(e, vec![1, 12, 16, 0]);
    }
}
