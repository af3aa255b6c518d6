//! Exact non-negative dyadic rationals `mant / 2^exp`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weights of the transfer function: every branch contributes a factor
/// `2^-k`, so sums of path weights stay dyadic.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Dyadic {
    mant: u128,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { mant: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { mant: 1, exp: 0 };

    pub fn new(mant: u128, exp: u32) -> Self {
        Self { mant, exp }.normalized()
    }

    fn normalized(mut self) -> Self {
        if self.mant == 0 {
            return Self::ZERO;
        }
        let tz = self.mant.trailing_zeros().min(self.exp);
        self.mant >>= tz;
        self.exp -= tz;
        self
    }

    pub fn mantissa(&self) -> u128 {
        self.mant
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant == 0
    }

    /// Multiplies by `2^-k`.
    #[inline]
    pub fn shr(self, k: u32) -> Self {
        if self.mant == 0 {
            return self;
        }
        Self {
            mant: self.mant,
            exp: self.exp + k,
        }
    }

    pub fn checked_add(self, o: Self) -> Result<Self> {
        if o.mant == 0 {
            return Ok(self);
        }
        if self.mant == 0 {
            return Ok(o);
        }
        let exp = self.exp.max(o.exp);
        let a = shl_checked(self.mant, exp - self.exp)?;
        let b = shl_checked(o.mant, exp - o.exp)?;
        let mant = a.checked_add(b).ok_or(Error::WeightOverflow)?;
        Ok(Self { mant, exp }.normalized())
    }

    pub fn checked_mul(self, o: Self) -> Result<Self> {
        let mant = self.mant.checked_mul(o.mant).ok_or(Error::WeightOverflow)?;
        Ok(Self {
            mant,
            exp: self.exp + o.exp,
        }
        .normalized())
    }

    pub fn to_f64(&self) -> f64 {
        self.mant as f64 * (-(self.exp as f64)).exp2()
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.mant), BigInt::one() << self.exp as usize)
    }
}

fn shl_checked(x: u128, s: u32) -> Result<u128> {
    if s == 0 {
        return Ok(x);
    }
    if s >= 128 || x.leading_zeros() < s {
        return Err(Error::WeightOverflow);
    }
    Ok(x << s)
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.mant)
        } else {
            write!(f, "{}/2^{}", self.mant, self.exp)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn addition_normalizes() {
        let h = Dyadic::ONE.shr(1);
        assert_eq!(h.checked_add(h).unwrap(), Dyadic::ONE);
        let q = Dyadic::ONE.shr(2);
        let s = h.checked_add(q).unwrap();
        assert_eq!((s.mantissa(), s.exponent()), (3, 2));
        assert_eq!(s.to_f64(), 0.75);
        assert_eq!(s.to_string(), "3/2^2");
    }

    #[test]
    fn zero_identities() {
        let x = Dyadic::new(5, 3);
        assert_eq!(x.checked_add(Dyadic::ZERO).unwrap(), x);
        assert_eq!(Dyadic::ZERO.checked_add(x).unwrap(), x);
        assert!(Dyadic::ZERO.shr(4).is_zero());
    }

    #[test]
    fn overflow_reported() {
        let big = Dyadic::new(u128::MAX, 0);
        assert_eq!(big.checked_add(Dyadic::ONE), Err(Error::WeightOverflow));
        let tiny = Dyadic::new(1, 200);
        assert_eq!(big.checked_add(tiny), Err(Error::WeightOverflow));
    }

    #[test]
    fn rational_value() {
        let x = Dyadic::new(12, 4);
        assert_eq!(x.to_rational(), BigRational::new(3.into(), 4.into()));
    }
}
