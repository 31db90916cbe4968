//! Prime fields `F_p`.
//!
//! Scalars are stored as plain `u32` residues in `0..p`; the [`PrimeField`]
//! value carries the modulus and performs the arithmetic. All homology in the
//! crate is computed over one of these fields, `F_2` by default.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A residue modulo the field's prime.
pub type Scalar = u32;

/// The prime field `F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    /// `F_2`.
    pub const TWO: PrimeField = PrimeField { p: 2 };

    /// Builds `F_p`, rejecting composite or oversized moduli.
    pub fn new(p: u32) -> Result<Self> {
        if !(2..=46_337).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidField(p));
        }
        Ok(PrimeField { p })
    }

    pub fn characteristic(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(self, x: i64) -> Scalar {
        x.rem_euclid(self.p as i64) as Scalar
    }

    #[inline]
    pub fn add(self, a: Scalar, b: Scalar) -> Scalar {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: Scalar, b: Scalar) -> Scalar {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: Scalar) -> Scalar {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: Scalar, b: Scalar) -> Scalar {
        (a * b) % self.p
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self, a: Scalar) -> Scalar {
        assert!(a != 0, "zero has no inverse");
        // a^(p-2)
        let mut base = a % self.p;
        let mut exp = self.p - 2;
        let mut acc = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// `(-1)^k` as a field element.
    #[inline]
    pub fn sign(self, k: usize) -> Scalar {
        if k.is_multiple_of(2) {
            1
        } else {
            self.neg(1)
        }
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField::TWO
    }
}

impl TryFrom<u32> for PrimeField {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        PrimeField::new(p)
    }
}

impl From<PrimeField> for u32 {
    fn from(f: PrimeField) -> u32 {
        f.p
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}
