//! Truncated p-adic integers: base-p digit vectors of fixed precision
//! with exact valuation bookkeeping.

use crate::arith::is_prime_u64;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Valuation of a truncated p-adic integer: exact when a nonzero digit
/// is visible, otherwise only a lower bound at the precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Valuation {
    Exact(u32),
    AtLeast(u32),
}

impl Valuation {
    /// Whether the valuation is certainly >= bound, certainly not, or
    /// unknowable at this precision.
    pub fn at_least(&self, bound: u64) -> Option<bool> {
        match self {
            Valuation::Exact(v) => Some(*v as u64 >= bound),
            Valuation::AtLeast(n) => {
                if *n as u64 >= bound {
                    Some(true)
                } else {
                    None
                }
            }
        }
    }
}

/// An element of Z_p known modulo p^N, digits little-endian.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicInt {
    p: u64,
    digits: Vec<u64>,
}

impl PadicInt {
    pub fn new(p: u64, precision: u32, value: &BigInt) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        let pb = BigInt::from(p);
        let modulus = pb.pow(precision);
        let mut v = value % &modulus;
        if v.is_negative() {
            v += &modulus;
        }
        let mut digits = Vec::with_capacity(precision as usize);
        for _ in 0..precision {
            let d = (&v % &pb).to_u64().expect("digit fits");
            digits.push(d);
            v /= &pb;
        }
        Ok(PadicInt { p, digits })
    }

    pub fn zero(p: u64, precision: u32) -> Self {
        PadicInt {
            p,
            digits: vec![0; precision as usize],
        }
    }

    pub fn one(p: u64, precision: u32) -> Self {
        Self::p_pow(p, precision, 0)
    }

    /// p^e at the working precision; exponents at or beyond the
    /// precision leave only the "congruent to zero" information.
    pub fn p_pow(p: u64, precision: u32, e: u64) -> Self {
        let mut digits = vec![0; precision as usize];
        if e < precision as u64 {
            digits[e as usize] = 1;
        }
        PadicInt { p, digits }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.digits.len() as u32
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn from_digits(p: u64, digits: Vec<u64>) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        if digits.iter().any(|&d| d >= p) {
            return Err(Error::BadInput(format!("digit out of range for p = {p}")));
        }
        Ok(PadicInt { p, digits })
    }

    pub fn to_bigint(&self) -> BigInt {
        let pb = BigInt::from(self.p);
        let mut acc = BigInt::zero();
        for d in self.digits.iter().rev() {
            acc = acc * &pb + BigInt::from(*d);
        }
        acc
    }

    pub fn valuation(&self) -> Valuation {
        match self.digits.iter().position(|&d| d != 0) {
            Some(i) => Valuation::Exact(i as u32),
            None => Valuation::AtLeast(self.precision()),
        }
    }

    pub fn is_zero_at_precision(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    fn binop(&self, rhs: &PadicInt, f: impl Fn(BigInt, BigInt) -> BigInt) -> PadicInt {
        assert_eq!(self.p, rhs.p, "mixed primes");
        assert_eq!(self.precision(), rhs.precision(), "mixed precisions");
        PadicInt::new(self.p, self.precision(), &f(self.to_bigint(), rhs.to_bigint()))
            .expect("prime already validated")
    }

    pub fn add(&self, rhs: &PadicInt) -> PadicInt {
        self.binop(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &PadicInt) -> PadicInt {
        self.binop(rhs, |a, b| a - b)
    }

    pub fn mul(&self, rhs: &PadicInt) -> PadicInt {
        self.binop(rhs, |a, b| a * b)
    }

    pub fn neg(&self) -> PadicInt {
        PadicInt::new(self.p, self.precision(), &-self.to_bigint()).expect("prime validated")
    }

    /// Multiply by p^e: digits shift up, top digits fall off.
    pub fn shift_up(&self, e: u64) -> PadicInt {
        let n = self.digits.len();
        let mut digits = vec![0; n];
        for i in 0..n {
            if (i as u64) >= e {
                digits[i] = self.digits[i - e as usize];
            }
        }
        PadicInt { p: self.p, digits }
    }

    /// Exact division by p^e; fails when a digit below e is nonzero. The
    /// top e digits of the result are unknown and recorded as zero, so
    /// precision honestly shrinks; callers guard with the valuation.
    pub fn shift_down(&self, e: u64) -> Result<PadicInt> {
        if self.digits.iter().take(e.min(u32::MAX as u64) as usize).any(|&d| d != 0) {
            return Err(Error::BadInput(format!(
                "not divisible by p^{e} at this precision"
            )));
        }
        let n = self.digits.len();
        let mut digits = vec![0; n];
        for i in 0..n {
            let src = i as u64 + e;
            if src < n as u64 {
                digits[i] = self.digits[src as usize];
            }
        }
        Ok(PadicInt { p: self.p, digits })
    }
}

impl std::fmt::Debug for PadicInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}(mod {}^{})", self.to_bigint(), self.p, self.precision())
    }
}
