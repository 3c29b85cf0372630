//! Sequences (a_0, a_1, ...) of p-adic integers with an eventually
//! symbolic tail: beyond an explicit prefix, a_k is exactly p^{v(k)} for
//! an affine valuation law v, or exactly zero. All the subgroup
//! memberships the completion model needs are decidable from this data.

use super::int::{PadicInt, Valuation};
use crate::affine::Affine;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValTail {
    /// a_k = p^{alpha k + beta} for k past the prefix; the law is kept
    /// nonnegative on that range by normalization.
    Affine(Affine),
    /// a_k = 0 past the prefix.
    Zero,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValSeq {
    p: u64,
    precision: u32,
    prefix: Vec<PadicInt>,
    tail: ValTail,
}

impl ValSeq {
    /// Normalizing constructor: extends the prefix until the affine law
    /// is nonnegative from there on, so tail entries are literally
    /// p^{alpha k + beta}.
    pub fn new(p: u64, precision: u32, prefix: Vec<PadicInt>, tail: ValTail) -> Result<Self> {
        for e in &prefix {
            if e.prime() != p {
                return Err(Error::Mismatch("prefix entry has a different prime".into()));
            }
            if e.precision() != precision {
                return Err(Error::Mismatch("prefix entry has a different precision".into()));
            }
        }
        let mut s = ValSeq {
            p,
            precision,
            prefix,
            tail,
        };
        if let ValTail::Affine(law) = s.tail {
            if law.is_always_zero() {
                s.tail = ValTail::Affine(Affine::new(0, 0));
            } else {
                let from = law.nonnegative_from();
                while (s.prefix.len() as u64) < from {
                    let k = s.prefix.len() as u64;
                    s.prefix.push(PadicInt::p_pow(p, precision, law.eval(k)));
                }
            }
        }
        Ok(s)
    }

    pub fn constant_ones(p: u64, precision: u32) -> Self {
        ValSeq::new(p, precision, Vec::new(), ValTail::Affine(Affine::new(0, 0)))
            .expect("constant law is normal")
    }

    pub fn zero(p: u64, precision: u32) -> Self {
        ValSeq::new(p, precision, Vec::new(), ValTail::Zero).expect("zero tail is normal")
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn prefix(&self) -> &[PadicInt] {
        &self.prefix
    }

    pub fn tail(&self) -> &ValTail {
        &self.tail
    }

    pub fn entry(&self, k: u64) -> PadicInt {
        if (k as usize) < self.prefix.len() {
            return self.prefix[k as usize].clone();
        }
        match &self.tail {
            ValTail::Zero => PadicInt::zero(self.p, self.precision),
            ValTail::Affine(law) => PadicInt::p_pow(self.p, self.precision, law.eval(k)),
        }
    }

    /// Valuation of entry k; tail entries are symbolic, so their
    /// valuation is exact even past the precision. Zero-tail entries are
    /// reported as exactly divisible by everything.
    pub fn entry_valuation(&self, k: u64) -> Option<Valuation> {
        if (k as usize) < self.prefix.len() {
            return Some(self.prefix[k as usize].valuation());
        }
        match &self.tail {
            ValTail::Zero => None,
            ValTail::Affine(law) => {
                let v = law.eval(k);
                Some(if v <= u32::MAX as u64 {
                    Valuation::Exact(v as u32)
                } else {
                    Valuation::Exact(u32::MAX)
                })
            }
        }
    }

    /// The same sequence with at least `len` explicit entries.
    pub fn with_prefix_len(&self, len: u64) -> ValSeq {
        let mut prefix = self.prefix.clone();
        while (prefix.len() as u64) < len {
            prefix.push(self.entry(prefix.len() as u64));
        }
        ValSeq {
            p: self.p,
            precision: self.precision,
            prefix,
            tail: self.tail.clone(),
        }
    }

    /// Multiply every entry by p^e. Prefix entries shift inside their
    /// precision window; the symbolic tail shifts exactly.
    pub fn scale_p_pow(&self, e: u64) -> ValSeq {
        let prefix = self.prefix.iter().map(|x| x.shift_up(e)).collect();
        let tail = match &self.tail {
            ValTail::Zero => ValTail::Zero,
            ValTail::Affine(law) => ValTail::Affine(law.shifted(e as i64)),
        };
        ValSeq::new(self.p, self.precision, prefix, tail)
            .expect("scaling preserves normal form")
    }

    /// Entrywise difference. Supported when the tails cancel exactly
    /// (equal laws) or the subtrahend's tail is zero; anything else has
    /// no representation in this form.
    pub fn sub(&self, rhs: &ValSeq) -> Result<ValSeq> {
        if self.p != rhs.p || self.precision != rhs.precision {
            return Err(Error::Mismatch("sequence shapes differ".into()));
        }
        let tail = match (&self.tail, &rhs.tail) {
            (t, ValTail::Zero) => t.clone(),
            (ValTail::Affine(f), ValTail::Affine(g)) if f == g => ValTail::Zero,
            _ => {
                return Err(Error::Unsupported(
                    "difference of unrelated tails is not a unit p-power tail".into(),
                ))
            }
        };
        let len = self.prefix.len().max(rhs.prefix.len());
        let prefix = (0..len as u64)
            .map(|k| self.entry(k).sub(&rhs.entry(k)))
            .collect();
        ValSeq::new(self.p, self.precision, prefix, tail)
    }

    /// Equality as sequences: entrywise to the common explicit range and
    /// by law beyond it.
    pub fn eq_seq(&self, rhs: &ValSeq) -> bool {
        if self.p != rhs.p || self.precision != rhs.precision {
            return false;
        }
        let len = self.prefix.len().max(rhs.prefix.len());
        if (0..len as u64).any(|k| self.entry(k) != rhs.entry(k)) {
            return false;
        }
        match (&self.tail, &rhs.tail) {
            (ValTail::Zero, ValTail::Zero) => true,
            (ValTail::Affine(f), ValTail::Affine(g)) => f == g,
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn normalization_materializes_negative_region() {
        // law 2k - 3 is negative at k = 0, 1: entries become p^0 = 1
        let s = ValSeq::new(2, 8, vec![], ValTail::Affine(Affine::new(2, -3))).unwrap();
        assert_eq!(s.prefix().len(), 2);
        assert_eq!(s.entry(0).to_bigint(), BigInt::from(1));
        assert_eq!(s.entry(1).to_bigint(), BigInt::from(1));
        assert_eq!(s.entry(2).to_bigint(), BigInt::from(2));
        assert_eq!(s.entry(5).to_bigint(), BigInt::from(128));
    }

    #[test]
    fn scaling_shifts_tail_law() {
        let s = ValSeq::new(3, 6, vec![], ValTail::Affine(Affine::new(1, 0))).unwrap();
        let t = s.scale_p_pow(2);
        assert_eq!(t.entry(1).to_bigint(), BigInt::from(27));
        match t.tail() {
            ValTail::Affine(law) => assert_eq!(*law, Affine::new(1, 2)),
            _ => panic!("expected affine tail"),
        }
    }

    #[test]
    fn subtraction_with_matching_tails() {
        let s = ValSeq::new(2, 8, vec![], ValTail::Affine(Affine::new(1, 0))).unwrap();
        let t = s.scale_p_pow(1);
        // s - s has zero tail and zero prefix
        let d = s.sub(&s).unwrap();
        assert!(matches!(d.tail(), ValTail::Zero));
        assert!(d.entry(0).is_zero_at_precision());
        // s - t has mismatched tails
        assert!(s.sub(&t).is_err());
    }

    #[test]
    fn sequence_equality_sees_through_prefix_length() {
        let law = ValTail::Affine(Affine::new(1, 0));
        let a = ValSeq::new(2, 8, vec![], law.clone()).unwrap();
        let b = ValSeq::new(
            2,
            8,
            vec![
                PadicInt::p_pow(2, 8, 0),
                PadicInt::p_pow(2, 8, 1),
            ],
            law,
        )
        .unwrap();
        assert!(a.eq_seq(&b));
    }
}
