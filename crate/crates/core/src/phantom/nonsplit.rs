//! The divisibility obstruction showing the product-modulo-sum quotient
//! does not split off its divisible part constructively: the sequence
//! (2^k) becomes divisible by 2^i once the first i entries are dropped,
//! for every i up to the requested depth, yet no finitely supported
//! correction inside the truncation window divides it one step further.

use crate::affine::Affine;
use crate::padic::{ValSeq, ValTail, Valuation};
use crate::{Error, Result};

/// The verified facts: j exact divisibilities after dropping initial
/// terms, and the valuation obstruction one step past the truncation.
#[derive(Clone, Debug)]
pub struct NonsplitCertificate {
    pub j: u64,
    pub truncation: u64,
    pub precision: u32,
    pub divisibilities_checked: u64,
    pub tails_cancel: bool,
    pub obstruction_required: u64,
    pub obstruction_valuation: u64,
    pub conclusion: String,
}

impl NonsplitCertificate {
    pub fn holds(&self) -> bool {
        self.divisibilities_checked == self.j
            && self.tails_cancel
            && self.obstruction_valuation < self.obstruction_required
    }
}

pub fn nonsplit_certificate(j: u64, truncation: u64) -> Result<NonsplitCertificate> {
    if j == 0 {
        return Err(Error::BadInput(
            "at least one divisibility step is needed".into(),
        ));
    }
    if j > truncation {
        return Err(Error::BadInput(format!(
            "depth {j} exceeds the truncation window {truncation}"
        )));
    }
    let precision = (truncation + j + 4) as u32;
    let x = ValSeq::new(2, precision, Vec::new(), ValTail::Affine(Affine::new(1, 0)))?;

    let mut checked = 0u64;
    let mut tails_cancel = true;
    for i in 1..=j {
        // candidate quotient: the same sequence shifted down by i steps
        let y = ValSeq::new(
            2,
            precision,
            Vec::new(),
            ValTail::Affine(Affine::new(1, -(i as i64))),
        )?;
        let back = y.scale_p_pow(i);
        let d = x.sub(&back)?;
        if *d.tail() != ValTail::Zero {
            tails_cancel = false;
            break;
        }
        // the mismatch is confined to the dropped window
        let support_ok = (i..d.prefix().len() as u64).all(|k| d.entry(k).is_zero_at_precision());
        let beyond_ok = (i..i + 3).all(|k| back.entry(k) == x.entry(k));
        if !(support_ok && beyond_ok) {
            tails_cancel = false;
            break;
        }
        checked += 1;
    }

    // one step past the window: entry 0 would need valuation
    // truncation + 1, but it is a unit
    let required = truncation + 1;
    let v0 = match x.entry_valuation(0) {
        Some(Valuation::Exact(v)) => v as u64,
        Some(Valuation::AtLeast(_)) | None => {
            return Err(Error::PrecisionExhausted(
                "entry 0 has no exact valuation".into(),
            ))
        }
    };
    debug_assert_eq!(x.entry_valuation(0).unwrap().at_least(required), Some(false));

    Ok(NonsplitCertificate {
        j,
        truncation,
        precision,
        divisibilities_checked: checked,
        tails_cancel,
        obstruction_required: required,
        obstruction_valuation: v0,
        conclusion: format!(
            "(2^k) is divisible by 2^i after dropping the first i entries for every \
             i <= {j}; dividing by 2^{required} needs valuation {required} at entry 0, \
             which has valuation {v0}, and no correction supported inside the window \
             of length {truncation} can raise it"
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_step_of_divisibility_certifies() {
        let c = nonsplit_certificate(1, 4).unwrap();
        assert!(c.holds());
        assert_eq!(c.divisibilities_checked, 1);
        assert_eq!(c.obstruction_required, 5);
        assert_eq!(c.obstruction_valuation, 0);
    }

    #[test]
    fn deep_divisibility_still_fails_one_step_past_the_window() {
        let c = nonsplit_certificate(30, 40).unwrap();
        assert!(c.holds());
        assert_eq!(c.divisibilities_checked, 30);
        assert!(c.tails_cancel);
        assert_eq!(c.obstruction_required, 41);
        assert_eq!(c.obstruction_valuation, 0);
        assert!(c.precision >= 41);
    }

    #[test]
    fn depth_is_capped_by_the_window() {
        assert!(nonsplit_certificate(5, 4).is_err());
        assert!(nonsplit_certificate(0, 4).is_err());
    }

    #[test]
    fn the_difference_really_lives_in_the_dropped_window() {
        let precision = 20;
        let x = ValSeq::new(2, precision, Vec::new(), ValTail::Affine(Affine::new(1, 0)))
            .unwrap();
        let y = ValSeq::new(
            2,
            precision,
            Vec::new(),
            ValTail::Affine(Affine::new(1, -3)),
        )
        .unwrap();
        let d = x.sub(&y.scale_p_pow(3)).unwrap();
        assert_eq!(*d.tail(), ValTail::Zero);
        // entries 0..3 differ: 2^k - 2^3
        assert!(!d.entry(0).is_zero_at_precision());
        assert!(!d.entry(2).is_zero_at_precision());
        assert!(d.entry(3).is_zero_at_precision());
        assert!(d.entry(7).is_zero_at_precision());
    }
}
