//! Eventually-affine exponent laws k -> max(alpha*k + beta, 0).
//!
//! These describe both the valuation tails of p-adic sequences and the
//! exponent patterns of summand families, so membership and comparison
//! questions about whole infinite families reduce to a finite check plus
//! a slope comparison.

use serde::{Deserialize, Serialize};

/// The law k -> max(alpha*k + beta, 0) on k = 0, 1, 2, ...
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Affine {
    pub alpha: u64,
    pub beta: i64,
}

impl Affine {
    pub fn new(alpha: u64, beta: i64) -> Self {
        Affine { alpha, beta }
    }

    pub fn constant(c: u64) -> Self {
        Affine {
            alpha: 0,
            beta: c as i64,
        }
    }

    /// alpha*k + beta without the clamp at zero.
    pub fn eval_linear(&self, k: u64) -> i64 {
        (self.alpha as i64) * (k as i64) + self.beta
    }

    pub fn eval(&self, k: u64) -> u64 {
        self.eval_linear(k).max(0) as u64
    }

    pub fn tends_to_infinity(&self) -> bool {
        self.alpha > 0
    }

    pub fn is_always_zero(&self) -> bool {
        self.alpha == 0 && self.beta <= 0
    }

    /// First index from which the un-clamped line is nonnegative.
    pub fn nonnegative_from(&self) -> u64 {
        if self.beta >= 0 {
            0
        } else if self.alpha == 0 {
            u64::MAX
        } else {
            ((-self.beta) as u64).div_ceil(self.alpha)
        }
    }

    pub fn shifted(&self, d: i64) -> Affine {
        Affine {
            alpha: self.alpha,
            beta: self.beta + d,
        }
    }

    /// The law m -> eval(start + m), again in affine form.
    pub fn at_offset(&self, start: u64) -> Affine {
        Affine {
            alpha: self.alpha,
            beta: self.beta + (self.alpha as i64) * (start as i64),
        }
    }

    /// Whether eval(k) >= other.eval(k) for every k >= 0.
    pub fn dominates(&self, other: &Affine) -> bool {
        if other.is_always_zero() {
            return true;
        }
        if self.alpha < other.alpha {
            return false;
        }
        if self.alpha == other.alpha {
            // other is somewhere positive; there the gap is beta - other.beta
            return self.beta >= other.beta;
        }
        // Steeper line: any failure sits below the crossing point.
        let gap = (other.beta - self.beta).max(0) as u64;
        let bound = gap / (self.alpha - other.alpha) + 1;
        (0..=bound).all(|k| self.eval(k) >= other.eval(k))
    }

    /// Whether eval(k) - other.eval(k) tends to infinity.
    pub fn gap_tends_to_infinity(&self, other: &Affine) -> bool {
        self.alpha > other.alpha
    }
}

impl std::fmt::Display for Affine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "max({}k{:+}, 0)", self.alpha, self.beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamped_evaluation() {
        let f = Affine::new(2, -3);
        assert_eq!(f.eval(0), 0);
        assert_eq!(f.eval(1), 0);
        assert_eq!(f.eval(2), 1);
        assert_eq!(f.eval(10), 17);
        assert_eq!(f.nonnegative_from(), 2);
        assert_eq!(Affine::new(1, -3).nonnegative_from(), 3);
        assert_eq!(Affine::constant(5).nonnegative_from(), 0);
    }

    #[test]
    fn domination_agrees_with_pointwise_check() {
        let laws = [
            Affine::new(0, 0),
            Affine::new(0, 3),
            Affine::new(0, -2),
            Affine::new(1, 0),
            Affine::new(1, -5),
            Affine::new(2, -9),
            Affine::new(3, 1),
        ];
        for f in &laws {
            for g in &laws {
                let pointwise = (0..200).all(|k| f.eval(k) >= g.eval(k));
                // 200 samples decide it: slopes differ by >= 1 per step and
                // intercepts are within +-9.
                assert_eq!(f.dominates(g), pointwise, "{f} vs {g}");
            }
        }
    }

    #[test]
    fn gap_growth() {
        assert!(Affine::new(1, 0).gap_tends_to_infinity(&Affine::new(0, 100)));
        assert!(!Affine::new(1, 0).gap_tends_to_infinity(&Affine::new(1, -100)));
        assert!(Affine::new(2, -50).gap_tends_to_infinity(&Affine::new(1, 50)));
    }

    #[test]
    fn offsetting_matches_reindexed_evaluation() {
        let f = Affine::new(2, -7);
        for start in [0u64, 1, 3, 10] {
            let g = f.at_offset(start);
            for m in 0..20 {
                assert_eq!(g.eval(m), f.eval(start + m));
            }
        }
    }
}
