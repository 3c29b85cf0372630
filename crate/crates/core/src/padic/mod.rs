//! Truncated p-adic arithmetic, valuation sequences, and the completion
//! model: the p-adic completion, the limit completion, and the divisible
//! part of the latter, for coefficient groups that are finite sums of Z
//! and Z/p^j or the parametrized family of cyclic p-groups with affine
//! exponent law.

mod completion;
mod int;
mod valseq;

pub use completion::{
    completion_triple, w_certificate, wbi_check, witness_indivisible_certificate, Ambient,
    BtClass, CompletionDescription, CompletionModel, CompletionTriple, DenominatorLaw, Division,
    WCertKind, WCertificate, WbiReport,
};
pub use int::{PadicInt, Valuation};
pub use valseq::{ValSeq, ValTail};

use crate::affine::Affine;
use crate::fgab::FgGroup;

/// A coefficient group for completion and phantom computations: either
/// finitely generated, or the infinite direct sum over k >= 0 of
/// Z/p^f(k) with f an affine law (clamped at zero; zero exponents give
/// trivial summands).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoefGroup {
    Fg(FgGroup),
    SumFamily { p: u64, f: Affine },
}

impl CoefGroup {
    /// The family of cyclic groups Z/p^k over k >= 0.
    pub fn escalating(p: u64) -> Self {
        CoefGroup::SumFamily {
            p,
            f: Affine::new(1, 0),
        }
    }
}

impl std::fmt::Display for CoefGroup {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoefGroup::Fg(g) => write!(fm, "{g}"),
            CoefGroup::SumFamily { p, f } => {
                write!(fm, "sum over k of Z/{p}^({f})")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;
    use num_bigint::BigInt;

    fn model(alpha: u64, beta: i64) -> CompletionModel {
        CompletionModel::new(2, Affine::new(alpha, beta), 40).unwrap()
    }

    fn seq(alpha: u64, beta: i64) -> ValSeq {
        ValSeq::new(2, 40, Vec::new(), ValTail::Affine(Affine::new(alpha, beta))).unwrap()
    }

    #[test]
    fn classify_spec_examples() {
        // against the escalating family f(k) = k
        let m = model(1, 0);
        // v = 2k: in all three
        assert_eq!(m.classify(&seq(2, 0)).unwrap(), [true, true, true]);
        // v = k: in S and above f, but gap is constant
        assert_eq!(m.classify(&seq(1, 0)).unwrap(), [true, true, false]);
        // v = 0: in none
        assert_eq!(m.classify(&seq(0, 0)).unwrap(), [false, false, false]);
    }

    #[test]
    fn classify_with_prefix_violation() {
        let m = model(1, 0);
        // tail is fine but entry 1 has valuation 0 < f(1) = 1
        let x = ValSeq::new(
            2,
            40,
            vec![PadicInt::one(2, 40), PadicInt::one(2, 40)],
            ValTail::Affine(Affine::new(2, 0)),
        )
        .unwrap();
        assert_eq!(m.classify(&x).unwrap(), [true, false, false]);
    }

    #[test]
    fn precision_exhaustion_is_an_error_not_a_guess() {
        let m = CompletionModel::new(2, Affine::new(0, 50), 40).unwrap();
        // an all-zero explicit entry cannot certify v >= 50 at precision 40
        let x = ValSeq::new(
            2,
            40,
            vec![PadicInt::zero(2, 40)],
            ValTail::Affine(Affine::new(0, 50)),
        )
        .unwrap();
        match m.in_above_f(&x) {
            Err(Error::PrecisionExhausted(_)) => {}
            other => panic!("expected precision exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn finite_support_sequences_are_deep() {
        // the representation lemma: finite support with v >= f lies in D
        let m = model(1, 0);
        let x = ValSeq::new(
            2,
            40,
            vec![PadicInt::zero(2, 40), PadicInt::p_pow(2, 40, 3)],
            ValTail::Zero,
        )
        .unwrap();
        assert_eq!(m.classify(&x).unwrap(), [true, true, true]);
    }

    #[test]
    fn witness_is_nonzero_and_killed_by_no_p_power() {
        let m = model(1, 0);
        let w = m.pinf_witness().expect("escalating family has a witness");
        assert!(m.is_valid_rep(&w).unwrap());
        assert!(!m.is_zero(&w).unwrap());
        for k in 0..=10u64 {
            let scaled = BtClass {
                ambient: Ambient::Pinf,
                rep: w.rep.scale_p_pow(k),
            };
            assert!(!m.is_zero(&scaled).unwrap(), "p^{k} w vanished");
        }
    }

    #[test]
    fn witness_divides_by_p_inside_tilde() {
        let m = model(1, 0);
        let w = m.pinf_witness().unwrap();
        let div = m.divide_in_tilde(&w.rep, 1).unwrap();
        // p * quotient differs from the witness by something in D
        assert!(m.in_deep(&div.difference).unwrap());
        // and the reconstruction is exact where division happened
        let back = div.quotient.scale_p_pow(1);
        let diff = w.rep.sub(&back).unwrap();
        assert!(m.in_deep(&diff).unwrap());
        // the quotient is a valid element of S
        assert!(m.in_vanishing(&div.quotient).unwrap());
    }

    #[test]
    fn divide_by_higher_powers() {
        let m = model(1, 0);
        let w = m.pinf_witness().unwrap();
        for e in [2u64, 5, 10] {
            let div = m.divide_in_tilde(&w.rep, e).unwrap();
            assert!(m.in_deep(&div.difference).unwrap(), "e = {e}");
            // difference is supported exactly where f < e
            for k in 0..e {
                let d = div.difference.entry(k);
                assert_eq!(d, w.rep.entry(k), "zeroed entry {k}");
            }
        }
    }

    #[test]
    fn bounded_family_has_zero_divisible_part() {
        let m = model(0, 3);
        assert!(m.pinf_witness().is_none());
        // and any element of E is already in D
        let x = ValSeq::new(2, 40, Vec::new(), ValTail::Affine(Affine::new(1, 3))).unwrap();
        let c = m.classify(&x).unwrap();
        assert_eq!(c, [true, true, true]);
    }

    #[test]
    fn completion_triple_for_fg_groups() {
        // free of rank r
        let t = completion_triple(&CoefGroup::Fg(FgGroup::free(3)), 2, 40).unwrap();
        assert!(t.comparison_iso);
        assert_eq!(t.pinf, CompletionDescription::Zero);
        match t.hat {
            CompletionDescription::FgComplete { zp_rank, ref torsion } => {
                assert_eq!(zp_rank, 3);
                assert!(torsion.is_trivial());
            }
            ref d => panic!("unexpected description {d:?}"),
        }
        // a cyclic p-group is its own completion
        let t = completion_triple(&CoefGroup::Fg(FgGroup::cyclic(8)), 2, 40).unwrap();
        assert!(t.comparison_iso);
        match t.tilde {
            CompletionDescription::FgComplete { zp_rank, ref torsion } => {
                assert_eq!(zp_rank, 0);
                assert_eq!(torsion, &FgGroup::cyclic(8));
            }
            ref d => panic!("unexpected description {d:?}"),
        }
        // torsion prime to p is out of the supported class
        assert!(matches!(
            completion_triple(&CoefGroup::Fg(FgGroup::cyclic(6)), 2, 40),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn completion_triple_for_escalating_family() {
        let t = completion_triple(&CoefGroup::escalating(2), 2, 40).unwrap();
        assert!(!t.comparison_iso);
        assert_eq!(t.pinf, CompletionDescription::ProdZpModVanishing);
        assert_eq!(
            t.hat,
            CompletionDescription::QuotientOfVanishing {
                denominator: DenominatorLaw::AboveF
            }
        );
        assert_eq!(
            t.tilde,
            CompletionDescription::QuotientOfVanishing {
                denominator: DenominatorLaw::Deep
            }
        );
        assert!(t.kernel_witness.is_some());
    }

    #[test]
    fn wbi_conditions_agree_across_the_family() {
        // finitely generated: both hold
        for b in [
            CoefGroup::Fg(FgGroup::free(2)),
            CoefGroup::Fg(FgGroup::cyclic(16)),
            CoefGroup::Fg(FgGroup::trivial()),
        ] {
            let r = wbi_check(&b, 2, 40).unwrap();
            assert!(r.divisible_part_zero && r.comparison_iso, "{b}");
            assert!(r.kernel_witness.is_none());
        }
        // bounded families: both hold
        for beta in [1i64, 4] {
            let b = CoefGroup::SumFamily {
                p: 3,
                f: Affine::new(0, beta),
            };
            let r = wbi_check(&b, 3, 40).unwrap();
            assert!(r.divisible_part_zero && r.comparison_iso);
        }
        // growing families: both fail, witness produced
        for (alpha, beta) in [(1u64, 0i64), (1, -2), (2, 1)] {
            let b = CoefGroup::SumFamily {
                p: 2,
                f: Affine::new(alpha, beta),
            };
            let r = wbi_check(&b, 2, 40).unwrap();
            assert!(!r.divisible_part_zero && !r.comparison_iso);
            assert!(r.kernel_witness.is_some());
        }
    }

    #[test]
    fn w_certificates() {
        // escalating family: order lower bound at k = 10, decided for all k
        let c = w_certificate(&CoefGroup::escalating(2), 2, 10, 40).unwrap();
        match c.kind {
            WCertKind::OrderLowerBound { k, all_k } => {
                assert_eq!(k, 10);
                assert!(all_k);
            }
            ref k => panic!("unexpected kind {k:?}"),
        }
        // k = 0 certifies w itself is nonzero
        let c = w_certificate(&CoefGroup::escalating(2), 2, 0, 40).unwrap();
        assert!(matches!(c.kind, WCertKind::OrderLowerBound { k: 0, .. }));
        // free group: trivial certificate
        let c = w_certificate(&CoefGroup::Fg(FgGroup::free(4)), 2, 10, 40).unwrap();
        assert_eq!(c.kind, WCertKind::Trivial);
        // precision guard
        assert!(matches!(
            w_certificate(&CoefGroup::escalating(2), 2, 39, 40),
            Err(Error::PrecisionExhausted(_))
        ));
    }

    #[test]
    fn witness_not_divisible_inside_divisible_part() {
        let c = witness_indivisible_certificate(&CoefGroup::escalating(2), 2, 40).unwrap();
        assert_eq!(c.kind, WCertKind::NotDivisibleByP);
        // for a bounded family it degenerates to the trivial certificate
        let c = witness_indivisible_certificate(
            &CoefGroup::SumFamily {
                p: 2,
                f: Affine::new(0, 2),
            },
            2,
            40,
        )
        .unwrap();
        assert_eq!(c.kind, WCertKind::Trivial);
    }

    #[test]
    fn classification_is_stable_under_precision_increase() {
        let laws = [(0u64, 0i64), (1, 0), (1, -3), (2, 1), (0, 4)];
        for &(fa, fb) in &laws {
            for &(xa, xb) in &laws {
                let shallow = CompletionModel::new(2, Affine::new(fa, fb), 20).unwrap();
                let deep = CompletionModel::new(2, Affine::new(fa, fb), 60).unwrap();
                let xs = ValSeq::new(
                    2,
                    20,
                    Vec::new(),
                    ValTail::Affine(Affine::new(xa, xb)),
                )
                .unwrap();
                let xd = ValSeq::new(
                    2,
                    60,
                    Vec::new(),
                    ValTail::Affine(Affine::new(xa, xb)),
                )
                .unwrap();
                let cs = shallow.classify(&xs);
                let cd = deep.classify(&xd);
                match (cs, cd) {
                    (Ok(a), Ok(b)) => assert_eq!(a, b, "f = {fa},{fb}; x = {xa},{xb}"),
                    (Err(_), _) => {}
                    (Ok(_), Err(e)) => panic!("deeper precision broke a decision: {e:?}"),
                }
            }
        }
    }

    #[test]
    fn entry_arithmetic_reaches_the_bigint_value() {
        let w = CompletionModel::new(3, Affine::new(1, 0), 10)
            .unwrap()
            .pinf_witness()
            .unwrap();
        assert_eq!(w.rep.entry(4).to_bigint(), BigInt::from(81));
    }
}
