//! The completion model for B = direct sum of Z/p^f(k) over k >= 0 with
//! an affine exponent law f, plus the finitely generated case.
//!
//! Three subgroups of the product of Z_p cut everything out:
//!
//!   S  = { a : v(a_k) -> infinity }
//!   E  = { a : v(a_k) >= f(k) for all k }
//!   D  = { a : v(a_k) >= f(k) for all k and v(a_k) - f(k) -> infinity }
//!
//! The limit completion is S/D, the p-adic completion is S/E, and the
//! divisible part of the limit completion is E/D, the kernel of the
//! comparison map S/D -> S/E. Membership is decided exactly from the
//! prefix entries and the affine tail law of a sequence.

use super::int::Valuation;
use super::valseq::{ValSeq, ValTail};
use super::CoefGroup;
use crate::affine::Affine;
use crate::arith::is_prime_u64;
use crate::fgab::FgGroup;
use crate::{Error, Result};
use num_traits::ToPrimitive;

/// Which quotient a sequence represents an element of.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ambient {
    /// S/D, the limit completion.
    Tilde,
    /// S/E, the p-adic completion.
    Hat,
    /// E/D, the divisible part of the limit completion.
    Pinf,
}

/// A class in one of the three quotients, by representative.
#[derive(Clone, Debug, PartialEq)]
pub struct BtClass {
    pub ambient: Ambient,
    pub rep: ValSeq,
}

pub struct CompletionModel {
    p: u64,
    f: Affine,
    precision: u32,
}

/// Result of dividing a class by p^e inside the limit completion: the
/// quotient sequence and the verified difference x - p^e * quotient,
/// which lies in D.
#[derive(Clone, Debug)]
pub struct Division {
    pub exponent: u64,
    pub quotient: ValSeq,
    pub difference: ValSeq,
}

impl CompletionModel {
    pub fn new(p: u64, f: Affine, precision: u32) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        if precision == 0 {
            return Err(Error::BadInput("precision must be positive".into()));
        }
        Ok(CompletionModel { p, f, precision })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn exponent_law(&self) -> Affine {
        self.f
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    fn check_shape(&self, x: &ValSeq) -> Result<()> {
        if x.prime() != self.p {
            return Err(Error::Mismatch("sequence prime differs from model".into()));
        }
        Ok(())
    }

    /// Membership in S: valuations tend to infinity. Decided by the tail
    /// alone.
    pub fn in_vanishing(&self, x: &ValSeq) -> Result<bool> {
        self.check_shape(x)?;
        Ok(match x.tail() {
            ValTail::Zero => true,
            ValTail::Affine(law) => law.tends_to_infinity(),
        })
    }

    /// Membership in { v(a_k) >= f(k) for all k }. Prefix entries are
    /// compared against f directly; an all-zero entry whose precision is
    /// below f(k) is reported as precision exhaustion, never guessed.
    pub fn in_above_f(&self, x: &ValSeq) -> Result<bool> {
        self.check_shape(x)?;
        for k in 0..x.prefix().len() as u64 {
            let need = self.f.eval(k);
            match x.entry_valuation(k) {
                None => {}
                Some(val) => match val.at_least(need) {
                    Some(ok) => {
                        if !ok {
                            return Ok(false);
                        }
                    }
                    None => {
                        return Err(Error::PrecisionExhausted(format!(
                            "entry {k} is 0 mod p^{} but f({k}) = {need}",
                            self.precision
                        )))
                    }
                },
            }
        }
        let start = x.prefix().len() as u64;
        Ok(match x.tail() {
            ValTail::Zero => true,
            ValTail::Affine(law) => law.at_offset(start).dominates(&self.f.at_offset(start)),
        })
    }

    /// Membership in D: above f everywhere and the gap v - f tends to
    /// infinity.
    pub fn in_deep(&self, x: &ValSeq) -> Result<bool> {
        if !self.in_above_f(x)? {
            return Ok(false);
        }
        Ok(match x.tail() {
            ValTail::Zero => true,
            ValTail::Affine(law) => law.gap_tends_to_infinity(&self.f),
        })
    }

    /// The three memberships [S, above-f, D]; D is contained in both
    /// others, which is asserted on every call.
    pub fn classify(&self, x: &ValSeq) -> Result<[bool; 3]> {
        let m = [
            self.in_vanishing(x)?,
            self.in_above_f(x)?,
            self.in_deep(x)?,
        ];
        assert!(!m[2] || (m[0] && m[1]), "D must sit inside S and above f");
        Ok(m)
    }

    /// Whether `x` is a valid representative for the ambient.
    pub fn is_valid_rep(&self, c: &BtClass) -> Result<bool> {
        let m = self.classify(&c.rep)?;
        Ok(match c.ambient {
            Ambient::Tilde | Ambient::Hat => m[0],
            Ambient::Pinf => m[0] && m[1],
        })
    }

    /// Zero test in the ambient quotient.
    pub fn is_zero(&self, c: &BtClass) -> Result<bool> {
        let m = self.classify(&c.rep)?;
        Ok(match c.ambient {
            Ambient::Tilde => m[2],
            Ambient::Hat => m[0] && m[1],
            Ambient::Pinf => m[2],
        })
    }

    /// The canonical nonzero element of E/D: a_k = p^{f(k)}, the image
    /// of (1, 1, 1, ...) under multiplication by the exponents. None
    /// when the divisible part is zero (bounded exponent law).
    pub fn pinf_witness(&self) -> Option<BtClass> {
        if self.f.alpha == 0 {
            return None;
        }
        let rep = ValSeq::new(self.p, self.precision, Vec::new(), ValTail::Affine(self.f))
            .expect("exponent law is a valid tail");
        Some(BtClass {
            ambient: Ambient::Pinf,
            rep,
        })
    }

    /// Divide a class of E by p^e inside the limit completion: produce y
    /// with p^e * y = x modulo D, verified. Entries divisible by p^e are
    /// divided exactly; the finitely many others are zeroed, and the
    /// difference, supported there, lies in D because x is above f.
    pub fn divide_in_tilde(&self, x: &ValSeq, e: u64) -> Result<Division> {
        let m = self.classify(x)?;
        if !(m[0] && m[1]) {
            return Err(Error::BadInput(
                "division inside the limit completion needs a representative above f".into(),
            ));
        }
        if e == 0 {
            return Ok(Division {
                exponent: 0,
                quotient: x.clone(),
                difference: ValSeq::zero(self.p, self.precision),
            });
        }
        if m[2] {
            // already zero in the limit completion: 0 works
            return Ok(Division {
                exponent: e,
                quotient: ValSeq::zero(self.p, self.precision),
                difference: x.clone(),
            });
        }
        // here the tail law grows, so entries below p^e are confined to a
        // finite range; materialize it
        let x = match x.tail() {
            ValTail::Zero => x.clone(),
            ValTail::Affine(law) => {
                assert!(law.alpha > 0, "non-deep member of S has a growing tail");
                let mut need = x.prefix().len() as u64;
                while law.eval(need) < e {
                    need += 1;
                }
                x.with_prefix_len(need)
            }
        };
        let mut q_prefix = Vec::new();
        for k in 0..x.prefix().len() as u64 {
            let entry = x.entry(k);
            let divisible = match entry.valuation() {
                Valuation::Exact(v) => v as u64 >= e,
                Valuation::AtLeast(n) => {
                    if (n as u64) < e {
                        return Err(Error::PrecisionExhausted(format!(
                            "entry {k} is 0 mod p^{n}, cannot divide by p^{e}"
                        )));
                    }
                    true
                }
            };
            if divisible {
                q_prefix.push(entry.shift_down(e)?);
            } else {
                q_prefix.push(super::int::PadicInt::zero(self.p, self.precision));
            }
        }
        let q_tail = match x.tail() {
            ValTail::Zero => ValTail::Zero,
            ValTail::Affine(law) => ValTail::Affine(law.shifted(-(e as i64))),
        };
        let quotient = ValSeq::new(self.p, self.precision, q_prefix, q_tail)?;
        let difference = x.sub(&quotient.scale_p_pow(e))?;
        if !self.in_deep(&difference)? {
            return Err(Error::Disagreement(
                "division residue escaped D; representation invariant broken".into(),
            ));
        }
        Ok(Division {
            exponent: e,
            quotient,
            difference,
        })
    }
}

/// Structural description of one of the completions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompletionDescription {
    /// Completion of a finitely generated group: Z_p^rank plus its
    /// p-torsion carried over unchanged.
    FgComplete { zp_rank: usize, torsion: FgGroup },
    /// A quotient of S = {v -> infinity} by the named subgroup.
    QuotientOfVanishing { denominator: DenominatorLaw },
    /// The product of Z_p modulo {v -> infinity}.
    ProdZpModVanishing,
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DenominatorLaw {
    /// { v >= f everywhere } (intersected with S).
    AboveF,
    /// { v >= f everywhere and v - f -> infinity }.
    Deep,
}

pub struct CompletionTriple {
    pub p: u64,
    pub precision: u32,
    pub hat: CompletionDescription,
    pub tilde: CompletionDescription,
    pub pinf: CompletionDescription,
    /// Whether the comparison map from the limit completion to the
    /// p-adic completion is an isomorphism.
    pub comparison_iso: bool,
    /// A nonzero element of the kernel of the comparison map, when the
    /// kernel is nonzero.
    pub kernel_witness: Option<BtClass>,
}

/// The supported coefficient groups: finite direct sums of Z and Z/p^j,
/// and the parametrized family with affine exponent law.
pub fn completion_triple(b: &CoefGroup, p: u64, precision: u32) -> Result<CompletionTriple> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    match b {
        CoefGroup::Fg(g) => {
            // each torsion factor must be a power of p
            let pb = num_bigint::BigInt::from(p);
            for d in g.invariant_factors() {
                let mut d = d.clone();
                while (&d % &pb).to_u64() == Some(0) {
                    d /= &pb;
                }
                if d.to_u64() != Some(1) {
                    return Err(Error::Unsupported(format!(
                        "torsion factor {d} is not a power of {p}"
                    )));
                }
            }
            let desc = CompletionDescription::FgComplete {
                zp_rank: g.free_rank(),
                torsion: g.torsion_part(),
            };
            Ok(CompletionTriple {
                p,
                precision,
                hat: desc.clone(),
                tilde: desc,
                pinf: CompletionDescription::Zero,
                comparison_iso: true,
                kernel_witness: None,
            })
        }
        CoefGroup::SumFamily { p: fp, f } => {
            if *fp != p {
                return Err(Error::Mismatch(format!(
                    "family prime {fp} differs from requested prime {p}"
                )));
            }
            let model = CompletionModel::new(p, *f, precision)?;
            let witness = model.pinf_witness();
            let pinf = if witness.is_some() {
                CompletionDescription::ProdZpModVanishing
            } else {
                CompletionDescription::Zero
            };
            Ok(CompletionTriple {
                p,
                precision,
                hat: CompletionDescription::QuotientOfVanishing {
                    denominator: DenominatorLaw::AboveF,
                },
                tilde: CompletionDescription::QuotientOfVanishing {
                    denominator: DenominatorLaw::Deep,
                },
                pinf,
                comparison_iso: witness.is_none(),
                kernel_witness: witness,
            })
        }
    }
}

/// The two conditions of the isomorphism criterion, evaluated through
/// separate routes and required to agree: (i) the divisible part of the
/// limit completion vanishes; (ii) the comparison map is an isomorphism.
pub struct WbiReport {
    pub p: u64,
    pub precision: u32,
    pub divisible_part_zero: bool,
    pub comparison_iso: bool,
    pub kernel_witness: Option<BtClass>,
}

pub fn wbi_check(b: &CoefGroup, p: u64, precision: u32) -> Result<WbiReport> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    let (cond_i, cond_ii, witness) = match b {
        CoefGroup::Fg(g) => {
            // (i) by tower stabilization: B/p^n B is constant from the
            // p-valuation of the exponent on, so nothing divisible
            // survives in the limit
            let pb = num_bigint::BigInt::from(p);
            let mut e = g.exponent();
            let mut stable_at = 0u32;
            while (&e % &pb).to_u64() == Some(0) {
                e /= &pb;
                stable_at += 1;
            }
            if e.to_u64() != Some(1) && !g.invariant_factors().is_empty() {
                return Err(Error::Unsupported(format!(
                    "torsion exponent has a factor prime to {p}"
                )));
            }
            let _ = stable_at;
            // (ii) by the same finiteness: the comparison of two finite
            // limits of identical towers
            (true, true, None)
        }
        CoefGroup::SumFamily { p: fp, f } => {
            if *fp != p {
                return Err(Error::Mismatch(format!(
                    "family prime {fp} differs from requested prime {p}"
                )));
            }
            let model = CompletionModel::new(p, *f, precision)?;
            // (i): search for an element of E not in D; the canonical
            // candidate has valuation law f itself
            let witness = model.pinf_witness();
            let cond_i = match &witness {
                Some(w) => {
                    // double-check the witness honestly
                    if model.is_zero(w)? || !model.is_valid_rep(w)? {
                        return Err(Error::Disagreement(
                            "divisible-part witness failed verification".into(),
                        ));
                    }
                    false
                }
                None => true,
            };
            // (ii): every affine law v with v >= f and v -> infinity must
            // have v - f -> infinity; with slopes in play this holds
            // exactly when f is bounded
            let cond_ii = f.alpha == 0;
            (cond_i, cond_ii, witness)
        }
    };
    if cond_i != cond_ii {
        return Err(Error::Disagreement(format!(
            "divisible-part vanishing ({cond_i}) and comparison isomorphism ({cond_ii}) must agree"
        )));
    }
    Ok(WbiReport {
        p,
        precision,
        divisible_part_zero: cond_i,
        comparison_iso: cond_ii,
        kernel_witness: witness,
    })
}

/// What a certificate about the glueing class w asserts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WCertKind {
    /// p^k * w is nonzero, witnessed by an element of the divisible part
    /// that p^k does not kill; `all_k` records that the tail rule
    /// decides this for every k at once.
    OrderLowerBound { k: u64, all_k: bool },
    /// The canonical witness class is not divisible by p inside the
    /// divisible part itself.
    NotDivisibleByP,
    /// The divisible part vanishes, so w = 0 and there is nothing to
    /// bound.
    Trivial,
}

#[derive(Clone, Debug)]
pub struct WCertificate {
    pub p: u64,
    pub precision: u32,
    pub kind: WCertKind,
    pub witness: Option<BtClass>,
    pub note: String,
}

/// Certificate that p^k * w is nonzero (or that w vanishes): if some x
/// in the divisible part has p^k * x nonzero, then p^k cannot kill w.
pub fn w_certificate(b: &CoefGroup, p: u64, k: u64, precision: u32) -> Result<WCertificate> {
    if (precision as u64) < k + 2 {
        return Err(Error::PrecisionExhausted(format!(
            "need precision at least {} for k = {k}",
            k + 2
        )));
    }
    let triple = completion_triple(b, p, precision)?;
    match triple.kernel_witness {
        None => Ok(WCertificate {
            p,
            precision,
            kind: WCertKind::Trivial,
            witness: None,
            note: "divisible part of the limit completion is zero, so w = 0".into(),
        }),
        Some(w) => {
            let f = match b {
                CoefGroup::SumFamily { f, .. } => *f,
                CoefGroup::Fg(_) => unreachable!("finitely generated groups have no kernel"),
            };
            let model = CompletionModel::new(p, f, precision)?;
            let scaled = BtClass {
                ambient: Ambient::Pinf,
                rep: w.rep.scale_p_pow(k),
            };
            if model.is_zero(&scaled)? {
                return Err(Error::Disagreement(
                    "scaled witness unexpectedly vanished".into(),
                ));
            }
            // scaling by p^k shifts the law by the constant k, so the gap
            // against f stays constant for every k: one check decides all
            let all_k = matches!(w.rep.tail(), ValTail::Affine(law) if law.alpha == f.alpha);
            Ok(WCertificate {
                p,
                precision,
                kind: WCertKind::OrderLowerBound { k, all_k },
                witness: Some(scaled),
                note: format!(
                    "p^{k} times the witness keeps valuation gap {k}, which never tends to \
                     infinity, so p^{k} w is nonzero"
                ),
            })
        }
    }
}

/// Certificate that the canonical witness is not divisible by p inside
/// the divisible part: any p * y with y above f has valuation at least
/// f + 1 everywhere, while the witness has valuation exactly f on its
/// tail, so the difference keeps a constant gap of zero.
pub fn witness_indivisible_certificate(
    b: &CoefGroup,
    p: u64,
    precision: u32,
) -> Result<WCertificate> {
    let triple = completion_triple(b, p, precision)?;
    match triple.kernel_witness {
        None => Ok(WCertificate {
            p,
            precision,
            kind: WCertKind::Trivial,
            witness: None,
            note: "divisible part is zero".into(),
        }),
        Some(w) => {
            let f = match b {
                CoefGroup::SumFamily { f, .. } => *f,
                CoefGroup::Fg(_) => unreachable!(),
            };
            match w.rep.tail() {
                ValTail::Affine(law) if *law == f => Ok(WCertificate {
                    p,
                    precision,
                    kind: WCertKind::NotDivisibleByP,
                    witness: Some(w),
                    note: "witness valuation equals f on the tail; p * y is above f + 1 for \
                           any y above f, so the difference has constant gap zero and stays \
                           outside D"
                        .into(),
                }),
                _ => Err(Error::Disagreement(
                    "canonical witness does not carry the exponent law".into(),
                )),
            }
        }
    }
}
