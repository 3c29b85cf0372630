//! Purity of a short exact sequence 0 -> B -> C -> A -> 0 of finitely
//! generated groups, decided four independent ways:
//!
//! 1. torsion surjectivity: C[q] -> A[q] is onto for every prime power q
//!    dividing the exponent of A's torsion;
//! 2. hom extension: restriction Hom(C, Z/q) -> Hom(B, Z/q) is onto for
//!    the same q, probed first on canonical and seeded sample maps;
//! 3. Ulm membership: the class of the sequence lies in every multiple
//!    n*Ext(A, B);
//! 4. finite pushout: pushing the class forward along each basis map
//!    B -> Z/q gives zero in Ext(A, Z/q).
//!
//! All four agree on finitely generated input, where purity is the same
//! as splitness; a disagreement is reported as an error instead of a
//! guess.

use crate::arith::prime_power_divisors;
use crate::fgab::{
    factor, n_torsion_and_quotient, preimage, restrict_map, Element, FgGroup, ShortExact,
};
use crate::homalg::{ext_cov, ext_group, hom_contra, hom_group, ulm_member};
use crate::par::join2;
use crate::{Error, Result};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PurityMethod {
    TorsionSurjectivity,
    HomExtension,
    UlmMembership,
    FinitePushout,
}

#[derive(Clone, Debug)]
pub struct MethodVerdict {
    pub method: PurityMethod,
    pub pure: bool,
    pub detail: String,
}

/// Evidence that the sequence is not pure, from whichever method found
/// it first.
#[derive(Clone, Debug)]
pub enum PurityWitness {
    /// An element of A killed by n with no n-torsion preimage in C.
    TorsionDrop { n: BigInt, a_elem: Vec<BigInt> },
    /// A map B -> Z/q with no extension over C, given by its values on
    /// the generators of B.
    NonExtendingHom { modulus: BigInt, values: Vec<BigInt> },
    /// The class of the sequence, nonzero in Ext(A, B).
    NonzeroExtClass { coords: Vec<BigInt> },
    /// A map B -> Z/q whose pushout of the class is nonzero.
    ObstructedPushout { modulus: BigInt, values: Vec<BigInt> },
}

pub struct PurityReport {
    pub pure: bool,
    /// Same thing for finitely generated input, computed independently.
    pub split: bool,
    pub verdicts: Vec<MethodVerdict>,
    pub witness: Option<PurityWitness>,
    /// The prime powers the levelwise methods ranged over.
    pub levels: Vec<BigInt>,
}

fn torsion_levels(a: &FgGroup) -> Result<Vec<BigInt>> {
    let tor = a.torsion_part();
    if tor.is_trivial() {
        return Ok(Vec::new());
    }
    prime_power_divisors(&tor.exponent())
}

/// Method 1. Purity says exactly that n-torsion of C covers n-torsion of
/// A for every n; prime powers dividing the torsion exponent of A decide
/// all n at once.
fn check_torsion_surjectivity(
    ses: &ShortExact,
    levels: &[BigInt],
) -> (bool, String, Option<PurityWitness>) {
    for q in levels {
        let (tor_c, _) = n_torsion_and_quotient(ses.middle(), q);
        let (tor_a, _) = n_torsion_and_quotient(ses.quotient(), q);
        let down = restrict_map(ses.proj(), &tor_c, &tor_a);
        let coker = factor(&down).cokernel;
        if !coker.group.is_trivial() {
            // find a concrete generator of A[q] that fails to lift
            for j in 0..tor_a.group.dim() {
                let gen = tor_a.group.generator(j);
                if preimage(&down, &gen).is_none() {
                    let a_elem = tor_a.incl.eval(&gen).coords().to_vec();
                    return (
                        false,
                        format!("{q}-torsion of the quotient does not lift"),
                        Some(PurityWitness::TorsionDrop {
                            n: q.clone(),
                            a_elem,
                        }),
                    );
                }
            }
            unreachable!("nontrivial cokernel must leave some generator unlifted");
        }
    }
    (true, format!("torsion lifts at {} levels", levels.len()), None)
}

/// Method 2. Every map B -> Z/q must extend over C. Canonical and seeded
/// probes run first for an early witness; the cokernel of the restriction
/// then settles the question exactly.
fn check_hom_extension(
    ses: &ShortExact,
    levels: &[BigInt],
    seed: u64,
) -> (bool, String, Option<PurityWitness>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for q in levels {
        let cyc = FgGroup::cyclic(q.clone());
        let hom_b = hom_group(ses.sub(), &cyc);
        let hom_c = hom_group(ses.middle(), &cyc);
        let res = hom_contra(&hom_c, &hom_b, ses.incl());

        let mut probes: Vec<Element> = (0..hom_b.group().dim())
            .map(|j| hom_b.group().generator(j))
            .collect();
        for _ in 0..16 {
            let coords: Vec<BigInt> = (0..hom_b.group().dim())
                .map(|_| BigInt::from(rng.gen_range(0i64..64)))
                .collect();
            probes.push(hom_b.group().element(coords));
        }
        for probe in &probes {
            if preimage(&res, probe).is_none() {
                let f = hom_b.map_of(probe);
                let values = (0..f.matrix().cols())
                    .map(|j| f.matrix().get(0, j).clone())
                    .collect();
                return (
                    false,
                    format!("a map to Z/{q} does not extend"),
                    Some(PurityWitness::NonExtendingHom {
                        modulus: q.clone(),
                        values,
                    }),
                );
            }
        }
        // probes passed; decide exactly
        let coker = factor(&res).cokernel;
        if !coker.group.is_trivial() {
            for j in 0..hom_b.group().dim() {
                let gen = hom_b.group().generator(j);
                if preimage(&res, &gen).is_none() {
                    let f = hom_b.map_of(&gen);
                    let values = (0..f.matrix().cols())
                        .map(|k| f.matrix().get(0, k).clone())
                        .collect();
                    return (
                        false,
                        format!("a map to Z/{q} does not extend"),
                        Some(PurityWitness::NonExtendingHom {
                            modulus: q.clone(),
                            values,
                        }),
                    );
                }
            }
            unreachable!("nontrivial cokernel must obstruct some generator");
        }
    }
    (
        true,
        format!("restriction onto Hom(B, Z/q) at {} levels", levels.len()),
        None,
    )
}

/// Method 3. The sequence is pure exactly when its class is divisible by
/// every n in Ext(A, B).
fn check_ulm(ses: &ShortExact) -> (bool, String, Option<PurityWitness>) {
    let e = ext_group(ses.quotient(), ses.sub());
    let u = e.class_of(ses);
    if ulm_member(&u) {
        (true, "class is divisible by every n".into(), None)
    } else {
        (
            false,
            "class is not infinitely divisible".into(),
            Some(PurityWitness::NonzeroExtClass {
                coords: u.coords().to_vec(),
            }),
        )
    }
}

/// Method 4. Push the class forward along every basis map B -> Z/q; all
/// pushouts vanish exactly when the sequence is pure.
fn check_finite_pushout(
    ses: &ShortExact,
    levels: &[BigInt],
) -> (bool, String, Option<PurityWitness>) {
    let a = ses.quotient();
    let b = ses.sub();
    let e = ext_group(a, b);
    let u = e.class_of(ses);
    let mut pushes = 0usize;
    for q in levels {
        let cyc = FgGroup::cyclic(q.clone());
        let hom_b = hom_group(b, &cyc);
        let target_ext = ext_group(a, &cyc);
        for j in 0..hom_b.group().dim() {
            let f = hom_b.map_of(&hom_b.group().generator(j));
            let push = ext_cov(&e, &target_ext, &f);
            pushes += 1;
            if !push.eval(&u).is_zero() {
                let values = (0..f.matrix().cols())
                    .map(|k| f.matrix().get(0, k).clone())
                    .collect();
                return (
                    false,
                    format!("pushout along a map to Z/{q} is nonzero"),
                    Some(PurityWitness::ObstructedPushout {
                        modulus: q.clone(),
                        values,
                    }),
                );
            }
        }
    }
    (true, format!("{pushes} pushouts vanish"), None)
}

/// Decide purity of `ses`, running all four methods and insisting they
/// agree. `seed` feeds the sampled probes of the hom-extension method
/// only; the verdict itself is deterministic.
pub fn is_pure(ses: &ShortExact, seed: u64) -> Result<PurityReport> {
    let levels = torsion_levels(ses.quotient())?;
    let ((m1, m2), (m3, m4)) = join2(
        || {
            join2(
                || check_torsion_surjectivity(ses, &levels),
                || check_hom_extension(ses, &levels, seed),
            )
        },
        || join2(|| check_ulm(ses), || check_finite_pushout(ses, &levels)),
    );
    let verdicts = vec![
        MethodVerdict {
            method: PurityMethod::TorsionSurjectivity,
            pure: m1.0,
            detail: m1.1.clone(),
        },
        MethodVerdict {
            method: PurityMethod::HomExtension,
            pure: m2.0,
            detail: m2.1.clone(),
        },
        MethodVerdict {
            method: PurityMethod::UlmMembership,
            pure: m3.0,
            detail: m3.1.clone(),
        },
        MethodVerdict {
            method: PurityMethod::FinitePushout,
            pure: m4.0,
            detail: m4.1.clone(),
        },
    ];
    let answers = [m1.0, m2.0, m3.0, m4.0];
    if answers.iter().any(|&x| x != answers[0]) {
        return Err(Error::Disagreement(format!(
            "purity methods split {:?} on {:?}",
            answers, ses
        )));
    }
    // splitness, via the class itself
    let e = ext_group(ses.quotient(), ses.sub());
    let split = e.class_of(ses).is_zero();
    if split != answers[0] {
        return Err(Error::Disagreement(format!(
            "purity {} but splitness {} on finitely generated input",
            answers[0], split
        )));
    }
    let witness = [m1.2, m2.2, m3.2, m4.2].into_iter().flatten().next();
    Ok(PurityReport {
        pure: answers[0],
        split,
        verdicts,
        witness,
        levels,
    })
}
