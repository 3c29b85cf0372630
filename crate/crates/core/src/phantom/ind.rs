//! Towers of chain complexes with symbolic tails, their stagewise
//! homology towers, and the phantom group of maps into a coefficient
//! object concentrated in degree zero.

use super::complex::{homology, ChainComplex, ChainMap};
use crate::arith::is_prime_u64;
use crate::fgab::{FgGroup, GroupMap};
use crate::mat::IntMat;
use crate::padic::CoefGroup;
use crate::towers::{pext_ind, DirectTail, DirectTower, Lim1Report};
use crate::{Error, Result};
use num_bigint::BigInt;

/// Tail rule for a tower of complexes.
#[derive(Clone, Debug, PartialEq)]
pub enum IndTail {
    /// Identity system on one fixed complex.
    ConstantComplex(ChainComplex),
    /// Stage k is the two-term complex `[p^k]` in degrees `degree` and
    /// `degree + 1`; the colimit realizes the union of the Z/p^k.
    MoorePrufer { p: u64, degree: i64 },
    /// Nothing past the materialized prefix.
    Truncated { level: u64 },
}

fn moore_stage(p: u64, degree: i64, k: u64) -> Result<ChainComplex> {
    if k > 100_000 {
        return Err(Error::PrecisionExhausted(format!(
            "stage exponent {k} is out of range"
        )));
    }
    let d = BigInt::from(p).pow(k as u32);
    ChainComplex::new(
        degree,
        vec![1, 1],
        vec![IntMat::from_fn(1, 1, |_, _| d.clone())],
    )
}

fn moore_step(p: u64, degree: i64, k: u64) -> Result<ChainMap> {
    let src = moore_stage(p, degree, k)?;
    let tgt = moore_stage(p, degree, k + 1)?;
    // p in the base degree, 1 above: p * p^k = p^{k+1} * 1
    let m0 = IntMat::from_fn(1, 1, |_, _| BigInt::from(p));
    ChainMap::new(src, tgt, vec![m0, IntMat::identity(1)])
}

impl IndTail {
    pub fn stage(&self, k: u64) -> Result<ChainComplex> {
        match self {
            IndTail::ConstantComplex(c) => Ok(c.clone()),
            IndTail::MoorePrufer { p, degree } => moore_stage(*p, *degree, k),
            IndTail::Truncated { level } => Err(Error::BadInput(format!(
                "stage {k} is beyond the truncation level {level}"
            ))),
        }
    }

    /// Canonical map from stage k to stage k + 1.
    pub fn step(&self, k: u64) -> Result<ChainMap> {
        match self {
            IndTail::ConstantComplex(c) => Ok(ChainMap::identity(c)),
            IndTail::MoorePrufer { p, degree } => moore_step(*p, *degree, k),
            IndTail::Truncated { level } => Err(Error::BadInput(format!(
                "no connecting map at stage {k}: tower truncated at {level}"
            ))),
        }
    }

    fn is_trunc(&self) -> Option<u64> {
        match self {
            IndTail::Truncated { level } => Some(*level),
            _ => None,
        }
    }
}

/// A direct system of complexes: a materialized prefix and a symbolic
/// tail. `prefix_maps[k]` connects stage k to stage k + 1.
#[derive(Clone, Debug, PartialEq)]
pub struct IndComplex {
    prefix: Vec<ChainComplex>,
    prefix_maps: Vec<ChainMap>,
    tail: IndTail,
}

impl IndComplex {
    pub fn new(
        prefix: Vec<ChainComplex>,
        prefix_maps: Vec<ChainMap>,
        tail: IndTail,
    ) -> Result<Self> {
        let x = IndComplex {
            prefix,
            prefix_maps,
            tail,
        };
        x.validate()?;
        Ok(x)
    }

    pub fn constant(c: &ChainComplex) -> Self {
        IndComplex {
            prefix: Vec::new(),
            prefix_maps: Vec::new(),
            tail: IndTail::ConstantComplex(c.clone()),
        }
    }

    pub fn moore_prufer(p: u64, degree: i64) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(IndComplex {
            prefix: Vec::new(),
            prefix_maps: Vec::new(),
            tail: IndTail::MoorePrufer { p, degree },
        })
    }

    pub fn truncated(prefix: Vec<ChainComplex>, prefix_maps: Vec<ChainMap>) -> Result<Self> {
        let level = prefix.len() as u64;
        IndComplex::new(prefix, prefix_maps, IndTail::Truncated { level })
    }

    fn validate(&self) -> Result<()> {
        let n = self.prefix.len();
        if let Some(level) = self.tail.is_trunc() {
            if level != n as u64 {
                return Err(Error::BadInput(format!(
                    "truncation level {level} does not match prefix length {n}"
                )));
            }
            if self.prefix_maps.len() + 1 != n && !(n == 0 && self.prefix_maps.is_empty()) {
                return Err(Error::BadInput(
                    "a truncated tower needs one map fewer than stages".into(),
                ));
            }
        } else if self.prefix_maps.len() != n {
            return Err(Error::BadInput(
                "need one connecting map per prefix stage".into(),
            ));
        }
        for (k, m) in self.prefix_maps.iter().enumerate() {
            if *m.source() != self.stage(k as u64)? || *m.target() != self.stage(k as u64 + 1)? {
                return Err(Error::BadInput(format!(
                    "connecting map {k} does not match its stages"
                )));
            }
        }
        // a symbolic tail fixes every stage, so a prefix must materialize
        // the rule it claims to extend
        if let IndTail::MoorePrufer { .. } = &self.tail {
            for k in 0..n as u64 {
                if self.prefix[k as usize] != self.tail.stage(k)? {
                    return Err(Error::BadInput(format!(
                        "prefix stage {k} disagrees with the tail rule"
                    )));
                }
                if self.prefix_maps[k as usize] != self.tail.step(k)? {
                    return Err(Error::BadInput(format!(
                        "prefix map {k} disagrees with the tail rule"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn prefix_len(&self) -> u64 {
        self.prefix.len() as u64
    }

    pub fn tail(&self) -> &IndTail {
        &self.tail
    }

    pub fn stage(&self, k: u64) -> Result<ChainComplex> {
        if let Some(c) = self.prefix.get(k as usize) {
            return Ok(c.clone());
        }
        self.tail.stage(k)
    }

    pub fn step(&self, k: u64) -> Result<ChainMap> {
        if let Some(m) = self.prefix_maps.get(k as usize) {
            return Ok(m.clone());
        }
        self.tail.step(k)
    }

    /// Stagewise homology in degree n as a tower with the matching
    /// symbolic tail. The cyclic rule behind a Moore tail is re-derived
    /// from the complexes on the first few stages before it is trusted.
    pub fn homology_tower(&self, n: i64) -> Result<DirectTower> {
        let hs: Vec<FgGroup> = self.prefix.iter().map(|c| homology(c, n)).collect();
        let ms = self
            .prefix_maps
            .iter()
            .map(|m| m.induced(n))
            .collect::<Result<Vec<GroupMap>>>()?;
        match &self.tail {
            IndTail::ConstantComplex(c) => {
                DirectTower::new(hs, ms, DirectTail::Constant(homology(c, n)))
            }
            IndTail::Truncated { level } => {
                DirectTower::new(hs, ms, DirectTail::Truncated { level: *level })
            }
            IndTail::MoorePrufer { p, degree } => {
                if n == *degree {
                    let rule = DirectTail::Prufer { p: *p };
                    for k in 0..=3u64 {
                        if homology(&self.tail.stage(k)?, n) != rule.stage(k)? {
                            return Err(Error::Disagreement(format!(
                                "stage {k} homology differs from the cyclic rule"
                            )));
                        }
                        if self.tail.step(k)?.induced(n)? != rule.step(k)? {
                            return Err(Error::Disagreement(format!(
                                "stage {k} connecting map differs from the cyclic rule"
                            )));
                        }
                    }
                    DirectTower::prufer(*p)
                } else {
                    for k in 0..=3u64 {
                        if !homology(&self.tail.stage(k)?, n).is_trivial() {
                            return Err(Error::Disagreement(format!(
                                "stage {k} has homology off the concentrated degree"
                            )));
                        }
                    }
                    Ok(DirectTower::constant(&FgGroup::trivial()))
                }
            }
        }
    }
}

/// Phantom maps from the tower into the coefficient object in degree 0:
/// maps whose restriction to every stage is null. Only the degree right
/// below zero contributes, through the derived limit of its hom towers.
#[derive(Clone, Debug, PartialEq)]
pub struct PhantomReport {
    pub tower: DirectTower,
    pub coefficients: CoefGroup,
    pub pext: Lim1Report,
}

pub fn phantom_group(
    x: &IndComplex,
    b: &CoefGroup,
    truncation: u64,
    precision: u32,
) -> Result<PhantomReport> {
    let tower = x.homology_tower(-1)?;
    let pext = pext_ind(&tower, b, truncation, precision)?;
    Ok(PhantomReport {
        tower,
        coefficients: b.clone(),
        pext,
    })
}

/// Phantom maps out of a homology tower concentrated in one degree `k`.
/// Away from degree -1 the group vanishes for degree reasons; at -1 it
/// is the derived-limit term.
#[derive(Clone, Debug, PartialEq)]
pub enum PhantomEm {
    Zero,
    PExt(Lim1Report),
}

pub fn phantom_em(
    k: i64,
    a: &DirectTower,
    b: &CoefGroup,
    truncation: u64,
    precision: u32,
) -> Result<PhantomEm> {
    if k == -1 {
        Ok(PhantomEm::PExt(pext_ind(a, b, truncation, precision)?))
    } else {
        Ok(PhantomEm::Zero)
    }
}
