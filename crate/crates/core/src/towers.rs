//! Sequential direct and inverse towers of finitely generated abelian
//! groups with symbolic tails, lim and lim1 for the supported tower
//! classes, and PExt of a colimit presented by a direct tower.
//!
//! A tower is a finite materialized prefix plus a tail rule. Symbolic
//! tails keep lim1 decidable; arbitrary lazy towers would not be.

use crate::affine::Affine;
use crate::arith::is_prime_u64;
use crate::fgab::{factor, preimage, FgGroup, GroupMap};
use crate::homalg::{hom_contra, hom_group, HomGroup};
use crate::padic::{BtClass, CoefGroup, CompletionModel};
use crate::par;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Tail rule of a direct tower. `Constant` is anchored at the prefix
/// boundary; the cyclic rules index stages globally, so any prefix must
/// materialize the same rule.
#[derive(Clone, Debug, PartialEq)]
pub enum DirectTail {
    /// G = G = ... with identity connecting maps.
    Constant(FgGroup),
    /// Stage k is Z/p^k, connecting maps the canonical monomorphisms.
    Prufer { p: u64 },
    /// Stage k is Z/p^f(k), f nondecreasing, maps multiplication by
    /// the exponent step.
    ParamCyclic { p: u64, f: Affine },
    /// Stage k is the sum of Z/p^f(j) over j < k, maps the inclusions
    /// of the first coordinates.
    PartialSums { p: u64, f: Affine },
    /// No rule beyond the prefix.
    Truncated { level: u64 },
}

impl DirectTail {
    pub fn stage(&self, k: u64) -> Result<FgGroup> {
        match self {
            DirectTail::Constant(g) => Ok(g.clone()),
            DirectTail::Prufer { p } => cyclic_p_power(*p, k),
            DirectTail::ParamCyclic { p, f } => cyclic_p_power(*p, f.eval(k)),
            DirectTail::PartialSums { p, f } => {
                let orders: Vec<BigInt> = (0..k)
                    .filter(|&j| f.eval(j) >= 1)
                    .map(|j| p_pow(*p, f.eval(j)))
                    .collect();
                // exponents are nondecreasing, so this is already the
                // invariant factor chain
                FgGroup::new(0, orders)
            }
            DirectTail::Truncated { level } => Err(Error::BadInput(format!(
                "stage {k} is beyond the truncation level {level}"
            ))),
        }
    }

    /// Canonical map from stage k to stage k + 1.
    pub fn step(&self, k: u64) -> Result<GroupMap> {
        match self {
            DirectTail::Constant(g) => Ok(GroupMap::identity(g)),
            DirectTail::Prufer { .. } | DirectTail::ParamCyclic { .. } => {
                let (p, ek, ek1) = match self {
                    DirectTail::Prufer { p } => (*p, k, k + 1),
                    DirectTail::ParamCyclic { p, f } => (*p, f.eval(k), f.eval(k + 1)),
                    _ => unreachable!(),
                };
                let src = cyclic_p_power(p, ek)?;
                let tgt = cyclic_p_power(p, ek1)?;
                if src.is_trivial() {
                    return Ok(GroupMap::zero_map(&src, &tgt));
                }
                let mult = p_pow(p, ek1 - ek);
                GroupMap::new(src, tgt, IntMat::from_fn(1, 1, |_, _| mult.clone()))
            }
            DirectTail::PartialSums { .. } => {
                let src = self.stage(k)?;
                let tgt = self.stage(k + 1)?;
                // the new summand, if any, lands at the end of the chain
                let m = IntMat::from_fn(tgt.dim(), src.dim(), |i, j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                });
                GroupMap::new(src, tgt, m)
            }
            DirectTail::Truncated { level } => Err(Error::BadInput(format!(
                "no connecting map at stage {k}: tower truncated at {level}"
            ))),
        }
    }

    fn is_trunc(&self) -> Option<u64> {
        match self {
            DirectTail::Truncated { level } => Some(*level),
            _ => None,
        }
    }
}

use crate::mat::IntMat;

/// A direct system indexed by the naturals: a materialized prefix and a
/// symbolic tail. `prefix_maps[k]` connects stage k to stage k + 1.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectTower {
    prefix: Vec<FgGroup>,
    prefix_maps: Vec<GroupMap>,
    tail: DirectTail,
}

impl DirectTower {
    pub fn new(
        prefix: Vec<FgGroup>,
        prefix_maps: Vec<GroupMap>,
        tail: DirectTail,
    ) -> Result<Self> {
        let t = DirectTower {
            prefix,
            prefix_maps,
            tail,
        };
        t.validate()?;
        Ok(t)
    }

    /// Stage k is Z/p^k with the canonical monomorphisms.
    pub fn prufer(p: u64) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(DirectTower {
            prefix: Vec::new(),
            prefix_maps: Vec::new(),
            tail: DirectTail::Prufer { p },
        })
    }

    /// Stage k is Z/p^f(k); f must not be identically zero.
    pub fn param_cyclic(p: u64, f: Affine) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        if f.is_always_zero() {
            return Err(Error::BadInput(
                "exponent law is identically zero".into(),
            ));
        }
        Ok(DirectTower {
            prefix: Vec::new(),
            prefix_maps: Vec::new(),
            tail: DirectTail::ParamCyclic { p, f },
        })
    }

    /// Stage k is the sum of Z/p^f(j) over j < k; colimit is the whole
    /// family.
    pub fn partial_sums(p: u64, f: Affine) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        if f.is_always_zero() {
            return Err(Error::BadInput(
                "exponent law is identically zero".into(),
            ));
        }
        Ok(DirectTower {
            prefix: Vec::new(),
            prefix_maps: Vec::new(),
            tail: DirectTail::PartialSums { p, f },
        })
    }

    pub fn constant(g: &FgGroup) -> Self {
        DirectTower {
            prefix: Vec::new(),
            prefix_maps: Vec::new(),
            tail: DirectTail::Constant(g.clone()),
        }
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
            if m.source() != &self.stage(k as u64)? || m.target() != &self.stage(k as u64 + 1)? {
                return Err(Error::BadInput(format!(
                    "connecting map {k} does not match its stages"
                )));
            }
        }
        // a symbolic cyclic tail fixes every stage, so a prefix must
        // materialize the rule it claims to extend
        match &self.tail {
            DirectTail::Constant(_) | DirectTail::Truncated { .. } => {}
            rule => {
                for k in 0..n as u64 {
                    if self.prefix[k as usize] != rule.stage(k)? {
                        return Err(Error::BadInput(format!(
                            "prefix stage {k} disagrees with the tail rule"
                        )));
                    }
                    if self.prefix_maps[k as usize] != rule.step(k)? {
                        return Err(Error::BadInput(format!(
                            "prefix map {k} disagrees with the tail rule"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn prefix_len(&self) -> u64 {
        self.prefix.len() as u64
    }

    pub fn tail(&self) -> &DirectTail {
        &self.tail
    }

    pub fn stage(&self, k: u64) -> Result<FgGroup> {
        if let Some(g) = self.prefix.get(k as usize) {
            return Ok(g.clone());
        }
        self.tail.stage(k)
    }

    /// Connecting map from stage k to stage k + 1.
    pub fn step(&self, k: u64) -> Result<GroupMap> {
        if let Some(m) = self.prefix_maps.get(k as usize) {
            return Ok(m.clone());
        }
        self.tail.step(k)
    }

    /// Composite of the connecting maps from stage `from` to stage `to`.
    pub fn composite(&self, from: u64, to: u64) -> Result<GroupMap> {
        if to < from {
            return Err(Error::BadInput("composite must go forward".into()));
        }
        let mut acc = GroupMap::identity(&self.stage(from)?);
        for k in from..to {
            acc = self.step(k)?.compose(&acc);
        }
        Ok(acc)
    }

    /// Materializes stages below `level` and forgets the tail rule.
    pub fn truncate(&self, level: u64) -> Result<DirectTower> {
        if let Some(l) = self.tail.is_trunc() {
            if level > l {
                return Err(Error::BadInput(format!(
                    "cannot extend a truncation from {l} to {level}"
                )));
            }
        }
        let mut prefix = Vec::new();
        let mut maps = Vec::new();
        for k in 0..level {
            prefix.push(self.stage(k)?);
            if k + 1 < level {
                maps.push(self.step(k)?);
            }
        }
        DirectTower::new(prefix, maps, DirectTail::Truncated { level })
    }
}

/// Tail rule of an inverse tower.
#[derive(Clone, Debug, PartialEq)]
pub enum InverseTail {
    /// Every stage past the boundary is `group` and every transition is
    /// `map`, an endomorphism of it.
    ConstantMap { group: FgGroup, map: GroupMap },
    /// Stage k is Hom(Z/p^k, sum over j of Z/p^f(j)), an infinite sum of
    /// cyclic groups; transitions restrict along the canonical
    /// monomorphisms. Kept symbolic: stages are not finitely generated.
    SumFamilyHom { p: u64, f: Affine },
    /// No rule beyond the prefix.
    Truncated { level: u64 },
}

/// An inverse system indexed by the naturals. `prefix_maps[k]` is the
/// transition from stage k + 1 down to stage k.
#[derive(Clone, Debug, PartialEq)]
pub struct InverseTower {
    prefix: Vec<FgGroup>,
    prefix_maps: Vec<GroupMap>,
    tail: InverseTail,
}

impl InverseTower {
    pub fn new(
        prefix: Vec<FgGroup>,
        prefix_maps: Vec<GroupMap>,
        tail: InverseTail,
    ) -> Result<Self> {
        let t = InverseTower {
            prefix,
            prefix_maps,
            tail,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn constant(g: &FgGroup) -> Self {
        InverseTower {
            prefix: Vec::new(),
            prefix_maps: Vec::new(),
            tail: InverseTail::ConstantMap {
                group: g.clone(),
                map: GroupMap::identity(g),
            },
        }
    }

    /// The tower G <- G <- ... with a fixed endomorphism as every
    /// transition.
    pub fn iterated(map: GroupMap) -> Result<Self> {
        if map.source() != map.target() {
            return Err(Error::BadInput(
                "an iterated tower needs an endomorphism".into(),
            ));
        }
        Ok(InverseTower {
            prefix: Vec::new(),
            prefix_maps: Vec::new(),
            tail: InverseTail::ConstantMap {
                group: map.source().clone(),
                map,
            },
        })
    }

    fn validate(&self) -> Result<()> {
        let n = self.prefix.len();
        match &self.tail {
            InverseTail::Truncated { level } => {
                if *level != n as u64 {
                    return Err(Error::BadInput(format!(
                        "truncation level {level} does not match prefix length {n}"
                    )));
                }
                if self.prefix_maps.len() + 1 != n && !(n == 0 && self.prefix_maps.is_empty()) {
                    return Err(Error::BadInput(
                        "a truncated tower needs one map fewer than stages".into(),
                    ));
                }
            }
            InverseTail::ConstantMap { group, map } => {
                if map.source() != group || map.target() != group {
                    return Err(Error::BadInput(
                        "tail transition must be an endomorphism of the tail group".into(),
                    ));
                }
                if self.prefix_maps.len() != n {
                    return Err(Error::BadInput(
                        "need one transition per prefix stage".into(),
                    ));
                }
            }
            InverseTail::SumFamilyHom { p, f } => {
                if !is_prime_u64(*p) {
                    return Err(Error::NotPrime(*p));
                }
                if f.is_always_zero() {
                    return Err(Error::BadInput(
                        "exponent law is identically zero".into(),
                    ));
                }
                if n != 0 {
                    return Err(Error::BadInput(
                        "a symbolic hom-family tower cannot carry a prefix".into(),
                    ));
                }
            }
        }
        for (k, m) in self.prefix_maps.iter().enumerate() {
            if m.target() != &self.stage(k as u64)? || m.source() != &self.stage(k as u64 + 1)? {
                return Err(Error::BadInput(format!(
                    "transition {k} does not match its stages"
                )));
            }
        }
        Ok(())
    }

    pub fn prefix_len(&self) -> u64 {
        self.prefix.len() as u64
    }

    pub fn tail(&self) -> &InverseTail {
        &self.tail
    }

    pub fn stage(&self, k: u64) -> Result<FgGroup> {
        if let Some(g) = self.prefix.get(k as usize) {
            return Ok(g.clone());
        }
        match &self.tail {
            InverseTail::ConstantMap { group, .. } => Ok(group.clone()),
            InverseTail::SumFamilyHom { .. } => Err(Error::Unsupported(
                "stage is an infinite direct sum, kept symbolic".into(),
            )),
            InverseTail::Truncated { level } => Err(Error::BadInput(format!(
                "stage {k} is beyond the truncation level {level}"
            ))),
        }
    }

    /// Transition from stage k + 1 down to stage k.
    pub fn transition(&self, k: u64) -> Result<GroupMap> {
        if let Some(m) = self.prefix_maps.get(k as usize) {
            return Ok(m.clone());
        }
        match &self.tail {
            InverseTail::ConstantMap { map, .. } => Ok(map.clone()),
            InverseTail::SumFamilyHom { .. } => Err(Error::Unsupported(
                "transition acts on an infinite direct sum, kept symbolic".into(),
            )),
            InverseTail::Truncated { level } => Err(Error::BadInput(format!(
                "no transition at stage {k}: tower truncated at {level}"
            ))),
        }
    }

    /// Composite transition from stage `from` down to stage `to`.
    pub fn down_composite(&self, from: u64, to: u64) -> Result<GroupMap> {
        if from < to {
            return Err(Error::BadInput("composite must go downward".into()));
        }
        let mut acc = GroupMap::identity(&self.stage(from)?);
        for k in (to..from).rev() {
            acc = self.transition(k)?.compose(&acc);
        }
        Ok(acc)
    }
}

/// Applies Hom(-, b) to a direct tower stage by stage.
///
/// Prefix stages are computed exactly; the tail is resolved to a
/// constant rule once the source exponent passes the p-exponent of b,
/// and the stabilized group and transition are re-verified three stages
/// past the boundary.
pub fn hom_tower(t: &DirectTower, b: &FgGroup) -> Result<InverseTower> {
    let boundary = match &t.tail {
        DirectTail::Prufer { p } => p_exponent_of(b, *p),
        DirectTail::ParamCyclic { p, f } => {
            let v = p_exponent_of(b, *p);
            if f.alpha == 0 {
                0
            } else {
                // first stage whose source exponent reaches v
                Affine::new(f.alpha, f.beta - v as i64).nonnegative_from()
            }
        }
        DirectTail::Constant(g) => {
            let h = hom_group(g, b);
            return InverseTower::new(
                Vec::new(),
                Vec::new(),
                InverseTail::ConstantMap {
                    group: h.group().clone(),
                    map: GroupMap::identity(h.group()),
                },
            );
        }
        DirectTail::Truncated { level } => {
            let homs: Vec<HomGroup> = par::par_map((0..*level).collect(), |k| {
                hom_group(&t.stage(k).unwrap(), b)
            });
            let maps = par::par_map((0..level.saturating_sub(1)).collect(), |k: u64| {
                hom_contra(
                    &homs[k as usize + 1],
                    &homs[k as usize],
                    &t.step(k).unwrap(),
                )
            });
            let prefix = homs.into_iter().map(|h| h.group().clone()).collect();
            return InverseTower::new(prefix, maps, InverseTail::Truncated { level: *level });
        }
        DirectTail::PartialSums { .. } => {
            return Err(Error::Unsupported(
                "hom tower of a partial-sum tower has unbounded stages".into(),
            ));
        }
    };
    // materialize through the boundary plus three verification stages
    let top = boundary + 3;
    let homs: Vec<HomGroup> = par::par_map((0..=top).collect(), |k| {
        hom_group(&t.stage(k).unwrap(), b)
    });
    let trans: Vec<GroupMap> = par::par_map((0..top).collect(), |k: u64| {
        hom_contra(
            &homs[k as usize + 1],
            &homs[k as usize],
            &t.step(k).unwrap(),
        )
    });
    let stable_group = homs[boundary as usize].group().clone();
    let stable_map = trans[boundary as usize].clone();
    for k in boundary..top {
        if homs[k as usize + 1].group() != &stable_group {
            return Err(Error::Disagreement(format!(
                "hom tower failed to stabilize at stage {}",
                k + 1
            )));
        }
        if trans[k as usize] != stable_map {
            return Err(Error::Disagreement(format!(
                "hom tower transition failed to stabilize at stage {k}"
            )));
        }
    }
    let prefix: Vec<FgGroup> = homs[..boundary as usize]
        .iter()
        .map(|h| h.group().clone())
        .collect();
    let maps: Vec<GroupMap> = trans[..boundary as usize].to_vec();
    InverseTower::new(
        prefix,
        maps,
        InverseTail::ConstantMap {
            group: stable_group,
            map: stable_map,
        },
    )
}

/// Largest e with p^e dividing the exponent of the torsion part.
fn p_exponent_of(g: &FgGroup, p: u64) -> u64 {
    let p = BigInt::from(p);
    let mut e = 0;
    let mut m = g.exponent();
    while (&m % &p).is_zero() {
        m /= &p;
        e += 1;
    }
    e
}

fn p_pow(p: u64, e: u64) -> BigInt {
    BigInt::from(p).pow(u32::try_from(e).expect("exponent fits u32"))
}

fn cyclic_p_power(p: u64, e: u64) -> Result<FgGroup> {
    if e > 100_000 {
        return Err(Error::Unsupported(format!(
            "stage exponent {e} is too large to materialize"
        )));
    }
    Ok(FgGroup::cyclic(p_pow(p, e)))
}

/// Outcome of a lim1 computation.
#[derive(Clone, Debug, PartialEq)]
pub enum Lim1Status {
    /// Images stabilize: for every stage n the image from stage n + j is
    /// constant once j >= level.
    ZeroMittagLeffler { level: u64 },
    /// Every stage is finite, so images stabilize stage by stage.
    ZeroFiniteGroups,
    /// lim1 is nonzero, with a re-checkable witness.
    NonzeroWitness { witness: Lim1Witness },
    /// Not decided by the supported rules at this truncation depth.
    Unknown { truncation: u64 },
}

impl Lim1Status {
    pub fn is_zero(&self) -> bool {
        matches!(
            self,
            Lim1Status::ZeroMittagLeffler { .. } | Lim1Status::ZeroFiniteGroups
        )
    }
}

/// Certificate that lim1 does not vanish.
#[derive(Clone, Debug, PartialEq)]
pub enum Lim1Witness {
    /// For the tower Hom(Z/p^k, sum of Z/p^f(j)): lim1 is the
    /// p-divisible part of the limit completion of the family, and this
    /// class exhibits it.
    DivisiblePart {
        p: u64,
        f: Affine,
        class: BtClass,
        precision: u32,
    },
    /// For Z <- Z given by multiplication by q, |q| >= 2: any thread
    /// solving the canonical division problem is forced to exceed every
    /// integer bound, so lim1 is the q-adic integers modulo Z.
    EscapingThread { q: BigInt },
}

impl Lim1Witness {
    pub fn description(&self) -> String {
        match self {
            Lim1Witness::DivisiblePart { p, f, .. } => format!(
                "divisible part of the limit completion of sum over k of Z/{p}^({f})"
            ),
            Lim1Witness::EscapingThread { q } => {
                format!("{q}-adic integers modulo the constants")
            }
        }
    }

    /// Re-checks the certificate at the given depth.
    ///
    /// For a divisible-part witness this verifies the class is nonzero
    /// and survives scaling by p^k for k up to the depth. For an
    /// escaping thread it verifies that any integer y with
    /// y = sum of q^(2k) for k < depth (mod q^depth) has magnitude at
    /// least q^(depth - 2), so no single integer closes the thread.
    pub fn verify(&self, depth: u64) -> Result<bool> {
        match self {
            Lim1Witness::DivisiblePart {
                p,
                f,
                class,
                precision,
            } => {
                let model = CompletionModel::new(*p, *f, *precision)?;
                if !model.is_valid_rep(class)? || model.is_zero(class)? {
                    return Ok(false);
                }
                let max_k = depth.min(*precision as u64 - 2);
                for k in 0..=max_k {
                    let scaled = BtClass {
                        ambient: class.ambient,
                        rep: class.rep.scale_p_pow(k),
                    };
                    if model.is_zero(&scaled)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Lim1Witness::EscapingThread { q } => {
                let q = q.abs();
                if q < BigInt::from(2) {
                    return Ok(false);
                }
                let depth = depth.max(3);
                let modulus = q.pow(u32::try_from(depth).expect("depth fits u32"));
                let mut partial = BigInt::zero();
                let mut pk = BigInt::one();
                let q2 = &q * &q;
                for _ in 0..depth {
                    partial = (&partial + &pk) % &modulus;
                    pk = (&pk * &q2) % &modulus;
                }
                let other = &modulus - &partial;
                let min_mag = partial.min(other);
                // any integer thread value is congruent to the partial
                // sum at every depth, so its magnitude is at least this
                let bound = q.pow(u32::try_from(depth - 2).expect("depth fits u32"));
                Ok(min_mag >= bound)
            }
        }
    }
}

/// Symbolic or exact description of an inverse limit.
#[derive(Clone, Debug, PartialEq)]
pub enum LimDescription {
    Group(FgGroup),
    Symbolic(String),
}

/// Result of `lim_and_lim1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lim1Report {
    pub status: Lim1Status,
    pub lim: LimDescription,
}

/// Computes lim and lim1 of an inverse tower.
///
/// Decidable classes: towers with all stages finite, towers whose image
/// chains provably stabilize, the rank-one scalar towers Z <- Z, and the
/// symbolic hom-family towers. Everything else is reported Unknown with
/// the truncation depth, never guessed.
pub fn lim_and_lim1(t: &InverseTower, truncation: u64, precision: u32) -> Result<Lim1Report> {
    match &t.tail {
        InverseTail::Truncated { level } => Ok(Lim1Report {
            status: Lim1Status::Unknown {
                truncation: *level,
            },
            lim: LimDescription::Symbolic("undetermined beyond the truncation".into()),
        }),
        InverseTail::SumFamilyHom { p, f } => {
            if f.alpha == 0 {
                // bounded exponent c: images drop by a factor p per step
                // and vanish after c steps in every stage
                let c = f.eval(0);
                Ok(Lim1Report {
                    status: Lim1Status::ZeroMittagLeffler { level: c },
                    lim: LimDescription::Group(FgGroup::trivial()),
                })
            } else {
                let model = CompletionModel::new(*p, *f, precision)?;
                let class = model.pinf_witness().ok_or_else(|| {
                    Error::Disagreement(
                        "unbounded family must have a nonzero divisible part".into(),
                    )
                })?;
                let witness = Lim1Witness::DivisiblePart {
                    p: *p,
                    f: *f,
                    class,
                    precision,
                };
                if !witness.verify(truncation)? {
                    return Err(Error::Disagreement(
                        "divisible-part witness failed its own verification".into(),
                    ));
                }
                Ok(Lim1Report {
                    status: Lim1Status::NonzeroWitness { witness },
                    // maps from the Prufer colimit into a reduced group
                    // vanish, and lim commutes with Hom out of a colimit
                    lim: LimDescription::Group(FgGroup::trivial()),
                })
            }
        }
        InverseTail::ConstantMap { group, map } => {
            let boundary = t.prefix_len();
            let all_finite =
                group.is_finite() && t.prefix.iter().all(|g| g.is_finite());
            // image chain of the iterated tail endomorphism
            let bits: u64 = group
                .invariant_factors()
                .iter()
                .map(|d| d.bits())
                .sum();
            let cap = group.dim() as u64 + bits + 4;
            let mut composite = GroupMap::identity(group);
            let mut stable_at = None;
            for k in 0..=cap {
                let next = map.compose(&composite);
                if images_equal(&composite, &next) {
                    stable_at = Some(k);
                    break;
                }
                composite = next;
            }
            if let Some(k0) = stable_at {
                let image = factor(&composite).image;
                let lim = LimDescription::Group(image.group.clone());
                let status = if all_finite {
                    Lim1Status::ZeroFiniteGroups
                } else {
                    Lim1Status::ZeroMittagLeffler {
                        level: boundary + k0,
                    }
                };
                return Ok(Lim1Report { status, lim });
            }
            if all_finite {
                return Err(Error::Disagreement(
                    "image chain in a finite group failed to stabilize".into(),
                ));
            }
            // the designated non-stabilizing class: Z <- Z by a scalar
            if group.free_rank() == 1 && group.torsion_len() == 0 {
                let q = map.matrix().get(0, 0).clone();
                if q.abs() >= BigInt::from(2) {
                    let witness = Lim1Witness::EscapingThread { q };
                    if !witness.verify(truncation.max(6))? {
                        return Err(Error::Disagreement(
                            "escaping-thread witness failed its own verification".into(),
                        ));
                    }
                    return Ok(Lim1Report {
                        status: Lim1Status::NonzeroWitness { witness },
                        // threads are integers divisible by every power
                        // of q, hence zero
                        lim: LimDescription::Group(FgGroup::trivial()),
                    });
                }
            }
            Ok(Lim1Report {
                status: Lim1Status::Unknown {
                    truncation,
                },
                lim: LimDescription::Symbolic(
                    "image chain did not stabilize within the search bound".into(),
                ),
            })
        }
    }
}

/// Re-checks a Mittag-Leffler level: on every prefix stage and three
/// stages past the boundary, the images from `level` steps above must
/// match the images from deeper still.
pub fn verify_mittag_leffler(t: &InverseTower, level: u64) -> Result<bool> {
    match &t.tail {
        InverseTail::SumFamilyHom { p: _, f } => {
            // symbolic: images drop by one power of p per step, so they
            // vanish (and stabilize) once the step count passes the
            // constant exponent bound
            Ok(f.alpha == 0 && level >= f.eval(0))
        }
        InverseTail::Truncated { .. } => Ok(false),
        InverseTail::ConstantMap { .. } => {
            let stages = t.prefix_len() + 3;
            for n in 0..=stages {
                let base = t.down_composite(n + level, n)?;
                for extra in 1..=3 {
                    let deeper = t.down_composite(n + level + extra, n)?;
                    if !images_equal(&base, &deeper) {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
    }
}

/// Image equality of two maps into the same target, decided by mutual
/// membership of generator images.
fn images_equal(f: &GroupMap, g: &GroupMap) -> bool {
    debug_assert_eq!(f.target(), g.target());
    let contained = |a: &GroupMap, b: &GroupMap| {
        (0..a.source().dim()).all(|i| {
            let y = a.eval(&a.source().generator(i));
            preimage(b, &y).is_some()
        })
    };
    contained(f, g) && contained(g, f)
}

/// PExt of the colimit of `t` with coefficients in `b`, computed as lim1
/// of the associated hom tower.
pub fn pext_ind(
    t: &DirectTower,
    b: &CoefGroup,
    truncation: u64,
    precision: u32,
) -> Result<Lim1Report> {
    match b {
        CoefGroup::Fg(g) => {
            let ht = hom_tower(t, g)?;
            lim_and_lim1(&ht, truncation, precision)
        }
        CoefGroup::SumFamily { p, f } => match &t.tail {
            // hom out of a tower with identity transitions has identity
            // transitions itself, so images stabilize once past the prefix
            DirectTail::Constant(g) => {
                let _ = (p, f);
                Ok(Lim1Report {
                    status: Lim1Status::ZeroMittagLeffler {
                        level: t.prefix_len(),
                    },
                    lim: LimDescription::Symbolic(format!("Hom({g}, {b})")),
                })
            }
            DirectTail::Prufer { p: tp } if tp == p => {
                let ht = InverseTower::new(
                    Vec::new(),
                    Vec::new(),
                    InverseTail::SumFamilyHom { p: *p, f: *f },
                )?;
                lim_and_lim1(&ht, truncation, precision)
            }
            DirectTail::Prufer { .. } => Err(Error::Unsupported(
                "family coefficients must share the tower prime".into(),
            )),
            _ => Err(Error::Unsupported(
                "family coefficients are supported for towers of Z/p^k only".into(),
            )),
        },
    }
}
