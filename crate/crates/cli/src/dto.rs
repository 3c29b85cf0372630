//! JSON documents accepted and produced on the command line.
//!
//! Integers travel as JSON numbers when they fit in an i64 and as decimal
//! strings otherwise, so large invariant factors and matrix entries survive
//! a round trip. Matrices are row major; a map document carries its source
//! and target so the matrix shape is checkable before any arithmetic runs.

use num_bigint::BigInt;
use phext::affine::Affine;
use phext::fgab::{present, FgGroup, GroupMap, ShortExact};
use phext::mat::IntMat;
use phext::padic::CoefGroup;
use phext::phantom::{
    ChainComplex, ChainMap, CocycleEntry, EmEntry, EmRep, IndComplex, IndTail, PhantomRep,
};
use phext::towers::{DirectTail, DirectTower, InverseTail, InverseTower};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Lib(phext::Error),
}

impl From<phext::Error> for CliError {
    fn from(e: phext::Error) -> Self {
        CliError::Lib(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    /// 2 for anything wrong with the request itself, 3 when the library ran
    /// out of precision or caught itself disagreeing, 1 when a stagewise
    /// check found a genuinely nonzero stage.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Lib(e) => match e {
                phext::Error::PrecisionExhausted(_) | phext::Error::Disagreement(_) => 3,
                phext::Error::NonzeroStage { .. } => 1,
                _ => 2,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn input_err(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

/// An integer that serializes as a number when it fits and as a decimal
/// string when it does not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JInt(pub BigInt);

impl Serialize for JInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(&self.0) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for JInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = JInt;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a decimal string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<JInt, E> {
                Ok(JInt(BigInt::from(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<JInt, E> {
                Ok(JInt(BigInt::from(v)))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<JInt, E> {
                BigInt::from_str(v)
                    .map(JInt)
                    .map_err(|_| E::custom(format!("{v:?} is not a decimal integer")))
            }
        }
        d.deserialize_any(V)
    }
}

pub fn jints(v: &[BigInt]) -> Vec<JInt> {
    v.iter().cloned().map(JInt).collect()
}

fn bigs(v: &[JInt]) -> Vec<BigInt> {
    v.iter().map(|j| j.0.clone()).collect()
}

/// A group in canonical form: free rank plus an invariant factor chain.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDoc {
    #[serde(default)]
    pub free_rank: usize,
    #[serde(default)]
    pub invariant_factors: Vec<JInt>,
}

impl GroupDoc {
    pub fn to_group(&self) -> CliResult<FgGroup> {
        Ok(FgGroup::new(self.free_rank, bigs(&self.invariant_factors))?)
    }

    pub fn of(g: &FgGroup) -> Self {
        GroupDoc {
            free_rank: g.free_rank(),
            invariant_factors: jints(g.invariant_factors()),
        }
    }
}

/// Either a canonical group or a presentation by generators and relations.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum GroupInput {
    Presentation {
        generators: usize,
        relations: Vec<Vec<JInt>>,
    },
    Canonical(GroupDoc),
}

impl GroupInput {
    pub fn into_group(self) -> CliResult<FgGroup> {
        match self {
            GroupInput::Canonical(doc) => doc.to_group(),
            GroupInput::Presentation {
                generators,
                relations,
            } => {
                for (j, rel) in relations.iter().enumerate() {
                    if rel.len() != generators {
                        return Err(input_err(format!(
                            "relation {j} has {} entries, expected {generators}",
                            rel.len()
                        )));
                    }
                }
                let m = IntMat::from_fn(generators, relations.len(), |i, j| {
                    relations[j][i].0.clone()
                });
                Ok(present(generators, &m).group)
            }
        }
    }
}

fn matrix_from_docs(rows: &[Vec<JInt>], want_rows: usize, want_cols: usize) -> CliResult<IntMat> {
    if rows.len() != want_rows || rows.iter().any(|r| r.len() != want_cols) {
        return Err(input_err(format!(
            "matrix must be {want_rows} rows of {want_cols} entries"
        )));
    }
    Ok(IntMat::from_fn(want_rows, want_cols, |i, j| {
        rows[i][j].0.clone()
    }))
}

pub fn matrix_doc(m: &IntMat) -> Vec<Vec<JInt>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| JInt(m.get(i, j).clone())).collect())
        .collect()
}

/// A homomorphism given by its source, target, and row-major matrix with
/// one column per source generator.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub source: GroupDoc,
    pub target: GroupDoc,
    pub matrix: Vec<Vec<JInt>>,
}

impl MapDoc {
    pub fn to_map(&self) -> CliResult<GroupMap> {
        let s = self.source.to_group()?;
        let t = self.target.to_group()?;
        let m = matrix_from_docs(&self.matrix, t.dim(), s.dim())?;
        Ok(GroupMap::new(s, t, m)?)
    }

    pub fn of(f: &GroupMap) -> Self {
        MapDoc {
            source: GroupDoc::of(f.source()),
            target: GroupDoc::of(f.target()),
            matrix: matrix_doc(f.matrix()),
        }
    }
}

/// A short exact sequence as its two maps.
#[derive(Clone, Debug, Deserialize)]
pub struct SesDoc {
    pub incl: MapDoc,
    pub proj: MapDoc,
}

impl SesDoc {
    pub fn to_ses(&self) -> CliResult<ShortExact> {
        Ok(ShortExact::new(self.incl.to_map()?, self.proj.to_map()?)?)
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct PairInput {
    #[serde(rename = "A")]
    pub a: GroupInput,
    #[serde(rename = "B")]
    pub b: GroupInput,
}

#[derive(Clone, Debug, Deserialize)]
pub struct SixTermInput {
    pub incl: MapDoc,
    pub proj: MapDoc,
    pub n: JInt,
}

#[derive(Clone, Debug, Deserialize)]
pub struct RealizeInput {
    #[serde(rename = "A")]
    pub a: GroupInput,
    #[serde(rename = "B")]
    pub b: GroupInput,
    pub class: Vec<JInt>,
}

pub fn class_coords(input: &[JInt]) -> Vec<BigInt> {
    bigs(input)
}

/// An exponent law n(k) = alpha*k + beta.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawDoc {
    pub alpha: u64,
    pub beta: i64,
}

impl LawDoc {
    pub fn to_affine(&self) -> Affine {
        Affine::new(self.alpha, self.beta)
    }

    pub fn of(f: &Affine) -> Self {
        LawDoc {
            alpha: f.alpha,
            beta: f.beta,
        }
    }
}

/// A coefficient group: canonical, or the parametrized sum family
/// of cyclic p-groups with exponents given by a law.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum CoefDoc {
    Family { sum_family: FamilyDoc },
    Group(GroupDoc),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDoc {
    pub p: u64,
    pub alpha: u64,
    pub beta: i64,
}

impl CoefDoc {
    pub fn to_coef(&self) -> CliResult<CoefGroup> {
        Ok(match self {
            CoefDoc::Group(doc) => CoefGroup::Fg(doc.to_group()?),
            CoefDoc::Family { sum_family } => CoefGroup::SumFamily {
                p: sum_family.p,
                f: Affine::new(sum_family.alpha, sum_family.beta),
            },
        })
    }
}

/// Tail rules for direct towers, tagged by kind.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DirectTailDoc {
    Constant { group: GroupDoc },
    Prufer { p: u64 },
    ParamCyclic { p: u64, alpha: u64, beta: i64 },
    PartialSums { p: u64, alpha: u64, beta: i64 },
    Truncated { level: u64 },
}

impl DirectTailDoc {
    fn to_tail(&self) -> CliResult<DirectTail> {
        Ok(match self {
            DirectTailDoc::Constant { group } => DirectTail::Constant(group.to_group()?),
            DirectTailDoc::Prufer { p } => DirectTail::Prufer { p: *p },
            DirectTailDoc::ParamCyclic { p, alpha, beta } => DirectTail::ParamCyclic {
                p: *p,
                f: Affine::new(*alpha, *beta),
            },
            DirectTailDoc::PartialSums { p, alpha, beta } => DirectTail::PartialSums {
                p: *p,
                f: Affine::new(*alpha, *beta),
            },
            DirectTailDoc::Truncated { level } => DirectTail::Truncated { level: *level },
        })
    }
}

/// A direct tower: an explicit prefix followed by a tail rule. The maps
/// list connects consecutive prefix stages and, unless the tail is a
/// truncation, also the last prefix stage into the first tail stage.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectTowerDoc {
    #[serde(default)]
    pub prefix: Vec<GroupDoc>,
    #[serde(default)]
    pub prefix_maps: Vec<Vec<Vec<JInt>>>,
    pub tail: DirectTailDoc,
}

impl DirectTowerDoc {
    pub fn to_tower(&self) -> CliResult<DirectTower> {
        let tail = self.tail.to_tail()?;
        let stages: Vec<FgGroup> = self
            .prefix
            .iter()
            .map(|d| d.to_group())
            .collect::<CliResult<_>>()?;
        let want = match tail {
            DirectTail::Truncated { .. } => stages.len().saturating_sub(1),
            _ => stages.len(),
        };
        if self.prefix_maps.len() != want {
            return Err(input_err(format!(
                "expected {want} prefix maps for {} prefix stages with this tail",
                stages.len()
            )));
        }
        let mut maps = Vec::new();
        for (k, rows) in self.prefix_maps.iter().enumerate() {
            let source = stages[k].clone();
            let target = if k + 1 < stages.len() {
                stages[k + 1].clone()
            } else {
                tail.stage(k as u64 + 1)?
            };
            let m = matrix_from_docs(rows, target.dim(), source.dim())
                .map_err(|e| input_err(format!("prefix map {k}: {e}")))?;
            maps.push(GroupMap::new(source, target, m)?);
        }
        Ok(DirectTower::new(stages, maps, tail)?)
    }
}

/// Tail rules for inverse towers.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InverseTailDoc {
    ConstantMap {
        group: GroupDoc,
        matrix: Vec<Vec<JInt>>,
    },
    SumFamilyHom {
        p: u64,
        alpha: u64,
        beta: i64,
    },
    Truncated {
        level: u64,
    },
}

impl InverseTailDoc {
    fn to_tail(&self) -> CliResult<InverseTail> {
        Ok(match self {
            InverseTailDoc::ConstantMap { group, matrix } => {
                let g = group.to_group()?;
                let m = matrix_from_docs(matrix, g.dim(), g.dim())?;
                let map = GroupMap::new(g.clone(), g.clone(), m)?;
                InverseTail::ConstantMap { group: g, map }
            }
            InverseTailDoc::SumFamilyHom { p, alpha, beta } => InverseTail::SumFamilyHom {
                p: *p,
                f: Affine::new(*alpha, *beta),
            },
            InverseTailDoc::Truncated { level } => InverseTail::Truncated { level: *level },
        })
    }
}

/// An inverse tower: prefix stages, downward transition maps, and a tail
/// rule. Transition k goes from stage k+1 down to stage k.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InverseTowerDoc {
    #[serde(default)]
    pub prefix: Vec<GroupDoc>,
    #[serde(default)]
    pub transitions: Vec<Vec<Vec<JInt>>>,
    pub tail: InverseTailDoc,
}

impl InverseTowerDoc {
    pub fn to_tower(&self) -> CliResult<InverseTower> {
        let tail = self.tail.to_tail()?;
        let stages: Vec<FgGroup> = self
            .prefix
            .iter()
            .map(|d| d.to_group())
            .collect::<CliResult<_>>()?;
        let want = match tail {
            InverseTail::Truncated { .. } => stages.len().saturating_sub(1),
            _ => stages.len(),
        };
        if self.transitions.len() != want {
            return Err(input_err(format!(
                "expected {want} transitions for {} prefix stages with this tail",
                stages.len()
            )));
        }
        let mut maps = Vec::new();
        for (k, rows) in self.transitions.iter().enumerate() {
            let target = stages[k].clone();
            let source = if k + 1 < stages.len() {
                stages[k + 1].clone()
            } else {
                match &tail {
                    InverseTail::ConstantMap { group, .. } => group.clone(),
                    _ => {
                        return Err(input_err(
                            "this tail keeps symbolic stages, so the prefix takes no boundary transition",
                        ))
                    }
                }
            };
            let m = matrix_from_docs(rows, target.dim(), source.dim())
                .map_err(|e| input_err(format!("transition {k}: {e}")))?;
            maps.push(GroupMap::new(source, target, m)?);
        }
        Ok(InverseTower::new(stages, maps, tail)?)
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct PextInput {
    pub tower: DirectTowerDoc,
    #[serde(rename = "B")]
    pub b: CoefDoc,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Lim1Input {
    pub tower: InverseTowerDoc,
}

#[derive(Clone, Debug, Deserialize)]
pub struct CompletionInput {
    #[serde(rename = "B")]
    pub b: CoefDoc,
    pub p: u64,
}

#[derive(Clone, Debug, Deserialize)]
pub struct CertifyWInput {
    #[serde(rename = "B")]
    pub b: CoefDoc,
    pub p: u64,
    pub k: u64,
}

/// A bounded complex of free groups: `degrees` is the inclusive range
/// [lo, hi], `ranks` lists the ranks from lo upward, and differential i
/// maps degree lo+i+1 to degree lo+i.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    pub degrees: [i64; 2],
    pub ranks: Vec<usize>,
    #[serde(default)]
    pub differentials: Vec<Vec<Vec<JInt>>>,
}

impl ComplexDoc {
    pub fn to_complex(&self) -> CliResult<ChainComplex> {
        let [lo, hi] = self.degrees;
        let span = hi
            .checked_sub(lo)
            .and_then(|d| usize::try_from(d + 1).ok())
            .ok_or_else(|| input_err("degrees must satisfy lo <= hi"))?;
        if self.ranks.len() != span {
            return Err(input_err(format!(
                "degree range [{lo}, {hi}] needs {span} ranks, got {}",
                self.ranks.len()
            )));
        }
        if self.differentials.len() + 1 != span {
            return Err(input_err(format!(
                "{span} degrees need {} differentials, got {}",
                span - 1,
                self.differentials.len()
            )));
        }
        let mut diffs = Vec::new();
        for (i, rows) in self.differentials.iter().enumerate() {
            let m = matrix_from_docs(rows, self.ranks[i], self.ranks[i + 1])
                .map_err(|e| input_err(format!("differential {i}: {e}")))?;
            diffs.push(m);
        }
        Ok(ChainComplex::new(lo, self.ranks.clone(), diffs)?)
    }
}

/// Tail rules for complex towers.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndTailDoc {
    ConstantComplex { complex: ComplexDoc },
    MoorePrufer { p: u64, degree: i64 },
    Truncated { level: u64 },
}

impl IndTailDoc {
    fn to_tail(&self) -> CliResult<IndTail> {
        Ok(match self {
            IndTailDoc::ConstantComplex { complex } => {
                IndTail::ConstantComplex(complex.to_complex()?)
            }
            IndTailDoc::MoorePrufer { p, degree } => IndTail::MoorePrufer {
                p: *p,
                degree: *degree,
            },
            IndTailDoc::Truncated { level } => IndTail::Truncated { level: *level },
        })
    }
}

/// A tower of complexes: prefix complexes, chain maps between consecutive
/// stages (given per degree, row major), and a tail rule.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndComplexDoc {
    #[serde(default)]
    pub prefix: Vec<ComplexDoc>,
    #[serde(default)]
    pub prefix_maps: Vec<Vec<Vec<Vec<JInt>>>>,
    pub tail: IndTailDoc,
}

impl IndComplexDoc {
    pub fn to_ind(&self) -> CliResult<IndComplex> {
        let tail = self.to_tail()?;
        let stages: Vec<ChainComplex> = self
            .prefix
            .iter()
            .map(|d| d.to_complex())
            .collect::<CliResult<_>>()?;
        let want = match tail {
            IndTail::Truncated { .. } => stages.len().saturating_sub(1),
            _ => stages.len(),
        };
        if self.prefix_maps.len() != want {
            return Err(input_err(format!(
                "expected {want} prefix maps for {} prefix stages with this tail",
                stages.len()
            )));
        }
        let mut maps = Vec::new();
        for (k, per_degree) in self.prefix_maps.iter().enumerate() {
            let source = stages[k].clone();
            let target = if k + 1 < stages.len() {
                stages[k + 1].clone()
            } else {
                tail.stage(k as u64 + 1)?
            };
            if per_degree.len() != source.ranks().len() {
                return Err(input_err(format!(
                    "prefix map {k} needs one matrix per degree ({}), got {}",
                    source.ranks().len(),
                    per_degree.len()
                )));
            }
            let mut mats = Vec::new();
            for (i, rows) in per_degree.iter().enumerate() {
                let m = matrix_from_docs(rows, target.ranks()[i], source.ranks()[i])
                    .map_err(|e| input_err(format!("prefix map {k}, degree slot {i}: {e}")))?;
                mats.push(m);
            }
            maps.push(ChainMap::new(source, target, mats)?);
        }
        Ok(IndComplex::new(stages, maps, tail)?)
    }

    fn to_tail(&self) -> CliResult<IndTail> {
        self.tail.to_tail()
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct PhantomInput {
    #[serde(rename = "X")]
    pub x: IndComplexDoc,
    #[serde(rename = "B")]
    pub b: CoefDoc,
}

fn default_em_degree() -> i64 {
    -1
}

#[derive(Clone, Debug, Deserialize)]
pub struct PhantomEmInput {
    pub tower: DirectTowerDoc,
    #[serde(rename = "B")]
    pub b: CoefDoc,
    /// The degree probed; the witness degree is the default.
    #[serde(default = "default_em_degree")]
    pub degree: i64,
}

/// One entry of a stagewise cocycle: which family coordinate it hits and
/// with which power of p.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDoc {
    pub coord: u64,
    pub val: u64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhantomRepDoc {
    pub p: u64,
    pub family: LawDoc,
    pub entries: Vec<Option<EntryDoc>>,
}

impl PhantomRepDoc {
    pub fn to_rep(&self) -> CliResult<PhantomRep> {
        let entries = self
            .entries
            .iter()
            .map(|e| {
                e.as_ref().map(|d| CocycleEntry {
                    coord: d.coord,
                    val: d.val,
                })
            })
            .collect();
        Ok(PhantomRep::from_entries(
            self.p,
            self.family.to_affine(),
            entries,
        )?)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmRepDoc {
    Phantom {
        p: u64,
        family: LawDoc,
        entries: Vec<Option<u64>>,
    },
    Honest {
        p: u64,
        family: LawDoc,
        scale: u64,
    },
}

impl EmRepDoc {
    pub fn to_rep(&self) -> CliResult<EmRep> {
        Ok(match self {
            EmRepDoc::Phantom { p, family, entries } => EmRep::Phantom {
                p: *p,
                f: family.to_affine(),
                entries: entries
                    .iter()
                    .map(|e| e.map(|val| EmEntry { val }))
                    .collect(),
            },
            EmRepDoc::Honest { p, family, scale } => {
                EmRep::honest(*p, family.to_affine(), *scale)?
            }
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct CompositeInput {
    pub f: PhantomRepDoc,
    pub g: EmRepDoc,
}
