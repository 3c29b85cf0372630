//! Bounded chain complexes of free abelian groups with exact homology,
//! chain maps together with their induced maps on homology, and the
//! one- or two-term complex realizing a group in a single degree.

use crate::fgab::{present, FgGroup, GroupMap, Presented};
use crate::mat::{kernel, solve, IntMat};
use crate::{Error, Result};
use num_bigint::BigInt;

/// A bounded complex of free groups. `ranks[i]` is the rank in degree
/// `lo + i` and `diffs[i]` is the differential from degree `lo + i + 1`
/// down to `lo + i`, stored as a `ranks[i] x ranks[i+1]` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainComplex {
    lo: i64,
    ranks: Vec<usize>,
    diffs: Vec<IntMat>,
}

impl ChainComplex {
    pub fn new(lo: i64, ranks: Vec<usize>, diffs: Vec<IntMat>) -> Result<Self> {
        if ranks.is_empty() {
            if !diffs.is_empty() {
                return Err(Error::BadInput("differentials without degrees".into()));
            }
        } else if diffs.len() + 1 != ranks.len() {
            return Err(Error::BadInput(format!(
                "{} degrees need {} differentials, got {}",
                ranks.len(),
                ranks.len() - 1,
                diffs.len()
            )));
        }
        for (i, d) in diffs.iter().enumerate() {
            if d.rows() != ranks[i] || d.cols() != ranks[i + 1] {
                return Err(Error::Shape {
                    rows: d.rows(),
                    cols: d.cols(),
                    want_rows: ranks[i],
                    want_cols: ranks[i + 1],
                });
            }
        }
        for i in 0..diffs.len().saturating_sub(1) {
            if !diffs[i].mul(&diffs[i + 1]).is_zero() {
                return Err(Error::BadInput(format!(
                    "differentials through degree {} do not compose to zero",
                    lo + i as i64 + 1
                )));
            }
        }
        Ok(ChainComplex { lo, ranks, diffs })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Highest occupied degree; one below `lo` for the empty complex.
    pub fn hi(&self) -> i64 {
        self.lo + self.ranks.len() as i64 - 1
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn diffs(&self) -> &[IntMat] {
        &self.diffs
    }

    pub fn rank_at(&self, n: i64) -> usize {
        self.index(n).map_or(0, |i| self.ranks[i])
    }

    fn index(&self, n: i64) -> Option<usize> {
        if n < self.lo {
            return None;
        }
        let i = (n - self.lo) as usize;
        (i < self.ranks.len()).then_some(i)
    }
}

/// Cycle basis in degree n together with the homology presentation on
/// cycle coordinates. The basis spans every integer cycle, so boundary
/// columns always rewrite over it.
pub(crate) fn cycle_presentation(c: &ChainComplex, n: i64) -> (IntMat, Presented) {
    let Some(idx) = c.index(n) else {
        return (IntMat::zeros(0, 0), present(0, &IntMat::zeros(0, 0)));
    };
    let k = match idx.checked_sub(1).map(|i| &c.diffs[i]) {
        Some(d_out) => kernel(d_out),
        None => IntMat::identity(c.ranks[idx]),
    };
    let rel = match c.diffs.get(idx) {
        Some(d_in) => {
            let cols: Vec<Vec<BigInt>> = (0..d_in.cols())
                .map(|j| solve(&k, &d_in.col(j)).expect("boundaries are cycles"))
                .collect();
            IntMat::from_fn(k.cols(), cols.len(), |i, j| cols[j][i].clone())
        }
        None => IntMat::zeros(k.cols(), 0),
    };
    let pres = present(k.cols(), &rel);
    (k, pres)
}

/// Degree-n homology in canonical form.
pub fn homology(c: &ChainComplex, n: i64) -> FgGroup {
    cycle_presentation(c, n).1.group
}

/// A degreewise map of complexes commuting with the differentials.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainMap {
    source: ChainComplex,
    target: ChainComplex,
    mats: Vec<IntMat>,
}

impl ChainMap {
    pub fn new(source: ChainComplex, target: ChainComplex, mats: Vec<IntMat>) -> Result<Self> {
        if source.lo != target.lo || source.ranks.len() != target.ranks.len() {
            return Err(Error::Mismatch(
                "complexes cover different degree ranges".into(),
            ));
        }
        if mats.len() != source.ranks.len() {
            return Err(Error::BadInput("need one matrix per degree".into()));
        }
        for (i, m) in mats.iter().enumerate() {
            if m.rows() != target.ranks[i] || m.cols() != source.ranks[i] {
                return Err(Error::Shape {
                    rows: m.rows(),
                    cols: m.cols(),
                    want_rows: target.ranks[i],
                    want_cols: source.ranks[i],
                });
            }
        }
        for i in 0..source.diffs.len() {
            if target.diffs[i].mul(&mats[i + 1]) != mats[i].mul(&source.diffs[i]) {
                return Err(Error::BadInput(format!(
                    "square over degree {} does not commute",
                    source.lo + i as i64
                )));
            }
        }
        Ok(ChainMap {
            source,
            target,
            mats,
        })
    }

    pub fn identity(c: &ChainComplex) -> Self {
        let mats = c.ranks.iter().map(|&r| IntMat::identity(r)).collect();
        ChainMap {
            source: c.clone(),
            target: c.clone(),
            mats,
        }
    }

    pub fn source(&self) -> &ChainComplex {
        &self.source
    }

    pub fn target(&self) -> &ChainComplex {
        &self.target
    }

    pub fn mats(&self) -> &[IntMat] {
        &self.mats
    }

    /// Map induced on degree-n homology. Cycles map to cycles because the
    /// squares commute, so the rewrite over the target cycle basis exists.
    pub fn induced(&self, n: i64) -> Result<GroupMap> {
        let (ks, ps) = cycle_presentation(&self.source, n);
        let (kt, pt) = cycle_presentation(&self.target, n);
        let idx = match self.source.index(n) {
            Some(i) => i,
            None => return Ok(GroupMap::zero_map(&ps.group, &pt.group)),
        };
        let hs = ps.group.clone();
        let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(hs.dim());
        for i in 0..hs.dim() {
            let cycle = ks.mul_vec(&ps.lift_elem(&hs.generator(i)));
            let mapped = self.mats[idx].mul_vec(&cycle);
            let w = solve(&kt, &mapped)
                .ok_or_else(|| Error::Disagreement("image of a cycle is not a cycle".into()))?;
            cols.push(pt.project_elem(&w).coords().to_vec());
        }
        let m = IntMat::from_fn(pt.group.dim(), hs.dim(), |i, j| cols[j][i].clone());
        GroupMap::new(hs, pt.group, m)
    }
}

/// The complex whose only homology is `b` in degree `n`: free generators
/// in degree n, relation columns one degree up.
pub fn em_object(b: &FgGroup, n: i64) -> ChainComplex {
    if b.torsion_len() == 0 {
        ChainComplex::new(n, vec![b.dim()], Vec::new()).expect("one-term complex")
    } else {
        ChainComplex::new(n, vec![b.dim(), b.torsion_len()], vec![b.relation_cols()])
            .expect("two-term complex")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn m1(v: i64) -> IntMat {
        IntMat::from_rows(&[vec![v]])
    }

    #[test]
    fn multiplication_by_six_has_cyclic_cokernel() {
        let c = ChainComplex::new(0, vec![1, 1], vec![m1(6)]).unwrap();
        assert_eq!(homology(&c, 0), FgGroup::cyclic(6));
        assert!(homology(&c, 1).is_trivial());
        assert!(homology(&c, -1).is_trivial());
        assert!(homology(&c, 2).is_trivial());
    }

    #[test]
    fn zero_differentials_leave_the_chain_groups() {
        let z = IntMat::zeros(2, 3);
        let c = ChainComplex::new(-2, vec![2, 3], vec![z]).unwrap();
        assert_eq!(homology(&c, -2), FgGroup::free(2));
        assert_eq!(homology(&c, -1), FgGroup::free(3));
    }

    #[test]
    fn unit_differential_is_acyclic() {
        let c = ChainComplex::new(5, vec![1, 1], vec![m1(1)]).unwrap();
        assert!(homology(&c, 5).is_trivial());
        assert!(homology(&c, 6).is_trivial());
    }

    #[test]
    fn differentials_must_compose_to_zero() {
        // d1 = d2 = identity composes to the identity
        let bad = ChainComplex::new(0, vec![1, 1, 1], vec![m1(1), m1(1)]);
        assert!(bad.is_err());
        // interleaved zero matrices are fine
        let ok = ChainComplex::new(0, vec![1, 1, 1], vec![m1(4), IntMat::zeros(1, 1)]);
        assert!(ok.is_ok());
    }

    #[test]
    fn shape_mismatches_are_rejected() {
        assert!(ChainComplex::new(0, vec![2, 1], vec![m1(3)]).is_err());
        assert!(ChainComplex::new(0, vec![1, 1], Vec::new()).is_err());
    }

    #[test]
    fn single_degree_complexes_concentrate_their_homology() {
        let b = FgGroup::new(2, vec![BigInt::from(3), BigInt::from(12)]).unwrap();
        let c = em_object(&b, -1);
        assert_eq!(c.lo(), -1);
        assert_eq!(homology(&c, -1), b);
        assert!(homology(&c, 0).is_trivial());
        assert!(homology(&c, -2).is_trivial());
    }

    #[test]
    fn concentrated_complexes_cover_small_groups() {
        let torsions: [&[i64]; 6] = [&[], &[2], &[4], &[2, 4], &[6, 12], &[64]];
        for t in torsions {
            for rank in 0..=4usize {
                let b =
                    FgGroup::new(rank, t.iter().map(|&x| BigInt::from(x)).collect()).unwrap();
                for n in [-1i64, 3] {
                    let c = em_object(&b, n);
                    assert_eq!(homology(&c, n), b, "group {b} at degree {n}");
                    assert!(homology(&c, n - 1).is_trivial());
                    assert!(homology(&c, n + 1).is_trivial());
                }
            }
        }
    }

    #[test]
    fn chain_maps_must_commute_with_the_differentials() {
        let c4 = ChainComplex::new(0, vec![1, 1], vec![m1(4)]).unwrap();
        let bad = ChainMap::new(c4.clone(), c4.clone(), vec![m1(2), m1(3)]);
        assert!(bad.is_err());
        let ok = ChainMap::new(c4.clone(), c4, vec![m1(2), m1(2)]);
        assert!(ok.is_ok());
    }

    #[test]
    fn doubling_acts_as_multiplication_on_homology() {
        let c4 = ChainComplex::new(0, vec![1, 1], vec![m1(4)]).unwrap();
        let f = ChainMap::new(c4.clone(), c4, vec![m1(2), m1(2)]).unwrap();
        let h = f.induced(0).unwrap();
        assert_eq!(*h.source(), FgGroup::cyclic(4));
        let x = h.eval(&h.source().generator(0));
        assert_eq!(x.coords()[0], BigInt::from(2));
    }

    #[test]
    fn induced_map_between_different_cokernels_is_the_canonical_inclusion() {
        let c2 = ChainComplex::new(0, vec![1, 1], vec![m1(2)]).unwrap();
        let c4 = ChainComplex::new(0, vec![1, 1], vec![m1(4)]).unwrap();
        // degree 0 entry 2, degree 1 entry 1: 4*1 = 2*2
        let f = ChainMap::new(c2, c4, vec![m1(2), m1(1)]).unwrap();
        let h = f.induced(0).unwrap();
        assert_eq!(*h.source(), FgGroup::cyclic(2));
        assert_eq!(*h.target(), FgGroup::cyclic(4));
        assert!(h.is_monic());
        assert!(f.induced(1).unwrap().source().is_trivial());
    }

    #[test]
    fn induced_map_outside_the_range_is_between_trivial_groups() {
        let c = ChainComplex::new(0, vec![1, 1], vec![m1(8)]).unwrap();
        let f = ChainMap::identity(&c);
        let h = f.induced(7).unwrap();
        assert!(h.source().is_trivial());
        assert!(h.is_zero());
    }

    #[test]
    fn cycle_presentation_spans_every_integer_cycle() {
        // d: Z^2 -> Z, (a, b) |-> 2a + 4b; cycles are (2t, -t)
        let d = IntMat::from_rows(&[vec![2, 4]]);
        let c = ChainComplex::new(0, vec![1, 2], vec![d]).unwrap();
        let (k, pres) = cycle_presentation(&c, 1);
        assert_eq!(k.cols(), 1);
        let col = k.col(0);
        let combo: BigInt = &col[0] * 2 + &col[1] * 4;
        assert!(combo.is_zero());
        assert!(!col[0].is_zero());
        assert_eq!(pres.group, FgGroup::free(1));
    }
}
