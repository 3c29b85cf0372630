//! Finitely generated abelian groups in invariant-factor form.
//!
//! A group is `Z/d1 + ... + Z/dt + Z^r` with `2 <= d1 | d2 | ... | dt`.
//! Elements are coordinate vectors against the canonical generators,
//! torsion coordinates first. All constructions reduce to Smith normal
//! form of a presentation matrix whose columns are relations.

mod map;

pub use map::{
    descend_map, exact_at, factor, preimage, restrict_map, GroupMap, MapParts, QuotientPart,
    ShortExact, SubgroupPart,
};

use crate::mat::{self, smith, IntMat};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FgGroup {
    free_rank: usize,
    invariant_factors: Vec<BigInt>,
}

impl FgGroup {
    pub fn new(free_rank: usize, invariant_factors: Vec<BigInt>) -> Result<Self> {
        let two = BigInt::from(2);
        for w in invariant_factors.windows(2) {
            if !(&w[1] % &w[0]).is_zero() {
                return Err(Error::BadInput(format!(
                    "invariant factors must form a divisibility chain, got {} before {}",
                    w[0], w[1]
                )));
            }
        }
        if invariant_factors.iter().any(|d| d < &two) {
            return Err(Error::BadInput(
                "invariant factors must all be at least 2".into(),
            ));
        }
        Ok(FgGroup {
            free_rank,
            invariant_factors,
        })
    }

    pub fn trivial() -> Self {
        FgGroup {
            free_rank: 0,
            invariant_factors: vec![],
        }
    }

    pub fn free(rank: usize) -> Self {
        FgGroup {
            free_rank: rank,
            invariant_factors: vec![],
        }
    }

    pub fn cyclic(n: impl Into<BigInt>) -> Self {
        let n: BigInt = n.into();
        assert!(!n.is_negative(), "cyclic order must be nonnegative");
        if n.is_zero() {
            FgGroup::free(1)
        } else if n.is_one() {
            FgGroup::trivial()
        } else {
            FgGroup {
                free_rank: 0,
                invariant_factors: vec![n],
            }
        }
    }

    /// Canonical form of an arbitrary direct sum of cyclic groups; orders
    /// equal to 0 contribute free summands, 1s are dropped.
    pub fn from_cyclic_orders(orders: &[BigInt]) -> Self {
        let n = orders.len();
        let rel = IntMat::from_fn(n, n, |i, j| {
            if i == j {
                orders[i].clone()
            } else {
                BigInt::zero()
            }
        });
        present(n, &rel).group
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn torsion_len(&self) -> usize {
        self.invariant_factors.len()
    }

    /// Number of canonical generators, torsion plus free.
    pub fn dim(&self) -> usize {
        self.invariant_factors.len() + self.free_rank
    }

    pub fn is_trivial(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank > 0 {
            return None;
        }
        Some(
            self.invariant_factors
                .iter()
                .fold(BigInt::one(), |acc, d| acc * d),
        )
    }

    /// Exponent of the torsion subgroup (1 when torsion free).
    pub fn exponent(&self) -> BigInt {
        self.invariant_factors
            .last()
            .cloned()
            .unwrap_or_else(BigInt::one)
    }

    pub fn torsion_part(&self) -> FgGroup {
        FgGroup {
            free_rank: 0,
            invariant_factors: self.invariant_factors.clone(),
        }
    }

    /// Relations of the canonical presentation, one column `d_i e_i` per
    /// torsion generator.
    pub fn relation_cols(&self) -> IntMat {
        IntMat::from_fn(self.dim(), self.torsion_len(), |i, j| {
            if i == j {
                self.invariant_factors[j].clone()
            } else {
                BigInt::zero()
            }
        })
    }

    /// Order of the i-th canonical generator; None for free generators.
    pub fn gen_order(&self, i: usize) -> Option<&BigInt> {
        self.invariant_factors.get(i)
    }

    pub fn zero(&self) -> Element {
        Element {
            group: self.clone(),
            coords: vec![BigInt::zero(); self.dim()],
        }
    }

    pub fn generator(&self, i: usize) -> Element {
        assert!(i < self.dim());
        let mut coords = vec![BigInt::zero(); self.dim()];
        coords[i] = BigInt::one();
        Element {
            group: self.clone(),
            coords,
        }
    }

    pub fn element(&self, coords: Vec<BigInt>) -> Element {
        assert_eq!(coords.len(), self.dim(), "coordinate length mismatch");
        Element {
            group: self.clone(),
            coords: self.reduce_vec(coords),
        }
    }

    pub fn element_from_i64(&self, coords: &[i64]) -> Element {
        self.element(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Torsion coordinates into [0, d_i), free coordinates untouched.
    pub fn reduce_vec(&self, mut coords: Vec<BigInt>) -> Vec<BigInt> {
        for (i, d) in self.invariant_factors.iter().enumerate() {
            coords[i] = num_integer::Integer::mod_floor(&coords[i], d);
        }
        coords
    }

    pub fn reduce_matrix(&self, m: &IntMat) -> IntMat {
        assert_eq!(m.rows(), self.dim());
        IntMat::from_fn(m.rows(), m.cols(), |i, j| match self.gen_order(i) {
            Some(d) => num_integer::Integer::mod_floor(m.get(i, j), d),
            None => m.get(i, j).clone(),
        })
    }

    /// All elements, torsion groups only. Panics on infinite groups.
    pub fn elements(&self) -> Vec<Element> {
        assert!(self.is_finite(), "cannot enumerate an infinite group");
        let mut out = vec![self.zero()];
        for (i, d) in self.invariant_factors.iter().enumerate() {
            let mut next = Vec::new();
            let mut k = BigInt::zero();
            while &k < d {
                for e in &out {
                    let mut coords = e.coords.clone();
                    coords[i] = k.clone();
                    next.push(Element {
                        group: self.clone(),
                        coords,
                    });
                }
                k += 1;
            }
            out = next;
        }
        out
    }
}

impl std::fmt::Debug for FgGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

impl std::fmt::Display for FgGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|d| format!("Z/{d}"))
            .collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Element {
    group: FgGroup,
    coords: Vec<BigInt>,
}

impl Element {
    pub fn group(&self) -> &FgGroup {
        &self.group
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn add(&self, rhs: &Element) -> Element {
        assert_eq!(self.group, rhs.group, "elements of different groups");
        let coords = self
            .coords
            .iter()
            .zip(&rhs.coords)
            .map(|(a, b)| a + b)
            .collect();
        self.group.element(coords)
    }

    pub fn neg(&self) -> Element {
        self.group
            .element(self.coords.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, rhs: &Element) -> Element {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, c: &BigInt) -> Element {
        self.group
            .element(self.coords.iter().map(|x| x * c).collect())
    }

    /// Additive order; None when infinite.
    pub fn order(&self) -> Option<BigInt> {
        for (i, c) in self.coords.iter().enumerate() {
            if self.group.gen_order(i).is_none() && !c.is_zero() {
                return None;
            }
        }
        let mut ord = BigInt::one();
        for (i, c) in self.coords.iter().enumerate() {
            if let Some(d) = self.group.gen_order(i) {
                let g = num_integer::Integer::gcd(c, d);
                ord = num_integer::Integer::lcm(&ord, &(d / g));
            }
        }
        Some(ord)
    }
}

impl std::fmt::Debug for Element {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let cs: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({}) in {}", cs.join(", "), self.group)
    }
}

/// A group presented as coker of a relation matrix, with the change of
/// coordinates in both directions.
///
/// `project` maps presentation coordinates (Z^gens) onto canonical
/// coordinates; `lift` sends each canonical generator to a representative
/// in Z^gens. project * lift = identity.
pub struct Presented {
    pub group: FgGroup,
    pub project: IntMat,
    pub lift: IntMat,
}

impl Presented {
    pub fn project_elem(&self, v: &[BigInt]) -> Element {
        self.group.element(self.project.mul_vec(v))
    }

    pub fn lift_elem(&self, e: &Element) -> Vec<BigInt> {
        assert_eq!(*e.group(), self.group);
        self.lift.mul_vec(e.coords())
    }
}

/// Canonicalize `Z^gens / columns(relations)`.
pub fn present(gens: usize, relations: &IntMat) -> Presented {
    assert_eq!(relations.rows(), gens, "relation rows must equal generators");
    let s = smith(relations);
    // left * relations * right = d, so x |-> left*x identifies the quotient
    // with coker(d) = sum Z/d_i + Z^(gens - rank).
    let mut torsion_idx = Vec::new();
    let mut factors = Vec::new();
    let one = BigInt::one();
    for i in 0..s.rank {
        let d = s.d.get(i, i).clone();
        if d > one {
            torsion_idx.push(i);
            factors.push(d);
        }
    }
    let free_idx: Vec<usize> = (s.rank..gens).collect();
    let mut idx = torsion_idx;
    idx.extend(free_idx);
    let group = FgGroup {
        free_rank: gens - s.rank,
        invariant_factors: factors,
    };
    let project = s.left.select_rows(&idx);
    let lift = s.left_inv.select_cols(&idx);
    debug_assert_eq!(project.mul(&lift), IntMat::identity(group.dim()));
    Presented {
        group,
        project,
        lift,
    }
}

/// Canonical form of the abelian group on `gens` generators subject to the
/// given relation rows.
pub fn canonicalize(gens: usize, relation_rows: &IntMat) -> FgGroup {
    assert_eq!(
        relation_rows.cols(),
        gens,
        "each relation row must have one entry per generator"
    );
    present(gens, &relation_rows.transpose()).group
}

/// Direct sum with the two canonical inclusions.
pub fn direct_sum(a: &FgGroup, b: &FgGroup) -> (FgGroup, GroupMap, GroupMap) {
    let da = a.dim();
    let db = b.dim();
    let ra = a.relation_cols();
    let rb = b.relation_cols();
    let rel = IntMat::from_fn(da + db, ra.cols() + rb.cols(), |i, j| {
        if i < da && j < ra.cols() {
            ra.get(i, j).clone()
        } else if i >= da && j >= ra.cols() {
            rb.get(i - da, j - ra.cols()).clone()
        } else {
            BigInt::zero()
        }
    });
    let p = present(da + db, &rel);
    let incl_a_cols: Vec<usize> = (0..da).collect();
    let incl_b_cols: Vec<usize> = (da..da + db).collect();
    let incl_a = GroupMap::new(
        a.clone(),
        p.group.clone(),
        p.project.select_cols(&incl_a_cols),
    )
    .expect("sum inclusion is well defined");
    let incl_b = GroupMap::new(
        b.clone(),
        p.group.clone(),
        p.project.select_cols(&incl_b_cols),
    )
    .expect("sum inclusion is well defined");
    (p.group, incl_a, incl_b)
}

/// A direct sum together with both inclusions and both projections.
pub struct DirectSum {
    pub sum: FgGroup,
    pub incl_a: GroupMap,
    pub incl_b: GroupMap,
    pub proj_a: GroupMap,
    pub proj_b: GroupMap,
}

pub fn direct_sum_full(a: &FgGroup, b: &FgGroup) -> DirectSum {
    let (sum, incl_a, incl_b) = direct_sum(a, b);
    // Each generator of the sum decomposes as incl_a(x) + incl_b(y); the
    // projections read off x and y.
    let aug = incl_a
        .matrix()
        .hstack(incl_b.matrix())
        .hstack(&sum.relation_cols());
    let mut ma = IntMat::zeros(a.dim(), sum.dim());
    let mut mb = IntMat::zeros(b.dim(), sum.dim());
    for j in 0..sum.dim() {
        let sol = mat::solve(&aug, sum.generator(j).coords()).expect("sum decomposes");
        for i in 0..a.dim() {
            ma.set(i, j, sol[i].clone());
        }
        for i in 0..b.dim() {
            mb.set(i, j, sol[a.dim() + i].clone());
        }
    }
    let proj_a = GroupMap::new(sum.clone(), a.clone(), ma).expect("sum projection");
    let proj_b = GroupMap::new(sum.clone(), b.clone(), mb).expect("sum projection");
    debug_assert_eq!(proj_a.compose(&incl_a), GroupMap::identity(a));
    debug_assert_eq!(proj_b.compose(&incl_b), GroupMap::identity(b));
    debug_assert!(proj_a.compose(&incl_b).is_zero());
    debug_assert!(proj_b.compose(&incl_a).is_zero());
    DirectSum {
        sum,
        incl_a,
        incl_b,
        proj_a,
        proj_b,
    }
}

/// Kernel and quotient of multiplication by n, as subgroup and quotient of `g`.
pub fn n_torsion_and_quotient(g: &FgGroup, n: &BigInt) -> (SubgroupPart, QuotientPart) {
    let f = GroupMap::mult_by(g, n);
    let parts = map::factor(&f);
    (parts.kernel, parts.cokernel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::IntMat;
    use num_bigint::BigInt;

    /// Brute-force order of Z^gens / rowspan(relations) by coset search,
    /// plus the maximal coset order. Only usable for finite quotients of
    /// small index, which is exactly what the fixtures use.
    fn coset_facts(gens: usize, rows: &[Vec<i64>]) -> (usize, BigInt) {
        let rel = IntMat::from_rows(rows).transpose();
        let in_lattice = |v: &[BigInt]| crate::mat::solve(&rel, v).is_some();
        // Enumerate cosets by BFS over unit steps from zero.
        let mut reps: Vec<Vec<BigInt>> = vec![vec![BigInt::from(0); gens]];
        let mut frontier = reps.clone();
        while let Some(v) = frontier.pop() {
            for i in 0..gens {
                for step in [1i64, -1] {
                    let mut w = v.clone();
                    w[i] += BigInt::from(step);
                    let known = reps.iter().any(|r| {
                        let diff: Vec<BigInt> =
                            r.iter().zip(&w).map(|(a, b)| a - b).collect();
                        in_lattice(&diff)
                    });
                    if !known {
                        reps.push(w.clone());
                        frontier.push(w);
                        assert!(reps.len() <= 4096, "quotient too large for oracle");
                    }
                }
            }
        }
        let order = reps.len();
        let mut max_ord = BigInt::from(1);
        for r in &reps {
            let mut k = BigInt::from(1);
            loop {
                let scaled: Vec<BigInt> = r.iter().map(|c| c * &k).collect();
                if in_lattice(&scaled) {
                    break;
                }
                k += 1;
            }
            if k > max_ord {
                max_ord = k;
            }
        }
        (order, max_ord)
    }

    #[test]
    fn canonicalize_diag_2_3() {
        let rows = vec![vec![2, 0], vec![0, 3]];
        let g = canonicalize(2, &IntMat::from_rows(&rows));
        assert_eq!(g, FgGroup::cyclic(6));
        let (order, max_ord) = coset_facts(2, &rows);
        assert_eq!(order, 6);
        assert_eq!(max_ord, BigInt::from(6)); // cyclic: an element of full order
    }

    #[test]
    fn canonicalize_no_relations() {
        let g = canonicalize(2, &IntMat::zeros(0, 2));
        assert_eq!(g, FgGroup::free(2));
    }

    #[test]
    fn canonicalize_unit_relation() {
        let g = canonicalize(1, &IntMat::from_rows(&[vec![1]]));
        assert!(g.is_trivial());
    }

    #[test]
    fn canonicalize_mixed() {
        // Z^2 / <(2,4)> = Z + Z/2
        let rows = vec![vec![2, 4]];
        let g = canonicalize(2, &IntMat::from_rows(&rows));
        assert_eq!(g.free_rank(), 1);
        assert_eq!(g.invariant_factors(), &[BigInt::from(2)]);
    }

    #[test]
    fn canonicalize_skew_lattice() {
        // Oracle check on a non-diagonal lattice.
        let rows = vec![vec![2, 1], vec![0, 4]];
        let g = canonicalize(2, &IntMat::from_rows(&rows));
        let (order, max_ord) = coset_facts(2, &rows);
        assert_eq!(g.order().unwrap(), BigInt::from(order));
        assert_eq!(g.exponent(), max_ord);
    }

    #[test]
    fn presentation_invariance_under_row_ops() {
        // Adding one relation to another leaves the quotient unchanged.
        let base = vec![vec![4, 0, 2], vec![0, 6, 3], vec![0, 0, 12]];
        let g1 = canonicalize(3, &IntMat::from_rows(&base));
        let mut tweaked = base.clone();
        for j in 0..3 {
            tweaked[0][j] += 5 * base[2][j];
            tweaked[1][j] -= 2 * base[0][j];
        }
        let g2 = canonicalize(3, &IntMat::from_rows(&tweaked));
        assert_eq!(g1, g2);
    }

    #[test]
    fn project_lift_roundtrip() {
        let rel = IntMat::from_rows(&[vec![4, 2], vec![0, 8]]).transpose();
        let p = present(2, &rel);
        for i in 0..p.group.dim() {
            let e = p.group.generator(i);
            let lifted = p.lift_elem(&e);
            assert_eq!(p.project_elem(&lifted), e);
        }
    }

    #[test]
    fn direct_sum_merges_factors() {
        let (s, ia, ib) = direct_sum(&FgGroup::cyclic(2), &FgGroup::cyclic(3));
        assert_eq!(s, FgGroup::cyclic(6));
        // Images of the two generators together span the sum.
        let a = ia.eval(&FgGroup::cyclic(2).generator(0));
        let b = ib.eval(&FgGroup::cyclic(3).generator(0));
        assert_eq!(a.order().unwrap(), BigInt::from(2));
        assert_eq!(b.order().unwrap(), BigInt::from(3));
        assert_eq!(a.add(&b).order().unwrap(), BigInt::from(6));
    }

    #[test]
    fn direct_sum_same_prime() {
        let (s, _, _) = direct_sum(&FgGroup::cyclic(2), &FgGroup::cyclic(2));
        assert_eq!(
            s.invariant_factors(),
            &[BigInt::from(2), BigInt::from(2)]
        );
        let (s, _, _) = direct_sum(&FgGroup::cyclic(4), &FgGroup::cyclic(6));
        assert_eq!(
            s.invariant_factors(),
            &[BigInt::from(2), BigInt::from(12)]
        );
    }

    #[test]
    fn direct_sum_with_trivial() {
        let a = FgGroup::from_cyclic_orders(&[BigInt::from(4), BigInt::from(0)]);
        let (s, ia, _) = direct_sum(&a, &FgGroup::trivial());
        assert_eq!(s, a);
        assert!(ia.is_monic() && ia.is_epic());
    }

    #[test]
    fn element_orders() {
        let g = FgGroup::from_cyclic_orders(&[BigInt::from(4), BigInt::from(6)]);
        // canonical form [2, 12]
        assert_eq!(
            g.invariant_factors(),
            &[BigInt::from(2), BigInt::from(12)]
        );
        let e = g.element_from_i64(&[1, 2]);
        assert_eq!(e.order().unwrap(), BigInt::from(6));
        assert!(FgGroup::free(1).generator(0).order().is_none());
    }

    #[test]
    fn enumeration_matches_order() {
        let g = FgGroup::from_cyclic_orders(&[BigInt::from(2), BigInt::from(4)]);
        let elems = g.elements();
        assert_eq!(BigInt::from(elems.len()), g.order().unwrap());
        // no duplicates
        for (i, a) in elems.iter().enumerate() {
            for b in elems.iter().skip(i + 1) {
                assert_ne!(a, b);
            }
        }
    }
}
