//! Homomorphisms between canonical groups, their kernels, images,
//! cokernels, and verified short exact sequences.

use super::{present, Element, FgGroup};
use crate::mat::{kernel, solve, IntMat};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::Zero;

/// A homomorphism recorded by its matrix on canonical generators:
/// column j is the image of source generator j in target coordinates.
#[derive(Clone)]
pub struct GroupMap {
    source: FgGroup,
    target: FgGroup,
    matrix: IntMat,
}

impl GroupMap {
    /// Rejects matrices that do not kill the source relations: for a source
    /// generator of order d, d times its image must vanish in the target.
    pub fn new(source: FgGroup, target: FgGroup, matrix: IntMat) -> Result<Self> {
        if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
            return Err(Error::Shape {
                rows: matrix.rows(),
                cols: matrix.cols(),
                want_rows: target.dim(),
                want_cols: source.dim(),
            });
        }
        for (j, d) in source.invariant_factors().iter().enumerate() {
            for i in 0..target.dim() {
                let v = matrix.get(i, j) * d;
                let ok = match target.gen_order(i) {
                    Some(e) => (&v % e).is_zero(),
                    None => v.is_zero(),
                };
                if !ok {
                    return Err(Error::IllDefinedMap {
                        generator: j,
                        order: d.clone(),
                    });
                }
            }
        }
        let matrix = target.reduce_matrix(&matrix);
        Ok(GroupMap {
            source,
            target,
            matrix,
        })
    }

    pub fn identity(g: &FgGroup) -> Self {
        GroupMap {
            source: g.clone(),
            target: g.clone(),
            matrix: IntMat::identity(g.dim()),
        }
    }

    pub fn zero_map(source: &FgGroup, target: &FgGroup) -> Self {
        GroupMap {
            source: source.clone(),
            target: target.clone(),
            matrix: IntMat::zeros(target.dim(), source.dim()),
        }
    }

    pub fn mult_by(g: &FgGroup, n: &BigInt) -> Self {
        let m = IntMat::identity(g.dim()).scale(n);
        GroupMap {
            source: g.clone(),
            target: g.clone(),
            matrix: g.reduce_matrix(&m),
        }
    }

    pub fn source(&self) -> &FgGroup {
        &self.source
    }

    pub fn target(&self) -> &FgGroup {
        &self.target
    }

    pub fn matrix(&self) -> &IntMat {
        &self.matrix
    }

    pub fn eval(&self, x: &Element) -> Element {
        assert_eq!(*x.group(), self.source, "element not in the source");
        self.target.element(self.matrix.mul_vec(x.coords()))
    }

    pub fn compose(&self, inner: &GroupMap) -> GroupMap {
        assert_eq!(
            inner.target, self.source,
            "composition through mismatched middle"
        );
        GroupMap {
            source: inner.source.clone(),
            target: self.target.clone(),
            matrix: self.target.reduce_matrix(&self.matrix.mul(&inner.matrix)),
        }
    }

    pub fn add(&self, rhs: &GroupMap) -> GroupMap {
        assert_eq!(self.source, rhs.source);
        assert_eq!(self.target, rhs.target);
        GroupMap {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: self.target.reduce_matrix(&self.matrix.add(&rhs.matrix)),
        }
    }

    pub fn neg(&self) -> GroupMap {
        GroupMap {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: self.target.reduce_matrix(&self.matrix.neg()),
        }
    }

    pub fn scale(&self, c: &BigInt) -> GroupMap {
        GroupMap {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: self.target.reduce_matrix(&self.matrix.scale(c)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn is_monic(&self) -> bool {
        factor(self).kernel.group.is_trivial()
    }

    pub fn is_epic(&self) -> bool {
        factor(self).cokernel.group.is_trivial()
    }
}

impl PartialEq for GroupMap {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.matrix == other.matrix
    }
}
impl Eq for GroupMap {}

impl std::fmt::Debug for GroupMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} -> {} via {:?}", self.source, self.target, self.matrix)
    }
}

/// A subgroup recorded abstractly together with its inclusion.
#[derive(Clone)]
pub struct SubgroupPart {
    pub group: FgGroup,
    pub incl: GroupMap,
}

impl SubgroupPart {
    /// The whole group viewed as a subgroup of itself.
    pub fn full(g: &FgGroup) -> Self {
        SubgroupPart {
            group: g.clone(),
            incl: GroupMap::identity(g),
        }
    }
}

/// A quotient recorded abstractly together with its projection.
#[derive(Clone)]
pub struct QuotientPart {
    pub group: FgGroup,
    pub proj: GroupMap,
}

impl QuotientPart {
    /// The group viewed as the quotient by its trivial subgroup.
    pub fn whole(g: &FgGroup) -> Self {
        QuotientPart {
            group: g.clone(),
            proj: GroupMap::identity(g),
        }
    }
}

pub struct MapParts {
    pub kernel: SubgroupPart,
    pub image: SubgroupPart,
    pub cokernel: QuotientPart,
}

/// Kernel, image and cokernel of `f`, each in canonical form with the
/// connecting map into or out of the ambient group.
pub fn factor(f: &GroupMap) -> MapParts {
    let a = f.source();
    let b = f.target();
    let rb = b.relation_cols();

    // x in Z^dim(A) maps into the relation lattice of B exactly when
    // [F | R_B] (x; y) = 0 has a solution; project that kernel to x.
    let aug = f.matrix().hstack(&rb);
    let ker_aug = kernel(&aug);
    let pre = ker_aug.take_rows(a.dim());

    // Image: generated by the columns of F, with the preimage lattice as
    // relations.
    let im_pres = present(a.dim(), &pre);
    let im_matrix = b.reduce_matrix(&f.matrix().mul(&im_pres.lift));
    let image = SubgroupPart {
        incl: GroupMap::new(im_pres.group.clone(), b.clone(), im_matrix)
            .expect("image inclusion is well defined"),
        group: im_pres.group,
    };

    // Kernel: the preimage lattice modulo the relations of A.
    let ra = a.relation_cols();
    let ker_rel_aug = kernel(&pre.hstack(&ra));
    let ker_rel = ker_rel_aug.take_rows(pre.cols());
    let ker_pres = present(pre.cols(), &ker_rel);
    let ker_matrix = a.reduce_matrix(&pre.mul(&ker_pres.lift));
    let kernel_part = SubgroupPart {
        incl: GroupMap::new(ker_pres.group.clone(), a.clone(), ker_matrix)
            .expect("kernel inclusion is well defined"),
        group: ker_pres.group,
    };

    // Cokernel: target modulo its own relations and the image columns.
    let coker_pres = present(b.dim(), &rb.hstack(f.matrix()));
    let cokernel = QuotientPart {
        proj: GroupMap::new(
            b.clone(),
            coker_pres.group.clone(),
            coker_pres.project.clone(),
        )
        .expect("cokernel projection is well defined"),
        group: coker_pres.group,
    };

    MapParts {
        kernel: kernel_part,
        image,
        cokernel,
    }
}

/// Deterministic preimage of `y` under `f`, if any: the first solution of
/// the presentation-level linear system.
pub fn preimage(f: &GroupMap, y: &Element) -> Option<Element> {
    assert_eq!(y.group(), f.target(), "element not in the target");
    let aug = f.matrix().hstack(&f.target().relation_cols());
    let sol = solve(&aug, y.coords())?;
    Some(f.source().element(sol[..f.source().dim()].to_vec()))
}

/// Restrict `f: B -> C` to given subgroups of B and C. Panics unless the
/// restriction actually lands in the designated subgroup of C.
pub fn restrict_map(f: &GroupMap, sub_b: &SubgroupPart, sub_c: &SubgroupPart) -> GroupMap {
    assert_eq!(sub_b.incl.target(), f.source());
    assert_eq!(sub_c.incl.target(), f.target());
    let cols: Vec<Vec<BigInt>> = (0..sub_b.group.dim())
        .map(|j| {
            let x = f.eval(&sub_b.incl.eval(&sub_b.group.generator(j)));
            preimage(&sub_c.incl, &x)
                .expect("restriction leaves the subgroup")
                .coords()
                .to_vec()
        })
        .collect();
    let m = IntMat::from_fn(sub_c.group.dim(), sub_b.group.dim(), |i, j| {
        cols[j][i].clone()
    });
    GroupMap::new(sub_b.group.clone(), sub_c.group.clone(), m)
        .expect("restriction is well defined")
}

/// Push `f: B -> C` down to given quotients of B and C.
pub fn descend_map(f: &GroupMap, quot_b: &QuotientPart, quot_c: &QuotientPart) -> GroupMap {
    assert_eq!(quot_b.proj.source(), f.source());
    assert_eq!(quot_c.proj.source(), f.target());
    let cols: Vec<Vec<BigInt>> = (0..quot_b.group.dim())
        .map(|j| {
            let lifted = preimage(&quot_b.proj, &quot_b.group.generator(j))
                .expect("quotient projection is onto");
            quot_c.proj.eval(&f.eval(&lifted)).coords().to_vec()
        })
        .collect();
    let m = IntMat::from_fn(quot_c.group.dim(), quot_b.group.dim(), |i, j| {
        cols[j][i].clone()
    });
    GroupMap::new(quot_b.group.clone(), quot_c.group.clone(), m)
        .expect("descended map is well defined")
}

/// Exactness of `-> f -> middle -> g ->` at the middle object: the
/// composite vanishes and every kernel generator of g lifts through f.
pub fn exact_at(f: &GroupMap, g: &GroupMap) -> bool {
    assert_eq!(f.target(), g.source(), "maps do not abut");
    if !g.compose(f).is_zero() {
        return false;
    }
    let ker = factor(g).kernel;
    (0..ker.group.dim()).all(|i| {
        let x = ker.incl.eval(&ker.group.generator(i));
        preimage(f, &x).is_some()
    })
}

/// A verified short exact sequence B -> C -> A.
#[derive(Clone)]
pub struct ShortExact {
    incl: GroupMap,
    proj: GroupMap,
}

impl ShortExact {
    pub fn new(incl: GroupMap, proj: GroupMap) -> Result<Self> {
        if incl.target() != proj.source() {
            return Err(Error::Mismatch(
                "inclusion target differs from projection source".into(),
            ));
        }
        if !incl.is_monic() {
            return Err(Error::NotExact("inclusion has a kernel".into()));
        }
        if !proj.is_epic() {
            return Err(Error::NotExact("projection misses part of the quotient".into()));
        }
        if !exact_at(&incl, &proj) {
            return Err(Error::NotExact(
                "image of inclusion differs from kernel of projection".into(),
            ));
        }
        Ok(ShortExact { incl, proj })
    }

    pub fn incl(&self) -> &GroupMap {
        &self.incl
    }

    pub fn proj(&self) -> &GroupMap {
        &self.proj
    }

    pub fn sub(&self) -> &FgGroup {
        self.incl.source()
    }

    pub fn middle(&self) -> &FgGroup {
        self.incl.target()
    }

    pub fn quotient(&self) -> &FgGroup {
        self.proj.target()
    }

    /// The split sequence B -> B + A -> A.
    pub fn split(b: &FgGroup, a: &FgGroup) -> ShortExact {
        let (sum, incl_b, incl_a) = super::direct_sum(b, a);
        // The projection is determined on generators: write each generator
        // of the sum as incl_b(x) + incl_a(y) and keep the A part.
        let mut m = IntMat::zeros(a.dim(), sum.dim());
        for j in 0..sum.dim() {
            // write generator j as incl_b(x) + incl_a(y); y is its A part
            let aug = incl_b.matrix().hstack(incl_a.matrix()).hstack(&sum.relation_cols());
            let sol = solve(&aug, sum.generator(j).coords()).expect("sum decomposes");
            for i in 0..a.dim() {
                m.set(i, j, sol[b.dim() + i].clone());
            }
        }
        let proj = GroupMap::new(sum.clone(), a.clone(), m).expect("split projection");
        ShortExact::new(incl_b, proj).expect("split sequence is exact")
    }
}

impl std::fmt::Debug for ShortExact {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "0 -> {} -> {} -> {} -> 0",
            self.sub(),
            self.middle(),
            self.quotient()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgab::{direct_sum, n_torsion_and_quotient};

    fn z() -> FgGroup {
        FgGroup::free(1)
    }

    #[test]
    fn reject_ill_defined() {
        // Z/2 -> Z/4 sending the generator to a generator is not a map.
        let m = IntMat::from_rows(&[vec![1]]);
        assert!(GroupMap::new(FgGroup::cyclic(2), FgGroup::cyclic(4), m).is_err());
        // but x -> 2x is fine
        let m = IntMat::from_rows(&[vec![2]]);
        assert!(GroupMap::new(FgGroup::cyclic(2), FgGroup::cyclic(4), m).is_ok());
        // torsion cannot map to free
        let m = IntMat::from_rows(&[vec![1]]);
        assert!(GroupMap::new(FgGroup::cyclic(2), z(), m).is_err());
    }

    #[test]
    fn factor_mult_2_on_z() {
        let f = GroupMap::mult_by(&z(), &BigInt::from(2));
        let parts = factor(&f);
        assert!(parts.kernel.group.is_trivial());
        assert_eq!(parts.image.group, z());
        assert_eq!(parts.cokernel.group, FgGroup::cyclic(2));
    }

    #[test]
    fn factor_mult_2_on_z4() {
        let g = FgGroup::cyclic(4);
        let f = GroupMap::mult_by(&g, &BigInt::from(2));
        let parts = factor(&f);
        assert_eq!(parts.kernel.group, FgGroup::cyclic(2));
        assert_eq!(parts.image.group, FgGroup::cyclic(2));
        assert_eq!(parts.cokernel.group, FgGroup::cyclic(2));
        // oracle: enumerate
        let kill: Vec<_> = g
            .elements()
            .into_iter()
            .filter(|e| e.scale(&BigInt::from(2)).is_zero())
            .collect();
        assert_eq!(kill.len(), 2);
        // kernel inclusion hits exactly those elements
        let hit: Vec<_> = parts
            .kernel
            .group
            .elements()
            .into_iter()
            .map(|e| parts.kernel.incl.eval(&e))
            .collect();
        for e in &kill {
            assert!(hit.contains(e));
        }
    }

    #[test]
    fn factor_zero_and_iso() {
        let g = FgGroup::from_cyclic_orders(&[BigInt::from(2), BigInt::from(8)]);
        let zero = GroupMap::zero_map(&g, &g);
        let parts = factor(&zero);
        assert_eq!(parts.kernel.group, g);
        assert!(parts.image.group.is_trivial());
        assert_eq!(parts.cokernel.group, g);
        let id = GroupMap::identity(&g);
        let parts = factor(&id);
        assert!(parts.kernel.group.is_trivial());
        assert_eq!(parts.image.group, g);
        assert!(parts.cokernel.group.is_trivial());
    }

    #[test]
    fn n_torsion_examples() {
        let (tor, quot) = n_torsion_and_quotient(&z(), &BigInt::from(5));
        assert!(tor.group.is_trivial());
        assert_eq!(quot.group, FgGroup::cyclic(5));

        let (tor, quot) = n_torsion_and_quotient(&FgGroup::cyclic(4), &BigInt::from(2));
        assert_eq!(tor.group, FgGroup::cyclic(2));
        assert_eq!(quot.group, FgGroup::cyclic(2));

        let g = FgGroup::from_cyclic_orders(&[BigInt::from(6), BigInt::from(0)]);
        let (tor, quot) = n_torsion_and_quotient(&g, &BigInt::from(6));
        assert_eq!(tor.group, FgGroup::cyclic(6));
        // both the Z/6 and the Z coordinate survive mod 6
        assert_eq!(
            quot.group.invariant_factors(),
            &[BigInt::from(6), BigInt::from(6)]
        );
        assert_eq!(quot.group.free_rank(), 0);
    }

    #[test]
    fn preimage_deterministic() {
        let f = GroupMap::mult_by(&FgGroup::cyclic(8), &BigInt::from(2));
        let y = FgGroup::cyclic(8).element_from_i64(&[4]);
        let x1 = preimage(&f, &y).unwrap();
        let x2 = preimage(&f, &y).unwrap();
        assert_eq!(x1, x2);
        assert_eq!(f.eval(&x1), y);
        let odd = FgGroup::cyclic(8).element_from_i64(&[3]);
        assert!(preimage(&f, &odd).is_none());
    }

    #[test]
    fn short_exact_verifies() {
        // 0 -> Z -(x4)-> Z -> Z/4 -> 0
        let incl = GroupMap::mult_by(&z(), &BigInt::from(4));
        let proj = GroupMap::new(
            z(),
            FgGroup::cyclic(4),
            IntMat::from_rows(&[vec![1]]),
        )
        .unwrap();
        let s = ShortExact::new(incl.clone(), proj.clone()).unwrap();
        assert_eq!(s.quotient(), &FgGroup::cyclic(4));

        // non-exact: claim Z/2 as quotient of the same inclusion
        let bad = GroupMap::new(z(), FgGroup::cyclic(2), IntMat::from_rows(&[vec![1]]))
            .unwrap();
        assert!(ShortExact::new(incl, bad).is_err());
    }

    #[test]
    fn split_sequence() {
        let s = ShortExact::split(&FgGroup::cyclic(4), &FgGroup::cyclic(2));
        assert_eq!(s.middle().order().unwrap(), BigInt::from(8));
    }

    #[test]
    fn exactness_probe() {
        let (_, ia, _) = direct_sum(&z(), &FgGroup::cyclic(3));
        let parts = factor(&ia);
        assert!(parts.kernel.group.is_trivial());
        let coker = parts.cokernel;
        assert!(exact_at(&ia, &coker.proj));
    }
}
