//! Ext(A, B) in canonical form, with the two-way dictionary between
//! abstract classes and actual short exact sequences 0 -> B -> E -> A -> 0.

use crate::fgab::{
    descend_map, direct_sum_full, preimage, present, restrict_map, Element, FgGroup, GroupMap,
    Presented, QuotientPart, ShortExact, SubgroupPart,
};
use crate::mat::IntMat;
use num_bigint::BigInt;
use num_traits::Zero;

/// Ext(A, B) presented on one copy of B's generators per torsion
/// generator of A: a class is a block vector (phi_1, ..., phi_t) with
/// phi_i in B, modulo d_i*B in block i. Free generators of A contribute
/// nothing.
pub struct ExtPresentation {
    source: FgGroup,
    target: FgGroup,
    pres: Presented,
}

pub fn ext_group(a: &FgGroup, b: &FgGroup) -> ExtPresentation {
    let t = a.torsion_len();
    let db = b.dim();
    let rb = b.relation_cols();
    let block_rels = db + rb.cols();
    // block i carries relations d_i*e_k and B's own relations
    let rel = IntMat::from_fn(t * db, t * block_rels, |r, c| {
        let (bi, ri) = (r / db, r % db);
        let (bj, rj) = (c / block_rels, c % block_rels);
        if bi != bj {
            return BigInt::zero();
        }
        if rj < db {
            if ri == rj {
                a.invariant_factors()[bi].clone()
            } else {
                BigInt::zero()
            }
        } else {
            rb.get(ri, rj - db).clone()
        }
    });
    ExtPresentation {
        source: a.clone(),
        target: b.clone(),
        pres: present(t * db, &rel),
    }
}

impl ExtPresentation {
    pub fn group(&self) -> &FgGroup {
        &self.pres.group
    }

    pub fn source(&self) -> &FgGroup {
        &self.source
    }

    pub fn target(&self) -> &FgGroup {
        &self.target
    }

    pub fn zero_class(&self) -> Element {
        self.group().zero()
    }

    /// Class of a raw block vector (phi_1, ..., phi_t), each block a
    /// coordinate vector in B.
    pub fn class_of_rep(&self, rep: &[BigInt]) -> Element {
        assert_eq!(rep.len(), self.source.torsion_len() * self.target.dim());
        self.pres.project_elem(rep)
    }

    /// A block-vector representative of the class.
    pub fn rep_of_class(&self, x: &Element) -> Vec<BigInt> {
        assert_eq!(x.group(), self.group(), "class not in this Ext group");
        self.pres.lift_elem(x)
    }

    pub fn baer_sum(&self, x: &Element, y: &Element) -> Element {
        assert_eq!(x.group(), self.group());
        x.add(y)
    }

    /// Build the extension named by `x`: the middle group is generated by
    /// B together with one lift per generator of A, subject to
    /// d_i*lift_i = phi_i.
    pub fn realize(&self, x: &Element) -> ShortExact {
        let a = &self.source;
        let b = &self.target;
        let rep = self.rep_of_class(x);
        let t = a.torsion_len();
        let db = b.dim();
        let r = a.free_rank();
        let rb = b.relation_cols();
        let gens = db + t + r;
        let rel = IntMat::from_fn(gens, rb.cols() + t, |i, j| {
            if j < rb.cols() {
                if i < db {
                    rb.get(i, j).clone()
                } else {
                    BigInt::zero()
                }
            } else {
                let bi = j - rb.cols();
                if i < db {
                    -rep[bi * db + i].clone()
                } else if i == db + bi {
                    a.invariant_factors()[bi].clone()
                } else {
                    BigInt::zero()
                }
            }
        });
        let pres_e = present(gens, &rel);
        let e = pres_e.group.clone();
        let b_cols: Vec<usize> = (0..db).collect();
        let incl = GroupMap::new(b.clone(), e.clone(), pres_e.project.select_cols(&b_cols))
            .expect("extension inclusion is well defined");
        // lifts go to the corresponding generators of A, B goes to zero
        let onto_a = IntMat::from_fn(a.dim(), gens, |i, j| {
            if j >= db && j - db == i {
                BigInt::from(1)
            } else {
                BigInt::zero()
            }
        });
        let proj = GroupMap::new(e.clone(), a.clone(), onto_a.mul(&pres_e.lift))
            .expect("extension projection is well defined");
        ShortExact::new(incl, proj).expect("realized extension is exact")
    }

    /// Class of a given short exact sequence 0 -> B -> E -> A -> 0.
    pub fn class_of(&self, ses: &ShortExact) -> Element {
        assert_eq!(ses.quotient(), &self.source, "quotient must be A");
        assert_eq!(ses.sub(), &self.target, "sub must be B");
        let t = self.source.torsion_len();
        let db = self.target.dim();
        let mut rep = vec![BigInt::zero(); t * db];
        for i in 0..t {
            let d = self.source.invariant_factors()[i].clone();
            let lift = preimage(ses.proj(), &self.source.generator(i))
                .expect("projection of an extension is onto");
            let w = lift.scale(&d);
            let phi = preimage(ses.incl(), &w)
                .expect("d_i times a lift lies on B by exactness");
            for k in 0..db {
                rep[i * db + k] = phi.coords()[k].clone();
            }
        }
        self.class_of_rep(&rep)
    }
}

/// Ext(A, f): push classes forward along f: B -> B'. `from` is Ext(A, B),
/// `to` is Ext(A, B').
pub fn ext_cov(from: &ExtPresentation, to: &ExtPresentation, f: &GroupMap) -> GroupMap {
    assert_eq!(from.source(), to.source());
    assert_eq!(f.source(), from.target());
    assert_eq!(f.target(), to.target());
    let t = from.source.torsion_len();
    let db = from.target.dim();
    let db2 = to.target.dim();
    let cols: Vec<Vec<BigInt>> = (0..from.group().dim())
        .map(|k| {
            let rep = from.rep_of_class(&from.group().generator(k));
            let mut rep2 = vec![BigInt::zero(); t * db2];
            for i in 0..t {
                for r in 0..db2 {
                    let mut acc = BigInt::zero();
                    for c in 0..db {
                        acc += f.matrix().get(r, c) * &rep[i * db + c];
                    }
                    rep2[i * db2 + r] = acc;
                }
            }
            to.class_of_rep(&rep2).coords().to_vec()
        })
        .collect();
    let m = IntMat::from_fn(to.group().dim(), from.group().dim(), |r, c| cols[c][r].clone());
    GroupMap::new(from.group().clone(), to.group().clone(), m)
        .expect("pushforward on Ext is well defined")
}

/// Ext(f, B): pull classes back along f: A' -> A. `from` is Ext(A, B),
/// `to` is Ext(A', B).
///
/// The comparison of presentations sends block i of A to block j of A'
/// with the scalar d'_j * F[i][j] / d_i, which is integral because f is
/// well defined.
pub fn ext_contra(from: &ExtPresentation, to: &ExtPresentation, f: &GroupMap) -> GroupMap {
    assert_eq!(from.target(), to.target());
    assert_eq!(f.source(), to.source());
    assert_eq!(f.target(), from.source());
    let t = from.source.torsion_len();
    let t2 = to.source.torsion_len();
    let db = from.target.dim();
    let mut psi = vec![vec![BigInt::zero(); t2]; t];
    for i in 0..t {
        let d = &from.source.invariant_factors()[i];
        for j in 0..t2 {
            let dj = &to.source.invariant_factors()[j];
            let num = dj * f.matrix().get(i, j);
            debug_assert!((&num % d).is_zero());
            psi[i][j] = num / d;
        }
    }
    let cols: Vec<Vec<BigInt>> = (0..from.group().dim())
        .map(|k| {
            let rep = from.rep_of_class(&from.group().generator(k));
            let mut rep2 = vec![BigInt::zero(); t2 * db];
            for j in 0..t2 {
                for r in 0..db {
                    let mut acc = BigInt::zero();
                    for i in 0..t {
                        acc += &psi[i][j] * &rep[i * db + r];
                    }
                    rep2[j * db + r] = acc;
                }
            }
            to.class_of_rep(&rep2).coords().to_vec()
        })
        .collect();
    let m = IntMat::from_fn(to.group().dim(), from.group().dim(), |r, c| cols[c][r].clone());
    GroupMap::new(from.group().clone(), to.group().clone(), m)
        .expect("pullback on Ext is well defined")
}

/// The pullback extension of `ses` along f: A' -> A, as a sequence
/// 0 -> B -> E' -> A' -> 0.
pub fn pullback_ses(ses: &ShortExact, f: &GroupMap) -> ShortExact {
    assert_eq!(f.target(), ses.quotient());
    let ds = direct_sum_full(ses.middle(), f.source());
    // E' is where the two routes to A agree
    let h = ses
        .proj()
        .compose(&ds.proj_a)
        .add(&f.compose(&ds.proj_b).neg());
    let k = crate::fgab::factor(&h).kernel;
    let into_sum = ds.incl_a.compose(ses.incl());
    let incl = restrict_map(&into_sum, &SubgroupPart::full(ses.sub()), &k);
    let proj = ds.proj_b.compose(&k.incl);
    ShortExact::new(incl, proj).expect("pullback of an extension is exact")
}

/// The pushout extension of `ses` along f: B -> B', as a sequence
/// 0 -> B' -> E' -> A -> 0.
pub fn pushout_ses(ses: &ShortExact, f: &GroupMap) -> ShortExact {
    assert_eq!(f.source(), ses.sub());
    let ds = direct_sum_full(f.target(), ses.middle());
    // E' glues B' and E along the two images of B
    let h = ds
        .incl_a
        .compose(f)
        .add(&ds.incl_b.compose(ses.incl()).neg());
    let po = crate::fgab::factor(&h).cokernel;
    let incl = po.proj.compose(&ds.incl_a);
    let down = ses.proj().compose(&ds.proj_b);
    let proj = descend_map(&down, &po, &QuotientPart::whole(ses.quotient()));
    ShortExact::new(incl, proj).expect("pushout of an extension is exact")
}
