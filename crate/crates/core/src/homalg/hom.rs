//! Hom(A, B) as a group in canonical form, with two-way translation
//! between abstract coordinates and actual homomorphisms.

use crate::fgab::{present, Element, FgGroup, GroupMap, Presented};
use crate::mat::IntMat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// One generator of Hom(A, B): source generator `j` maps to
/// `coeff * gen_i` of the target, everything else to zero. `order` is the
/// order of this cyclic summand, `None` for infinite.
#[derive(Clone, Debug)]
struct HomUnit {
    j: usize,
    i: usize,
    coeff: BigInt,
    order: Option<BigInt>,
}

/// Hom(A, B) presented on the nonzero pairwise units. `group()` is the
/// canonical form; `map_of` and `coords_of` convert in both directions.
pub struct HomGroup {
    source: FgGroup,
    target: FgGroup,
    units: Vec<HomUnit>,
    pres: Presented,
}

/// Hom splits over the cyclic summands of source and target:
/// Hom(Z/d, Z/e) is cyclic of order gcd(d, e) on x -> (e/gcd)x,
/// Hom(Z, Z/e) is Z/e on x -> x, Hom(Z, Z) is Z, and Hom(Z/d, Z) is zero.
pub fn hom_group(source: &FgGroup, target: &FgGroup) -> HomGroup {
    let mut units = Vec::new();
    for j in 0..source.dim() {
        for i in 0..target.dim() {
            let unit = match (source.gen_order(j), target.gen_order(i)) {
                (Some(d), Some(e)) => {
                    let g = d.gcd(e);
                    if g.is_one() {
                        continue;
                    }
                    HomUnit {
                        j,
                        i,
                        coeff: e / &g,
                        order: Some(g),
                    }
                }
                (Some(_), None) => continue,
                (None, Some(e)) => HomUnit {
                    j,
                    i,
                    coeff: BigInt::one(),
                    order: Some(e.clone()),
                },
                (None, None) => HomUnit {
                    j,
                    i,
                    coeff: BigInt::one(),
                    order: None,
                },
            };
            units.push(unit);
        }
    }
    let rel = IntMat::from_fn(units.len(), units.len(), |r, c| {
        if r == c {
            units[r].order.clone().unwrap_or_else(BigInt::zero)
        } else {
            BigInt::zero()
        }
    });
    let pres = present(units.len(), &rel);
    HomGroup {
        source: source.clone(),
        target: target.clone(),
        units,
        pres,
    }
}

impl HomGroup {
    pub fn group(&self) -> &FgGroup {
        &self.pres.group
    }

    pub fn source(&self) -> &FgGroup {
        &self.source
    }

    pub fn target(&self) -> &FgGroup {
        &self.target
    }

    /// The homomorphism named by abstract coordinates `x`.
    pub fn map_of(&self, x: &Element) -> GroupMap {
        assert_eq!(x.group(), self.group(), "coords not in Hom group");
        let unit_coords = self.pres.lift_elem(x);
        let mut m = IntMat::zeros(self.target.dim(), self.source.dim());
        for (u, c) in self.units.iter().zip(&unit_coords) {
            let prev = m.get(u.i, u.j).clone();
            m.set(u.i, u.j, prev + c * &u.coeff);
        }
        GroupMap::new(self.source.clone(), self.target.clone(), m)
            .expect("hom units only produce well-defined maps")
    }

    /// Abstract coordinates of an actual homomorphism.
    pub fn coords_of(&self, f: &GroupMap) -> Element {
        assert_eq!(f.source(), &self.source);
        assert_eq!(f.target(), &self.target);
        let coords: Vec<BigInt> = self
            .units
            .iter()
            .map(|u| {
                let entry = f.matrix().get(u.i, u.j);
                let (q, r) = entry.div_rem(&u.coeff);
                assert!(r.is_zero(), "well-defined map must hit unit multiples");
                q
            })
            .collect();
        self.pres.project_elem(&coords)
    }

    /// Zero coordinates, naming the zero map.
    pub fn zero(&self) -> Element {
        self.group().zero()
    }
}

/// Hom(A, f): postcompose with f: B -> B'. `from` is Hom(A, B), `to` is
/// Hom(A, B').
pub fn hom_cov(from: &HomGroup, to: &HomGroup, f: &GroupMap) -> GroupMap {
    assert_eq!(from.source(), to.source());
    assert_eq!(f.source(), from.target());
    assert_eq!(f.target(), to.target());
    induced(from, to, |g| f.compose(g))
}

/// Hom(f, B): precompose with f: A' -> A. `from` is Hom(A, B), `to` is
/// Hom(A', B).
pub fn hom_contra(from: &HomGroup, to: &HomGroup, f: &GroupMap) -> GroupMap {
    assert_eq!(from.target(), to.target());
    assert_eq!(f.source(), to.source());
    assert_eq!(f.target(), from.source());
    induced(from, to, |g| g.compose(f))
}

fn induced(
    from: &HomGroup,
    to: &HomGroup,
    act: impl Fn(&GroupMap) -> GroupMap,
) -> GroupMap {
    let cols: Vec<Vec<BigInt>> = (0..from.group().dim())
        .map(|k| {
            let g = from.map_of(&from.group().generator(k));
            to.coords_of(&act(&g)).coords().to_vec()
        })
        .collect();
    let m = IntMat::from_fn(to.group().dim(), from.group().dim(), |r, c| {
        cols[c][r].clone()
    });
    GroupMap::new(from.group().clone(), to.group().clone(), m)
        .expect("induced map on hom groups is well defined")
}
