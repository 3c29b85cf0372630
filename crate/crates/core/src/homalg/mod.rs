//! Hom groups, Ext groups, induced maps, the six-term torsion sequence,
//! and the Ulm membership test used by the purity checks.

mod ext;
mod hom;
mod six;

pub use ext::{
    ext_contra, ext_cov, ext_group, pullback_ses, pushout_ses, ExtPresentation,
};
pub use hom::{hom_contra, hom_cov, hom_group, HomGroup};
pub use six::{six_term, SixTerm};

use crate::fgab::{preimage, Element, GroupMap};
use num_bigint::BigInt;
use num_traits::Signed;

/// Whether `x` lies in n*G for every n >= 1.
///
/// For a group in canonical form the intersection of the n*G is trivial,
/// but the test is carried out as an honest divisibility check: any
/// failure already shows up at m = exponent(torsion) * (1 + max free
/// coordinate), so membership in m*G decides it.
pub fn ulm_member(x: &Element) -> bool {
    let g = x.group();
    let mut bound = BigInt::from(1);
    for c in &x.coords()[g.torsion_len()..] {
        if c.abs() > bound {
            bound = c.abs();
        }
    }
    let m = g.exponent() * (bound + BigInt::from(1));
    let f = GroupMap::mult_by(g, &m);
    preimage(&f, x).is_some()
}
