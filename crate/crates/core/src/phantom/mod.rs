//! A finite, checkable model of phantom maps.
//!
//! Chain complexes of free groups carry exact homology; towers of them
//! with symbolic tails produce homology towers whose derived limit is
//! the group of phantom maps into a coefficient object. On top of that
//! sit stage-level certificates: cocycle representatives whose
//! composites are certified null stage by stage with explicit splice
//! splittings, and the divisibility obstruction witnessing that the
//! ambient quotient never splits off its divisible part.

mod cocycle;
mod complex;
mod ind;
mod nonsplit;

pub use cocycle::{
    composite_stagewise_check, splice_splitting, CocycleEntry, CompositeCertificate, EmEntry,
    EmRep, PhantomRep, SpliceSplit,
};
pub use complex::{em_object, homology, ChainComplex, ChainMap};
pub use ind::{phantom_em, phantom_group, IndComplex, IndTail, PhantomEm, PhantomReport};
pub use nonsplit::{nonsplit_certificate, NonsplitCertificate};
