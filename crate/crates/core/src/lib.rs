//! Exact homological algebra over the integers.
//!
//! The crate computes Hom and Ext of finitely generated abelian groups,
//! decides purity of extensions four independent ways, takes lim and lim^1
//! of towers with symbolic tails, builds p-adic and Ext-p completions, and
//! assembles all of it into a finite model of phantom maps between
//! Eilenberg-MacLane objects in the derived category of the integers.
//!
//! Everything is exact: arbitrary-precision integers throughout, Smith
//! normal form with unimodular transforms, and p-adics carried to an
//! explicit precision with exhaustion reported rather than truncated away.

pub mod affine;
pub mod arith;
pub mod fgab;
pub mod homalg;
pub mod mat;
pub mod padic;
pub mod par;
pub mod phantom;
pub mod purity;
pub mod suite;
pub mod towers;

use num_bigint::BigInt;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected {want_rows}x{want_cols}")]
    Shape {
        rows: usize,
        cols: usize,
        want_rows: usize,
        want_cols: usize,
    },
    #[error("map is not well defined: generator {generator} of order {order} maps to an element not killed by {order}")]
    IllDefinedMap { generator: usize, order: BigInt },
    #[error("source/target mismatch: {0}")]
    Mismatch(String),
    #[error("sequence is not short exact: {0}")]
    NotExact(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("methods disagree: {0}")]
    Disagreement(String),
    #[error("stage {stage} composite is nonzero: {detail}")]
    NonzeroStage { stage: usize, detail: String },
    #[error("bad input: {0}")]
    BadInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
