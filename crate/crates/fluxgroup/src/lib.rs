//! Finite permutation groups at desk scale.
//!
//! Every group is fully enumerated, so class, closure and quotient
//! computations are exhaustive.

pub mod builders;
mod group;
mod perm;
mod quotient;
mod qudit;
mod subgroup;

pub use group::{ElemId, FiniteGroup, MAX_ORDER};
pub use perm::{Perm, MAX_DEGREE};
pub use quotient::{simple_perfect_quotient, CosetContext};
pub use qudit::{conjugation_period, find_qudit_params, QuditParams, QuditPreference};
pub use subgroup::Subgroup;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("degree {0} outside 1..=255")]
    BadDegree(usize),
    #[error("not a permutation: {0}")]
    NotPermutation(String),
    #[error("{0} is not an element of the group")]
    NotInGroup(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("group order exceeds {0}")]
    TooLarge(usize),
    #[error("group is solvable")]
    SolvableGroup,
    #[error("no qudit parameters{}", match .0 { Some(d) => format!(" with d = {d}"), None => String::new() })]
    NoSuchParameters(Option<u32>),
    #[error("quotient check failed: {0}")]
    QuotientCheck(String),
}
