//! Shortest symmetric basis exchange sequences in elementary split matroids, with
//! brute-force oracles, seeded instance generators and a JSON exchange format.

pub mod error;
pub mod format;
pub mod generators;
pub mod harness;
pub mod matroid;
pub mod oracle;
pub mod set;
pub mod solver;
pub mod split;

pub use error::{Error, Result};
pub use matroid::{
    all_bases, co_exchange_find, compatible, connected_components, contract_oracle, is_basis, matroid_rank,
    oracle_rank, symmetric_exchange_valid, verify_sequence, BasisPairInstance, ExchangeSequence, ExchangeStep,
    FnMatroid, Matroid,
};
pub use set::{Element, ElementSet, GroundSet};
pub use solver::{longest_monotone, solve, MatroidClass, SolveResult, Solver};
pub use split::{HyperedgeConstraint, SplitRepresentation, Violation};
