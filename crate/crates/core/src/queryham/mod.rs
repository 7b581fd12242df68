//! Query machines and the query Hamiltonians that encode them.
//!
//! A [`QueryMachine`] is a depth-`m` tree of positive semidefinite query
//! Hamiltonians: the query asked at step `i` depends on the answers so far.
//! [`build_query_hamiltonian`] turns it into one Hamiltonian whose ground
//! space sits on a correct answer string, with every incorrect string at
//! least `ε/4^m` higher.

mod build;
pub mod fixtures;
mod machine;
mod separation;
mod validation;

pub use build::{
    build_query_hamiltonian, build_query_hamiltonian_with, build_unary_query_hamiltonian, decode_unary,
    prefix_indicator, query_layout, unary_pattern, QueryEncoding, QueryHamiltonian, QueryOptions, ZeroBranch,
    TAG_GADGET, TAG_QUERY, TAG_QUERY_STAB,
};
pub use machine::{BitString, QueryMachine, QueryMachineJson, QueryNode, QueryStringClass, Validity, VALIDITY_SLACK};
pub use separation::{verify_block_separation, BlockClass, BlockEntry, SeparationReport, SEPARATION_SLACK};
pub use validation::{
    estimate_gap, gadget_operator, validate_and_replace, DiagonalizingOracle, GapOracle, ValidationEntry,
};
