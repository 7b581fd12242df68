//! Hierarchical voting over query strings.
//!
//! Query answers are sampled from a verifier run on the maximally mixed
//! proof, then strings are down-weighted by `2^{-q}` per lexicographic rank
//! below the top, so the largest reachable correct string dominates. All
//! exact quantities are rationals.

mod bounds;
mod distribution;
mod model;

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

pub use bounds::{
    delta_lower_bound, delta_lower_bound_exact, divergence_partition, incorrect_margin_bound, verify_delta_positive,
    BoundCheck, DeltaReport, PartitionReport, PartitionStep,
};
pub use distribution::{
    compare_masses, exact_voting_distribution, simulate_voting, step_one_probability, survival_exponent,
    EmpiricalOutcome, ExactOutcome, MassComparison, SHARDS,
};
pub use model::{
    mixed_proof_acceptance, mixed_proof_acceptance_density, pow2_inv, rational, VerifierMode, VerifierModel,
};

/// A probability as an exact fraction and its nearest double.
#[derive(Clone, Debug, Serialize)]
pub struct Mass {
    pub exact: String,
    pub value: f64,
}

impl From<&BigRational> for Mass {
    fn from(r: &BigRational) -> Self {
        Mass { exact: r.to_string(), value: r.to_f64().unwrap_or(0.0) }
    }
}

/// Serializable summary of an exact distribution and optional samples.
#[derive(Clone, Debug, Serialize)]
pub struct VotingOutcome {
    pub m: usize,
    pub q: u64,
    pub n_c: u64,
    pub distribution: BTreeMap<String, Mass>,
    pub hash: Mass,
    pub mass_a: Mass,
    pub mass_b: Mass,
    pub mass_c: Mass,
    pub delta: Mass,
    pub delta_prime: Mass,
    pub accept: Mass,
    /// Sum of all masses minus one, as a double.
    pub normalization_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical: Option<EmpiricalOutcome>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub comparisons: Vec<MassComparison>,
}

impl VotingOutcome {
    pub fn new(exact: &ExactOutcome, empirical: Option<EmpiricalOutcome>, k_sigma: f64) -> Self {
        let total: BigRational = exact.distribution.values().fold(exact.hash.clone(), |a, b| a + b);
        let comparisons = empirical.as_ref().map(|e| compare_masses(exact, e, k_sigma)).unwrap_or_default();
        VotingOutcome {
            m: exact.m,
            q: exact.q,
            n_c: exact.n_c,
            distribution: exact.distribution.iter().map(|(y, p)| (y.to_string(), p.into())).collect(),
            hash: (&exact.hash).into(),
            mass_a: (&exact.mass_a).into(),
            mass_b: (&exact.mass_b).into(),
            mass_c: (&exact.mass_c).into(),
            delta: (&exact.delta).into(),
            delta_prime: (&exact.delta_prime).into(),
            accept: (&exact.accept).into(),
            normalization_error: (total - BigRational::from_integer(1.into())).to_f64().unwrap_or(f64::NAN),
            empirical,
            comparisons,
        }
    }
}
