//! Instance builders and brute-force deciders for the three reductions:
//! low-energy observable thresholds, two-point correlations and spectral
//! gaps.

mod apxsim;
mod corr;
mod gap;
mod simulator;

use serde::{Deserialize, Serialize};

pub use apxsim::{
    build_apx_sim, build_apx_sim_with, decide_apx_sim, decide_observable_thresholds, ApxSimDecision, ApxSimInstance,
    ReductionParams, DECISION_SLACK, MAX_LOCALITY,
};
pub use corr::{
    append_bell_gadget, build_apx_2corr, build_apx_2corr_from_gadgeted, build_apx_2corr_with, correlation_f,
    decide_apx_2corr, history_correlation, no_bound, yes_bound, Apx2CorrDecision, Apx2CorrInstance, HistoryCorrelation,
    GADGET_GATES,
};
pub use gap::{
    build_spectral_gap_instance, build_spectral_gap_instance_with, decide_gap_value, decide_spectral_gap,
    SpectralGapDecision, SpectralGapInstance, GAP_DEGENERACY_TOL, TAG_REJECT,
};
pub use simulator::{minimum_steps, simulator_circuit};

/// Decider outcome. Instances inside the promise gap are reported as such.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "YES")]
    Yes,
    #[serde(rename = "NO")]
    No,
    #[serde(rename = "PROMISE-VIOLATED")]
    PromiseViolated,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "YES",
            Verdict::No => "NO",
            Verdict::PromiseViolated => "PROMISE-VIOLATED",
        })
    }
}
