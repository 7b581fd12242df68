//! Circuits, clock constructions and history states.
//!
//! [`compile`] maps an `L`-gate circuit to `Δ·(H_in + H_prop + H_stab)`,
//! optionally with the output penalty `H_out`. Its null space is spanned
//! by the history states of [`history_state`], and its smallest nonzero
//! eigenvalue is at least `π²Δ/(64L³)`.

mod circuit;
mod compile;
pub mod gates;
mod history;
pub mod random;
mod verify;

pub use circuit::{CircuitJson, GateJson, QuantumCircuit, UNITARY_TOL};
pub use compile::{
    clock_index, clock_layout, compile, compile_with, ClockEncoding, CompiledCircuit, CLOCK_REGISTER, TAG_IN, TAG_OUT,
    TAG_PROP, TAG_STAB,
};
pub use gates::Gate;
pub use history::{history_basis, history_state};
pub use verify::{
    abstract_unary_discrepancy, gap_lower_bound, gap_report, verify_gap_bound, verify_nullspace, verify_nullspace_with,
    GapBoundReport, NullspaceReport,
};
