//! Circuit-to-Hamiltonian gadgets and the reductions built on them.
//!
//! The crate turns quantum circuits into local Hamiltonians whose null
//! space is spanned by history states, encodes adaptive sequences of
//! ground-energy queries into a single "query Hamiltonian", and reduces
//! P^QMA[log] computations to three physical problems: approximating a
//! low-energy observable (APX-SIM), a two-point correlation (APX-2-CORR)
//! and deciding a spectral gap. A hierarchical voting model with exact
//! rational arithmetic covers the complementary P^QMA[log] ⊆ PP direction.
//!
//! ```
//! use hamgadget::kitaev::{compile, ClockEncoding, QuantumCircuit};
//! use hamgadget::operators::RegisterLayout;
//!
//! let layout = RegisterLayout::qubits(&[("Q", 1), ("W", 1)]).unwrap();
//! let mut circuit = QuantumCircuit::new(layout);
//! circuit.push_named("CNOT", &[0, 1]).unwrap();
//! let compiled = compile(&circuit, ClockEncoding::Unary, 1.0, false).unwrap();
//! assert_eq!(compiled.hamiltonian.layout().num_sites(), 3);
//! ```
//!
//! Module map:
//! - [`operators`]: register layouts, local terms, Hamiltonians, states.
//! - [`spectra`]: eigensolvers, gaps, low-energy optimisation.
//! - [`kitaev`]: circuits, clock constructions, history states.
//! - [`queryham`]: query machines and query Hamiltonians.
//! - [`reductions`]: APX-SIM, APX-2-CORR and SPECTRAL-GAP instances.
//! - [`voting`]: hierarchical voting distributions and bounds.
//! - [`cli`]: the `hamgadget` command-line front end.

pub mod cli;
pub mod error;
pub mod kitaev;
pub mod operators;
pub mod queryham;
pub mod reductions;
pub mod spectra;
pub mod voting;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
