//! Register layouts, local terms, Hamiltonians and pure states.

mod hamiltonian;
pub mod json;
pub mod matrices;
mod sparse;
mod state;
mod term;

pub use hamiltonian::{Hamiltonian, Observable, DENSE_LIMIT_LOG2};
pub use layout::{Register, RegisterLayout};
pub use sparse::SparseMatrix;
pub use state::{expectation, trace_distance_pure, StateVector, NORM_TOL};
pub use term::{mixed_digits, LocalTerm, HERMITIAN_TOL};

mod layout;
