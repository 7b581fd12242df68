//! Minimises an observable over states within δ of the ground energy and
//! shows how the minimum moves as the energy window opens.

use hamgadget::operators::matrices::{kron, pauli_x, pauli_z, projector};
use hamgadget::operators::{Hamiltonian, LocalTerm, RegisterLayout};
use hamgadget::spectra::{full_spectrum, min_observable_over_low_energy, SolverConfig};

fn main() -> hamgadget::Result<()> {
    let layout = RegisterLayout::qubits(&[("A", 2)])?;
    let h = Hamiltonian::with_terms(
        layout.clone(),
        vec![LocalTerm::new(vec![0, 1], kron(&pauli_z(), &pauli_z()), 1.0)?, LocalTerm::new(vec![0], pauli_x(), 0.3)?],
    )?;
    let a = Hamiltonian::with_terms(layout, vec![LocalTerm::new(vec![0], projector(2, 0), 1.0)?])?;
    let cfg = SolverConfig::default();
    let lambda = full_spectrum(&h)?[0];
    for delta in [0.0, 0.05, 0.2, 0.5, 1.0] {
        let r = min_observable_over_low_energy(&h, &a, lambda + delta, &cfg)?;
        println!("δ = {delta:<4}: min ⟨A⟩ ∈ [{:.6}, {:.6}]", r.value, r.primal);
    }
    Ok(())
}
