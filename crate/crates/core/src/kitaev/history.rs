//! History states `(L+1)^{-1/2} Σ_t U_t⋯U_1|ψ,0⟩ ⊗ |t⟩`.

use nalgebra::DVector;

use super::compile::{clock_index, clock_layout, ClockEncoding};
use super::QuantumCircuit;
use crate::operators::StateVector;
use crate::{Result, C64};

/// History state of `proof` on the compiled layout (circuit registers then clock).
pub fn history_state(circuit: &QuantumCircuit, proof: &StateVector, encoding: ClockEncoding) -> Result<StateVector> {
    let layout = clock_layout(circuit, encoding)?;
    let steps = circuit.len();
    let clock_dim = layout.dim() / circuit.layout().dim();
    let input = circuit.embed_proof(proof)?;
    let traj = circuit.trajectory(&input);
    let norm = C64::new(1.0 / ((steps + 1) as f64).sqrt(), 0.0);
    let mut amps = DVector::zeros(layout.dim());
    for (t, phi) in traj.iter().enumerate() {
        let ci = clock_index(encoding, steps, t);
        for (x, a) in phi.iter().enumerate() {
            amps[x * clock_dim + ci] += a * norm;
        }
    }
    StateVector::new(layout, amps)
}

/// History states of every computational basis proof, in proof-index order.
pub fn history_basis(circuit: &QuantumCircuit, encoding: ClockEncoding) -> Result<Vec<StateVector>> {
    let pl = circuit.proof_layout()?;
    (0..pl.dim()).map(|i| history_state(circuit, &StateVector::basis(pl.clone(), i)?, encoding)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kitaev::compile;
    use crate::operators::RegisterLayout;

    #[test]
    fn history_state_is_annihilated() {
        let l = RegisterLayout::qubits(&[("Q", 1), ("W", 1)]).unwrap();
        let mut circ = QuantumCircuit::new(l);
        circ.push_named("H", &[0]).unwrap();
        circ.push_named("CNOT", &[0, 1]).unwrap();
        circ.push_named("T", &[1]).unwrap();
        for enc in [ClockEncoding::Abstract, ClockEncoding::Unary] {
            let h = compile(&circ, enc, 1.0, false).unwrap().hamiltonian;
            for s in history_basis(&circ, enc).unwrap() {
                assert!(h.apply(s.amplitudes()).norm() < 1e-13);
            }
        }
    }
}
