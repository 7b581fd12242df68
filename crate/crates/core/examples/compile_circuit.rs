//! Compiles a two-gate circuit with both clock encodings, checks that its
//! history states have zero energy and compares the gap with its lower bound.

use hamgadget::kitaev::{compile, gap_lower_bound, history_state, verify_nullspace, ClockEncoding, QuantumCircuit};
use hamgadget::operators::{RegisterLayout, StateVector};

fn main() -> hamgadget::Result<()> {
    let layout = RegisterLayout::qubits(&[("Q", 1), ("W", 1)])?;
    let mut circuit = QuantumCircuit::new(layout);
    circuit.push_named("H", &[0])?;
    circuit.push_named("CNOT", &[0, 1])?;

    for enc in [ClockEncoding::Abstract, ClockEncoding::Unary] {
        let comp = compile(&circuit, enc, 1.0, false)?;
        let proof = StateVector::basis(circuit.proof_layout()?, 1)?;
        let hist = history_state(&circuit, &proof, enc)?;
        let energy = comp.hamiltonian.quadratic_form(hist.amplitudes()).re;
        let report = verify_nullspace(&circuit, enc, 1e-7)?;
        let gap = hamgadget::kitaev::verify_gap_bound(&circuit, enc, 1.0)?;
        println!(
            "{enc:?}: {} sites, history energy {energy:.1e}, kernel {} = history span {} (angle {:.1e}), gap {:.4} ≥ {:.4}",
            comp.hamiltonian.layout().num_sites(),
            report.kernel_dim,
            report.history_dim,
            report.max_principal_angle,
            gap.smallest_nonzero,
            gap_lower_bound(1.0, circuit.len()),
        );
    }
    Ok(())
}
