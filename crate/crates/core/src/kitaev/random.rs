//! Seeded random circuits for tests and verification suites.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::QuantumCircuit;
use crate::operators::RegisterLayout;
use crate::{Result, C64};

const ONE_QUBIT: [&str; 7] = ["X", "Y", "Z", "H", "S", "T", "V"];
const TWO_QUBIT: [&str; 5] = ["CNOT", "CZ", "CH", "CV", "CVDG"];

/// Haar-random `d × d` unitary (QR of a complex Gaussian matrix with phase fix).
pub fn random_unitary<R: Rng>(d: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(d, d, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = q;
    for j in 0..d {
        let phase = r[(j, j)] / C64::new(r[(j, j)].norm(), 0.0);
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Circuit on `Q` (proof) and `W` (one ancilla qubit) with `n_qubits` qubits
/// in total and `n_gates` gates drawn from the built-in library and Haar
/// random one- and two-qubit unitaries.
pub fn random_circuit<R: Rng>(n_qubits: usize, n_gates: usize, rng: &mut R) -> Result<QuantumCircuit> {
    let layout = RegisterLayout::qubits(&[("Q", n_qubits - 1), ("W", 1)])?;
    let mut c = QuantumCircuit::new(layout);
    for _ in 0..n_gates {
        let two = n_qubits >= 2 && rng.random_bool(0.5);
        let a = rng.random_range(0..n_qubits);
        let targets = if two {
            let mut b = rng.random_range(0..n_qubits - 1);
            if b >= a {
                b += 1;
            }
            vec![a, b]
        } else {
            vec![a]
        };
        if rng.random_bool(0.25) {
            let u = random_unitary(1 << targets.len(), rng);
            c.push_unitary("U", &targets, u)?;
        } else if two {
            c.push_named(TWO_QUBIT[rng.random_range(0..TWO_QUBIT.len())], &targets)?;
        } else {
            c.push_named(ONE_QUBIT[rng.random_range(0..ONE_QUBIT.len())], &targets)?;
        }
    }
    Ok(c)
}
