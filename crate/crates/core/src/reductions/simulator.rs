//! Circuits that read a unary query string and write the machine's output.
//!
//! With `m = 1` the single gate `|0⟩⟨0| ⊗ X^{f(0)} + |1⟩⟨1| ⊗ X^{f(1)}`
//! on `(Q₁, W₁)` is placed last. For `m ≥ 2` the output is accumulated in a
//! scratch ancilla `S` via `f(x) = f₀ ⊕ ⊕_k q_k (f_k ⊕ f_{k−1})` (valid on
//! unary inputs, where `q_k = [k ≤ |x|]`) and copied to `W₁` by a final
//! CNOT. Identity gates on `W₁` pad the circuit to the requested length,
//! so `W₁` stays `|0⟩` until the last step.

use crate::kitaev::QuantumCircuit;
use crate::operators::matrices::{identity, pauli_x, projector};
use crate::operators::RegisterLayout;
use crate::queryham::{BitString, QueryMachine};
use crate::{Error, Result};

/// Fewest gates [`simulator_circuit`] can use for `machine`.
pub fn minimum_steps(machine: &QueryMachine) -> usize {
    if machine.m() == 1 {
        return 1;
    }
    let f: Vec<bool> = BitString::all(machine.m()).map(|y| machine.output(&y)).collect();
    let flips = f.windows(2).filter(|w| w[0] != w[1]).count();
    usize::from(f[0]) + flips + 1
}

/// Simulator circuit with exactly `steps` gates on `Q` (`2^m − 1` qubits),
/// `W` (`w_qubits` qubits) and, for `m ≥ 2`, a scratch register `S`.
pub fn simulator_circuit(machine: &QueryMachine, steps: usize, w_qubits: usize) -> Result<QuantumCircuit> {
    let m = machine.m();
    let need = minimum_steps(machine);
    if steps < need {
        return Err(Error::Circuit(format!("simulator needs at least {need} gates, {steps} requested")));
    }
    if w_qubits == 0 {
        return Err(Error::Circuit("W register needs at least one qubit".into()));
    }
    let q = (1usize << m) - 1;
    let mut regs = vec![("Q", q), ("W", w_qubits)];
    if m >= 2 {
        regs.push(("S", 1));
    }
    let layout = RegisterLayout::qubits(&regs)?;
    let mut c = QuantumCircuit::new(layout.clone());
    c.readonly = Some("Q".into());
    if m >= 2 {
        c.ancillas = vec!["W".into(), "S".into()];
    }
    let w1 = layout.site("W", 0)?;
    let f: Vec<bool> = BitString::all(m).map(|y| machine.output(&y)).collect();

    if m == 1 {
        for _ in 0..steps - 1 {
            c.push_named("ID", &[w1])?;
        }
        let xf = |b: bool| if b { pauli_x() } else { identity(2) };
        let u = projector(2, 0).kronecker(&xf(f[0])) + projector(2, 1).kronecker(&xf(f[1]));
        c.push_unitary("READ", &[layout.site("Q", 0)?, w1], u)?;
        return Ok(c);
    }

    let s = layout.site("S", 0)?;
    if f[0] {
        c.push_named("X", &[s])?;
    }
    for k in 1..f.len() {
        if f[k] != f[k - 1] {
            c.push_named("CNOT", &[layout.site("Q", k - 1)?, s])?;
        }
    }
    while c.len() < steps - 1 {
        c.push_named("ID", &[w1])?;
    }
    c.push_named("CNOT", &[s, w1])?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::StateVector;
    use crate::queryham::fixtures::{machine_from_energies, machine_with, named_machine};
    use crate::queryham::unary_pattern;

    fn check_outputs(mach: &QueryMachine, steps: usize) {
        let c = simulator_circuit(mach, steps, 1).unwrap();
        assert_eq!(c.len(), steps);
        c.check_readonly().unwrap();
        let pl = c.proof_layout().unwrap();
        for y in BitString::all(mach.m()) {
            let idx = pl.index_of(&unary_pattern(&y));
            let p = c.acceptance_probability(&StateVector::basis(pl.clone(), idx).unwrap()).unwrap();
            assert_eq!(p, if mach.output(&y) { 1.0 } else { 0.0 }, "string {y}");
        }
    }

    #[test]
    fn computes_final_map_on_unary_inputs() {
        for name in ["yes", "no", "adaptive", "deep"] {
            let mach = named_machine(name, 0.1).unwrap();
            check_outputs(&mach, minimum_steps(&mach) + 2);
        }
    }

    #[test]
    fn constant_one_output() {
        let nodes = [("", 0.0), ("0", 0.0), ("1", 0.0)];
        let mach = machine_from_energies(0.1, &nodes, &[("00", 1), ("01", 1), ("10", 1), ("11", 1)]).unwrap();
        assert_eq!(minimum_steps(&mach), 2);
        check_outputs(&mach, 2);
        check_outputs(&machine_with(0.1, 2, |_| 0.0).unwrap(), 4);
    }

    #[test]
    fn output_stays_zero_until_last_gate() {
        let mach = named_machine("adaptive", 0.1).unwrap();
        let c = simulator_circuit(&mach, 6, 1).unwrap();
        let w1 = c.layout().site("W", 0).unwrap();
        assert!(c.gates()[..5].iter().all(|g| !(g.targets.contains(&w1) && g.label != "ID")));
    }
}
