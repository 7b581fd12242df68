//! Small query machines with diagonal one-qubit queries.
//!
//! A node with ground energy `λ` is `diag(λ, max(λ + ε, 3ε))`, so every
//! node has a unique ground state and valid YES nodes have their second
//! eigenvalue at `3ε`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::{BitString, QueryMachine};
use crate::operators::matrices::c;
use crate::operators::{Hamiltonian, LocalTerm, RegisterLayout};
use crate::{Error, Result};

/// Diagonal Hamiltonian on `log₂(len)` qubits of register `Y`.
pub fn diagonal_node(energies: &[f64]) -> Hamiltonian {
    let d = energies.len();
    assert!(d.is_power_of_two() && d >= 2, "need 2^n energies");
    let n = d.trailing_zeros() as usize;
    let layout = RegisterLayout::qubits(&[("Y", n)]).unwrap();
    let block = DMatrix::from_fn(d, d, |i, j| c(if i == j { energies[i] } else { 0.0 }));
    Hamiltonian::with_terms(layout, vec![LocalTerm::new((0..n).collect(), block, 1.0).unwrap()]).unwrap()
}

/// One-qubit node with ground energy `lambda`.
pub fn energy_node(eps: f64, lambda: f64) -> Hamiltonian {
    diagonal_node(&[lambda, (lambda + eps).max(3.0 * eps)])
}

/// Machine from `(prefix, ground energy)` pairs and `(string, output)` pairs.
pub fn machine_from_energies(eps: f64, nodes: &[(&str, f64)], outputs: &[(&str, u8)]) -> Result<QueryMachine> {
    let m = outputs.first().map(|(y, _)| y.len()).ok_or_else(|| Error::Machine("no outputs".into()))?;
    let nodes = nodes
        .iter()
        .map(|&(p, l)| Ok((BitString::parse(p)?, energy_node(eps, l))))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let outs = outputs.iter().map(|&(y, b)| Ok((BitString::parse(y)?, b == 1))).collect::<Result<BTreeMap<_, _>>>()?;
    QueryMachine::new(m, eps, nodes, outs, 1)
}

/// Machine whose output is the last query answer and whose node at
/// `prefix` has energy `energy(prefix)`.
pub fn machine_with(eps: f64, m: usize, energy: impl Fn(&BitString) -> f64) -> Result<QueryMachine> {
    let mut nodes = BTreeMap::new();
    for d in 0..m {
        for p in BitString::all(d) {
            let l = energy(&p);
            nodes.insert(p, energy_node(eps, l));
        }
    }
    let outs = BitString::all(m).map(|y| {
        let last = y.bit(m - 1) == 1;
        (y, last)
    });
    QueryMachine::new(m, eps, nodes, outs.collect(), 1)
}

/// Names accepted by [`named_machine`].
pub const MACHINE_NAMES: [&str; 8] = ["yes", "no", "invalid", "adaptive", "mixed", "deep", "yes-edge", "unary-probe"];

/// Named fixtures used by the command-line suites.
///
/// - `yes`: one valid YES query (`λ = 0`), output = answer.
/// - `no`: one valid NO query (`λ = 3ε`), output = answer.
/// - `invalid`: one invalid query (`λ = 2ε`), output = answer.
/// - `adaptive`: depth 2; root YES, then YES after `1` and NO after `0`.
/// - `mixed`: depth 2; root invalid, children YES and NO.
/// - `deep`: depth 3; alternating YES/NO by prefix parity.
/// - `yes-edge`: one valid YES query at the threshold (`λ = ε`).
/// - `unary-probe`: depth 3 with correct string `011` and a zero-energy
///   YES query at prefix `10`; the unary pattern `1110100` then differs from
///   the correct block only through the unary stabiliser.
pub fn named_machine(name: &str, eps: f64) -> Result<QueryMachine> {
    match name {
        "yes" => machine_with(eps, 1, |_| 0.0),
        "no" => machine_with(eps, 1, |_| 3.0 * eps),
        "invalid" => machine_with(eps, 1, |_| 2.0 * eps),
        "adaptive" => machine_with(eps, 2, |p| if p.is_empty() || p.bit(0) == 1 { 0.0 } else { 3.0 * eps }),
        "mixed" => machine_with(eps, 2, |p| match p.to_string().as_str() {
            "" => 2.0 * eps,
            "0" => 0.0,
            _ => 3.5 * eps,
        }),
        "deep" => machine_with(eps, 3, |p| if p.weight() % 2 == 0 { 0.5 * eps } else { 3.0 * eps }),
        "yes-edge" => machine_with(eps, 1, |_| eps),
        "unary-probe" => machine_with(eps, 3, |p| match p.to_string().as_str() {
            "0" | "01" | "10" => 0.0,
            _ => 3.0 * eps,
        }),
        _ => Err(Error::Input(format!("unknown machine fixture {name}"))),
    }
}
