//! Query validation: replacing queries whose gadget has a small gap.
//!
//! For each node the operator `G′ = |0⟩⟨0| ⊗ A + |1⟩⟨1| ⊗ H_node` is built
//! with the gadget `A = 2ε·I + ε·Σ_j |1⟩⟨1|_j`. A valid query gives `G′` a
//! gap of at least `ε`; when the estimated gap is at most `ε − δ` the query
//! is replaced by `3ε·I`, a valid NO query.

use serde::{Deserialize, Serialize};

use super::{BitString, QueryMachine};
use crate::operators::matrices::projector;
use crate::operators::{Hamiltonian, LocalTerm, RegisterLayout};
use crate::spectra::{spectral_gap, SolverConfig};
use crate::Result;

/// Decides "gap(H) ≤ threshold" for the binary search.
pub trait GapOracle {
    fn gap_at_most(&self, h: &Hamiltonian, threshold: f64) -> Result<bool>;
}

/// Oracle answering by exact diagonalisation.
#[derive(Clone, Debug, Default)]
pub struct DiagonalizingOracle {
    pub config: SolverConfig,
    /// Degeneracy tolerance passed to [`spectral_gap`].
    pub degeneracy_tol: f64,
}

impl DiagonalizingOracle {
    pub fn new() -> Self {
        DiagonalizingOracle { config: SolverConfig::default(), degeneracy_tol: 1e-9 }
    }
}

impl GapOracle for DiagonalizingOracle {
    fn gap_at_most(&self, h: &Hamiltonian, threshold: f64) -> Result<bool> {
        Ok(spectral_gap(h, self.degeneracy_tol, &self.config)? <= threshold)
    }
}

/// `G′` for one node, on `X` (one qubit) followed by the node's own sites.
pub fn gadget_operator(node: &Hamiltonian, eps: f64) -> Result<Hamiltonian> {
    let n = node.layout().num_sites();
    let layout = RegisterLayout::qubits(&[("X", 1), ("Y", n)])?;
    let mut g = Hamiltonian::new(layout.clone());
    g.push(LocalTerm::new(vec![0], projector(2, 0), 2.0 * eps)?)?;
    for j in 0..n {
        g.push(LocalTerm::new(vec![0, 1 + j], projector(2, 0).kronecker(&projector(2, 1)), eps)?)?;
    }
    for t in node.terms() {
        let mut sites = vec![0];
        sites.extend(t.support().iter().map(|&k| k + 1));
        g.push(LocalTerm::from_ordered(&sites, projector(2, 1).kronecker(t.block()), t.coefficient(), &layout)?)?;
    }
    Ok(g)
}

/// Binary search for the gap of `h` to within `precision`, using only
/// threshold questions. The returned midpoint is within `precision/2`.
pub fn estimate_gap(h: &Hamiltonian, precision: f64, oracle: &dyn GapOracle) -> Result<f64> {
    let (mut lo, mut hi) = (0.0, 2.0 * h.norm_bound().max(1e-12));
    while hi - lo > precision {
        let mid = 0.5 * (lo + hi);
        if oracle.gap_at_most(h, mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationEntry {
    pub prefix: String,
    pub estimated_gap: f64,
    pub replaced: bool,
}

/// Runs validation on every node. Returns the modified machine and a log
/// entry per node.
pub fn validate_and_replace(
    machine: &QueryMachine,
    eps: f64,
    delta: f64,
    oracle: &dyn GapOracle,
) -> Result<(QueryMachine, Vec<ValidationEntry>)> {
    let mut out = machine.clone();
    let mut log = Vec::new();
    let prefixes: Vec<BitString> = machine.nodes().map(|(p, _)| p.clone()).collect();
    for p in prefixes {
        let node = &machine.node(&p).hamiltonian;
        let g = gadget_operator(node, eps)?;
        let estimate = estimate_gap(&g, delta / 4.0, oracle)?;
        let replaced = estimate <= eps - delta;
        if replaced {
            let dummy = Hamiltonian::with_terms(node.layout().clone(), vec![LocalTerm::scalar(3.0 * eps)])?;
            out = out.with_node(&p, dummy)?;
        }
        log.push(ValidationEntry { prefix: p.to_string(), estimated_gap: estimate, replaced });
    }
    Ok((out, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::queryham::fixtures::{diagonal_node, named_machine};
    use crate::queryham::Validity;

    #[test]
    fn gadget_spectrum_for_one_qubit_node() {
        let eps = 0.1;
        let g = gadget_operator(&diagonal_node(&[0.05, 0.3]), eps).unwrap();
        let spec = crate::spectra::full_spectrum(&g).unwrap();
        let oracle = [0.05, 0.2, 0.3, 0.3];
        for (a, b) in spec.iter().zip(oracle) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn estimate_is_within_precision() {
        let g = gadget_operator(&diagonal_node(&[0.0, 0.3]), 0.1).unwrap();
        let est = estimate_gap(&g, 0.001, &DiagonalizingOracle::new()).unwrap();
        assert!((est - 0.2).abs() <= 0.0005 + 1e-12);
    }

    #[test]
    fn near_degenerate_invalid_query_is_replaced() {
        // λ = 2ε − 10δ sits 10δ below the gadget ground 2ε: gap 10δ ≤ ε − δ.
        let (eps, delta) = (0.1, 0.001);
        let mach = crate::queryham::fixtures::machine_with(eps, 1, |_| 2.0 * eps - 10.0 * delta).unwrap();
        let (fixed, log) = validate_and_replace(&mach, eps, delta, &DiagonalizingOracle::new()).unwrap();
        assert!(log[0].replaced);
        assert!((log[0].estimated_gap - 10.0 * delta).abs() <= delta / 8.0 + 1e-12);
        assert_eq!(fixed.validity(&BitString::empty()), Validity::ValidNo);
    }

    #[test]
    fn valid_queries_are_kept() {
        let (eps, delta) = (0.1, 0.01);
        for name in ["yes", "no", "adaptive", "deep"] {
            let mach = named_machine(name, eps).unwrap();
            let (_, log) = validate_and_replace(&mach, eps, delta, &DiagonalizingOracle::new()).unwrap();
            assert!(log.iter().all(|e| !e.replaced), "{name}: {log:?}");
        }
    }
}
