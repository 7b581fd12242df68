//! Gap instances `H_final = I_B ⊗ H + 4ε·|0⟩⟨0|_B ⊗ T`.
//!
//! `H` is the unary query Hamiltonian of the validated machine, built with
//! the gadget zero branch so that its ground state is unique. `T` projects
//! onto unary encodings of rejecting strings. If the correct string is
//! accepted, both `B` blocks share the ground energy and the gap closes;
//! otherwise the `B = 1` copy is the unique ground state.

use serde::Serialize;

use super::Verdict;
use crate::operators::matrices::{kron, pattern_projector, projector};
use crate::operators::{Hamiltonian, LocalTerm, Register};
use crate::queryham::{
    build_query_hamiltonian_with, unary_pattern, validate_and_replace, BitString, DiagonalizingOracle, GapOracle,
    QueryHamiltonian, QueryMachine, QueryOptions, ValidationEntry, ZeroBranch,
};
use crate::spectra::{gap_from_values, sector_spectrum, spectral_gap, SolverConfig};
use crate::{Error, Result};

pub const TAG_REJECT: &str = "H_reject";

/// Degeneracy tolerance used for gaps of assembled instances.
pub const GAP_DEGENERACY_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct SpectralGapInstance {
    pub hamiltonian: Hamiltonian,
    pub alpha: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub m: usize,
    /// Machine after query validation.
    pub machine: QueryMachine,
    pub validation: Vec<ValidationEntry>,
    /// `H` on `X, Y` before the `B` qubit is added.
    pub query: QueryHamiltonian,
    pub b_site: usize,
    pub x_sites: Vec<usize>,
}

impl SpectralGapInstance {
    /// Gap of `H_final` from its `(B, X)` blocks, each diagonalised alone.
    pub fn block_gap(&self) -> Result<f64> {
        let mut sites = vec![self.b_site];
        sites.extend(&self.x_sites);
        let values = sector_spectrum(&self.hamiltonian, &sites)?;
        Ok(gap_from_values(&values, GAP_DEGENERACY_TOL))
    }
}

pub fn build_spectral_gap_instance(machine: &QueryMachine, eps: f64, delta: f64) -> Result<SpectralGapInstance> {
    build_spectral_gap_instance_with(machine, eps, delta, Some(&DiagonalizingOracle::new()))
}

/// As [`build_spectral_gap_instance`]; `None` skips query validation.
pub fn build_spectral_gap_instance_with(
    machine: &QueryMachine,
    eps: f64,
    delta: f64,
    oracle: Option<&dyn GapOracle>,
) -> Result<SpectralGapInstance> {
    if !(0.0 < delta && delta < eps) {
        return Err(Error::Input(format!("need 0 < δ < ε (δ={delta}, ε={eps})")));
    }
    let (validated, log) = match oracle {
        Some(o) => validate_and_replace(machine, eps, delta, o)?,
        None => (machine.clone(), Vec::new()),
    };
    let opts = QueryOptions { zero_branch: ZeroBranch::Gadget, pad_unused: true, ..QueryOptions::unary() };
    let qh = build_query_hamiltonian_with(&validated, eps, &opts)?;
    let m = validated.m();

    let layout = qh.hamiltonian.layout().with_leading_register(Register::qubits("B", 1))?;
    let map: Vec<usize> = (1..layout.num_sites()).collect();
    let mut h = qh.hamiltonian.remapped(&layout, &map)?;
    let x_sites: Vec<usize> = qh.x_sites.iter().map(|&s| s + 1).collect();
    let mut sites = vec![0];
    sites.extend(&x_sites);
    let dims = vec![2; x_sites.len()];
    for y in BitString::all(m).filter(|y| !validated.output(y)) {
        let block = kron(&projector(2, 0), &pattern_projector(&unary_pattern(&y), &dims));
        h.push(LocalTerm::new(sites.clone(), block, 4.0 * eps)?.with_tag(TAG_REJECT))?;
    }

    Ok(SpectralGapInstance {
        hamiltonian: h,
        alpha: (eps - delta) / (2.0 * 4f64.powi(m as i32)),
        epsilon: eps,
        delta,
        m,
        machine: validated,
        validation: log,
        query: qh,
        b_site: 0,
        x_sites,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralGapDecision {
    pub verdict: Verdict,
    pub gap: f64,
    pub alpha: f64,
}

/// YES when `gap ≤ α`, NO when `gap ≥ 2α`.
pub fn decide_gap_value(gap: f64, alpha: f64) -> SpectralGapDecision {
    let verdict = if gap <= alpha {
        Verdict::Yes
    } else if gap >= 2.0 * alpha {
        Verdict::No
    } else {
        Verdict::PromiseViolated
    };
    SpectralGapDecision { verdict, gap, alpha }
}

pub fn decide_spectral_gap(h: &Hamiltonian, alpha: f64, config: &SolverConfig) -> Result<SpectralGapDecision> {
    Ok(decide_gap_value(spectral_gap(h, GAP_DEGENERACY_TOL, config)?, alpha))
}
