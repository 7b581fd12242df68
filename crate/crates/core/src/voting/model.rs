//! Per-query acceptance probabilities of a verifier run on the maximally
//! mixed proof.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::kitaev::QuantumCircuit;
use crate::operators::StateVector;
use crate::queryham::{BitString, QueryMachine, Validity};
use crate::{Error, Result, C64};

/// `2^{-k}` as an exact rational.
pub fn pow2_inv(k: u64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << k)
}

/// Exact value of a finite `f64`.
pub fn rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Input(format!("{x} is not a finite number")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifierMode {
    /// Probabilities supplied directly.
    Abstract,
    /// `c/2^M` on valid YES queries, `s` on valid NO queries, explicit
    /// values on invalid ones.
    Canonical,
    /// Computed from verifier circuits.
    Circuit,
}

/// Acceptance probability `p` for every node of the query tree.
#[derive(Clone, Debug)]
pub struct VerifierModel {
    mode: VerifierMode,
    probs: BTreeMap<BitString, BigRational>,
    /// Amplification exponent `p` with `c = 1 − 2^{-p}`, `s = 2^{-p}`.
    p_amp: Option<u32>,
}

fn check_unit(p: &BigRational, prefix: &BitString) -> Result<()> {
    if *p < BigRational::zero() || *p > BigRational::one() {
        return Err(Error::Verifier(format!("probability at prefix '{prefix}' lies outside [0, 1]")));
    }
    Ok(())
}

impl VerifierModel {
    /// Every node of `machine` must have an entry.
    pub fn from_probabilities(machine: &QueryMachine, probs: &BTreeMap<BitString, f64>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (prefix, _) in machine.nodes() {
            let p = probs
                .get(prefix)
                .ok_or_else(|| Error::Verifier(format!("no acceptance probability for prefix '{prefix}'")))?;
            let r = rational(*p)?;
            check_unit(&r, prefix)?;
            out.insert(prefix.clone(), r);
        }
        Ok(VerifierModel { mode: VerifierMode::Abstract, probs: out, p_amp: None })
    }

    /// Canonical `(c, s)` verifier. Invalid queries take their value from
    /// `invalid`; a missing entry is an error.
    pub fn canonical(machine: &QueryMachine, p_amp: u32, invalid: &BTreeMap<BitString, f64>) -> Result<Self> {
        let m_proof = machine.proof_qubits() as u64;
        let s = pow2_inv(p_amp as u64);
        let c = BigRational::one() - &s;
        let yes = &c * pow2_inv(m_proof);
        let mut out = BTreeMap::new();
        for (prefix, _) in machine.nodes() {
            let p = match machine.validity(prefix) {
                Validity::ValidYes => yes.clone(),
                Validity::ValidNo => s.clone(),
                Validity::Invalid => {
                    let v = invalid.get(prefix).ok_or_else(|| {
                        Error::Verifier(format!("invalid query at prefix '{prefix}' needs an explicit probability"))
                    })?;
                    let r = rational(*v)?;
                    check_unit(&r, prefix)?;
                    r
                }
            };
            out.insert(prefix.clone(), p);
        }
        Ok(VerifierModel { mode: VerifierMode::Canonical, probs: out, p_amp: Some(p_amp) })
    }

    /// Probabilities from one verifier circuit per node, each averaged over
    /// all computational-basis proofs.
    pub fn from_circuits(machine: &QueryMachine, circuits: &BTreeMap<BitString, QuantumCircuit>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (prefix, _) in machine.nodes() {
            let c = circuits
                .get(prefix)
                .ok_or_else(|| Error::Verifier(format!("no verifier circuit for prefix '{prefix}'")))?;
            let r = rational(mixed_proof_acceptance(c)?)?;
            check_unit(&r, prefix)?;
            out.insert(prefix.clone(), r);
        }
        Ok(VerifierModel { mode: VerifierMode::Circuit, probs: out, p_amp: None })
    }

    /// Attaches an amplification exponent used by the bound checks.
    pub fn with_amplification(mut self, p_amp: u32) -> Self {
        self.p_amp = Some(p_amp);
        self
    }

    pub fn mode(&self) -> VerifierMode {
        self.mode
    }

    pub fn p_amp(&self) -> Option<u32> {
        self.p_amp
    }

    pub fn probability(&self, prefix: &BitString) -> &BigRational {
        &self.probs[prefix]
    }

    pub fn probabilities(&self) -> &BTreeMap<BitString, BigRational> {
        &self.probs
    }

    /// Largest `p` over valid NO queries: the soundness actually exhibited.
    pub fn effective_soundness(&self, machine: &QueryMachine) -> BigRational {
        self.probs
            .iter()
            .filter(|(p, _)| machine.validity(p) == Validity::ValidNo)
            .map(|(_, v)| v.clone())
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    /// Whether valid YES queries accept with at least `c/2^M` and valid NO
    /// queries with at most `s` for the attached `p_amp`.
    pub fn honors_completeness_soundness(&self, machine: &QueryMachine) -> bool {
        let Some(p) = self.p_amp else { return false };
        let s = pow2_inv(p as u64);
        let yes = (BigRational::one() - &s) * pow2_inv(machine.proof_qubits() as u64);
        self.probs.iter().all(|(prefix, v)| match machine.validity(prefix) {
            Validity::ValidYes => *v >= yes,
            Validity::ValidNo => *v <= s,
            Validity::Invalid => true,
        })
    }
}

/// Probability that `circuit` outputs 1 on the maximally mixed proof, by
/// averaging over computational-basis proofs.
pub fn mixed_proof_acceptance(circuit: &QuantumCircuit) -> Result<f64> {
    let pl = circuit.proof_layout()?;
    let mut total = 0.0;
    for k in 0..pl.dim() {
        total += circuit.acceptance_probability(&StateVector::basis(pl.clone(), k)?)?;
    }
    Ok(total / pl.dim() as f64)
}

/// Same probability from the evolved density matrix `U(I/2^M ⊗ |0⟩⟨0|)U†`.
pub fn mixed_proof_acceptance_density(circuit: &QuantumCircuit) -> Result<f64> {
    let layout = circuit.layout();
    let d = layout.dim();
    let out = circuit.output.ok_or_else(|| Error::Circuit("verifier has no output qubit".into()))?;
    let anc = circuit.ancilla_sites()?;
    let strides = layout.strides();
    let proof_dim = circuit.proof_layout()?.dim() as f64;
    let mut rho = DMatrix::<C64>::zeros(d, d);
    for x in 0..d {
        if anc.iter().all(|&s| (x / strides[s]).is_multiple_of(2)) {
            rho[(x, x)] = C64::new(1.0 / proof_dim, 0.0);
        }
    }
    for g in circuit.gates() {
        // ρ ← UρU†: apply U to the columns of ρ, then to the columns of (Uρ)†.
        for mut col in rho.column_iter_mut() {
            let mut v = col.clone_owned();
            circuit.apply_gate(g, &mut v);
            col.copy_from(&v);
        }
        rho = rho.adjoint();
        for mut col in rho.column_iter_mut() {
            let mut v = col.clone_owned();
            circuit.apply_gate(g, &mut v);
            col.copy_from(&v);
        }
        rho = rho.adjoint();
    }
    Ok((0..d).filter(|x| (x / strides[out]) % 2 == 1).map(|x| rho[(x, x)].re).sum())
}
