//! Instance files written by the `build-*` commands and read by `decide`.

use serde::{Deserialize, Serialize};

use super::io::RunManifest;
use crate::kitaev::CircuitJson;
use crate::operators::json::HamiltonianJson;
use crate::queryham::ValidationEntry;
use crate::reductions::{no_bound, yes_bound, Apx2CorrInstance, ApxSimInstance, ReductionParams, SpectralGapInstance};
use crate::{Error, Result};

/// Where an instance came from.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub machine_sha256: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ApxSimFile {
    pub hamiltonian: HamiltonianJson,
    pub observable: HamiltonianJson,
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ReductionParams>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Apx2CorrFile {
    pub hamiltonian: HamiltonianJson,
    pub observable_a: HamiltonianJson,
    pub observable_b: HamiltonianJson,
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub original_steps: usize,
    pub params: ReductionParams,
    /// The gadgeted circuit on the full layout.
    pub circuit: CircuitJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectralGapFile {
    pub hamiltonian: HamiltonianJson,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub validation: Vec<ValidationEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InstanceBody {
    ApxSim(ApxSimFile),
    #[serde(rename = "apx-2corr")]
    Apx2Corr(Apx2CorrFile),
    SpectralGap(SpectralGapFile),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(flatten)]
    pub body: InstanceBody,
    #[serde(default)]
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<RunManifest>,
}

impl ApxSimFile {
    pub fn from_instance(inst: &ApxSimInstance) -> Self {
        ApxSimFile {
            hamiltonian: HamiltonianJson::from_hamiltonian(&inst.hamiltonian),
            observable: HamiltonianJson::from_hamiltonian(&inst.observable),
            a: inst.a,
            b: inst.b,
            delta: inst.delta,
            params: inst.params.clone(),
        }
    }

    pub fn to_instance(&self) -> Result<ApxSimInstance> {
        let hamiltonian = self.hamiltonian.to_hamiltonian()?;
        let observable = self.observable.to_hamiltonian()?;
        if observable.layout() != hamiltonian.layout() {
            return Err(Error::LayoutMismatch("observable and Hamiltonian layouts differ".into()));
        }
        check_thresholds(self.a, self.b, self.delta)?;
        Ok(ApxSimInstance {
            hamiltonian,
            observable,
            a: self.a,
            b: self.b,
            delta: self.delta,
            params: self.params.clone(),
        })
    }
}

fn check_thresholds(a: f64, b: f64, delta: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && delta > 0.0 && delta.is_finite()) {
        return Err(Error::Input(format!("need finite thresholds and δ > 0 (a={a}, b={b}, δ={delta})")));
    }
    Ok(())
}

impl Apx2CorrFile {
    pub fn from_instance(inst: &Apx2CorrInstance) -> Self {
        Apx2CorrFile {
            hamiltonian: HamiltonianJson::from_hamiltonian(&inst.hamiltonian),
            observable_a: HamiltonianJson::from_hamiltonian(&inst.observable_a),
            observable_b: HamiltonianJson::from_hamiltonian(&inst.observable_b),
            a: inst.a,
            b: inst.b,
            delta: inst.delta,
            original_steps: inst.original_steps,
            params: inst.params.clone(),
            circuit: CircuitJson::from_circuit(&inst.circuit),
        }
    }

    /// Rebuilds the instance; the stored Hamiltonian and thresholds are
    /// authoritative, the circuit is kept for history-state diagnostics.
    pub fn to_instance(&self) -> Result<Apx2CorrInstance> {
        let hamiltonian = self.hamiltonian.to_hamiltonian()?;
        let observable_a = self.observable_a.to_hamiltonian()?;
        let observable_b = self.observable_b.to_hamiltonian()?;
        if observable_a.layout() != hamiltonian.layout() || observable_b.layout() != hamiltonian.layout() {
            return Err(Error::LayoutMismatch("observable and Hamiltonian layouts differ".into()));
        }
        check_thresholds(self.a, self.b, self.delta)?;
        let circuit = self.circuit.to_circuit()?;
        let l = self.original_steps;
        Ok(Apx2CorrInstance {
            hamiltonian,
            observable_a,
            observable_b,
            a: self.a,
            b: self.b,
            delta: self.delta,
            original_steps: l,
            params: self.params.clone(),
            circuit,
            yes_bound: yes_bound(l),
            no_bound: no_bound(l),
            yes_bound_reaches_a: yes_bound(l) >= self.a,
        })
    }
}

impl SpectralGapFile {
    pub fn from_instance(inst: &SpectralGapInstance) -> Self {
        SpectralGapFile {
            hamiltonian: HamiltonianJson::from_hamiltonian(&inst.hamiltonian),
            alpha: inst.alpha,
            epsilon: Some(inst.epsilon),
            delta: Some(inst.delta),
            validation: inst.validation.clone(),
        }
    }
}
