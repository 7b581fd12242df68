//! Gate sequences over a qubit layout and their simulation.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::gates::{expand_named, standard_arity, Gate};
use crate::operators::json::{layout_from_json, layout_to_json, matrix_from_json, matrix_to_json, LayoutEntry};
use crate::operators::matrices::unitarity_defect;
use crate::operators::{RegisterLayout, StateVector};
use crate::{Error, Result, C64};

/// Unitarity tolerance for gate matrices.
pub const UNITARY_TOL: f64 = 1e-10;

/// Ordered one- and two-qubit gates over a qubit layout.
///
/// Registers listed in `ancillas` start in `|0…0⟩`; the remaining
/// registers carry the proof. The `readonly` register may only act as a
/// control. `output` is the site measured by the output penalty.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumCircuit {
    layout: RegisterLayout,
    gates: Vec<Gate>,
    pub ancillas: Vec<String>,
    pub readonly: Option<String>,
    pub output: Option<usize>,
}

impl QuantumCircuit {
    /// Empty circuit. A register named `W` is the default ancilla and its
    /// first site the default output.
    pub fn new(layout: RegisterLayout) -> Self {
        let has_w = layout.has_register("W");
        let output = if has_w { layout.site("W", 0).ok() } else { None };
        QuantumCircuit {
            ancillas: if has_w { vec!["W".into()] } else { vec![] },
            readonly: None,
            output,
            layout,
            gates: Vec::new(),
        }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Number of gates `L`.
    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let k = gate.targets.len();
        if k == 0 || k > 2 {
            return Err(Error::Circuit(format!("unsupported gate arity {k} for {}", gate.label)));
        }
        for (i, &t) in gate.targets.iter().enumerate() {
            if t >= self.layout.num_sites() {
                return Err(Error::Circuit(format!("target {t} of {} is out of range", gate.label)));
            }
            if self.layout.site_dim(t) != 2 {
                return Err(Error::Circuit(format!("target {t} of {} is not a qubit", gate.label)));
            }
            if gate.targets[..i].contains(&t) {
                return Err(Error::Circuit(format!("{} repeats target {t}", gate.label)));
            }
        }
        if gate.unitary.nrows() != 1 << k {
            return Err(Error::Circuit(format!("{} has a matrix of the wrong size", gate.label)));
        }
        let defect = unitarity_defect(&gate.unitary);
        if defect > UNITARY_TOL {
            return Err(Error::Circuit(format!("{} is not unitary (defect {defect:.3e})", gate.label)));
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Appends a built-in gate (multi-gate expansions included).
    pub fn push_named(&mut self, label: &str, targets: &[usize]) -> Result<()> {
        match standard_arity(label) {
            None => return Err(Error::Circuit(format!("unknown gate label {label}"))),
            Some(a) if a != targets.len() => {
                return Err(Error::Circuit(format!("{label} takes {a} targets, got {}", targets.len())))
            }
            _ => {}
        }
        for g in expand_named(label, targets).unwrap() {
            self.push(g)?;
        }
        Ok(())
    }

    pub fn push_unitary(&mut self, label: &str, targets: &[usize], unitary: DMatrix<C64>) -> Result<()> {
        self.push(Gate { label: label.to_string(), targets: targets.to_vec(), unitary })
    }

    /// Replaces gate `index` (used to plant faults).
    pub fn replace_gate(&mut self, index: usize, gate: Gate) -> Result<()> {
        let old = std::mem::replace(&mut self.gates[index], gate.clone());
        let mut probe = QuantumCircuit { gates: vec![], ..self.clone() };
        if let Err(e) = probe.push(gate) {
            self.gates[index] = old;
            return Err(e);
        }
        Ok(())
    }

    /// Copy of the circuit on a larger layout that extends this one.
    pub fn with_layout(&self, layout: RegisterLayout) -> Result<Self> {
        if layout.registers().len() < self.layout.registers().len()
            || layout.registers()[..self.layout.registers().len()] != *self.layout.registers()
        {
            return Err(Error::Circuit("new layout must extend the circuit layout".into()));
        }
        Ok(QuantumCircuit { layout, ..self.clone() })
    }

    /// Site indices of every ancilla register.
    pub fn ancilla_sites(&self) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for name in &self.ancillas {
            out.extend(self.layout.range(name)?);
        }
        Ok(out)
    }

    /// Layout of the proof registers (all non-ancilla registers, in order).
    pub fn proof_layout(&self) -> Result<RegisterLayout> {
        let regs: Vec<_> =
            self.layout.registers().iter().filter(|r| !self.ancillas.contains(&r.name)).cloned().collect();
        RegisterLayout::new(regs)
    }

    /// Full-layout vector with the proof on non-ancilla sites and `|0⟩` on ancillas.
    pub fn embed_proof(&self, proof: &StateVector) -> Result<DVector<C64>> {
        let pl = self.proof_layout()?;
        if proof.layout() != &pl {
            return Err(Error::LayoutMismatch("proof does not live on the proof registers".into()));
        }
        let anc = self.ancilla_sites()?;
        let proof_sites = self.layout.complement(&anc);
        let offsets = self.layout.local_offsets(&proof_sites);
        let mut v = DVector::zeros(self.layout.dim());
        for (k, &o) in offsets.iter().enumerate() {
            v[o] = proof.amplitudes()[k];
        }
        Ok(v)
    }

    /// Checks that no gate changes the computational basis of the read-only register.
    pub fn check_readonly(&self) -> Result<()> {
        let Some(name) = &self.readonly else { return Ok(()) };
        let ro: Vec<usize> = self.layout.range(name)?.collect();
        for (i, g) in self.gates.iter().enumerate() {
            let watched: Vec<usize> =
                g.targets.iter().enumerate().filter(|(_, t)| ro.contains(t)).map(|(k, _)| k).collect();
            if watched.is_empty() {
                continue;
            }
            let k = g.targets.len();
            for r in 0..(1 << k) {
                for c in 0..(1 << k) {
                    let differs = watched.iter().any(|&w| ((r >> (k - 1 - w)) & 1) != ((c >> (k - 1 - w)) & 1));
                    if differs && g.unitary[(r, c)].norm() > UNITARY_TOL {
                        return Err(Error::Circuit(format!(
                            "gate {i} ({}) writes to read-only register {name}",
                            g.label
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies gate `g` to `state` in place.
    pub fn apply_gate(&self, g: &Gate, state: &mut DVector<C64>) {
        let s_off = self.layout.local_offsets(&g.targets);
        let rest = self.layout.complement(&g.targets);
        let r_off = self.layout.local_offsets(&rest);
        let d = s_off.len();
        let mut local = DVector::zeros(d);
        for &r in &r_off {
            for (k, &o) in s_off.iter().enumerate() {
                local[k] = state[r + o];
            }
            let w = &g.unitary * &local;
            for (k, &o) in s_off.iter().enumerate() {
                state[r + o] = w[k];
            }
        }
    }

    /// States `U_t ⋯ U_1 |input⟩` for `t = 0..=L`.
    pub fn trajectory(&self, input: &DVector<C64>) -> Vec<DVector<C64>> {
        let mut out = Vec::with_capacity(self.gates.len() + 1);
        let mut s = input.clone();
        out.push(s.clone());
        for g in &self.gates {
            self.apply_gate(g, &mut s);
            out.push(s.clone());
        }
        out
    }

    /// Probability that the output qubit reads `|1⟩` after running on
    /// `proof ⊗ |0…0⟩`.
    pub fn acceptance_probability(&self, proof: &StateVector) -> Result<f64> {
        let out = self.output.ok_or_else(|| Error::Circuit("circuit has no output qubit".into()))?;
        let v = self.embed_proof(proof)?;
        let fin = self.trajectory(&v).pop().unwrap();
        let stride = self.layout.strides()[out];
        Ok((0..fin.len()).filter(|i| (i / stride) % 2 == 1).map(|i| fin[i].norm_sqr()).sum())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GateJson {
    pub label: String,
    pub targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary: Option<Vec<[f64; 2]>>,
}

/// Circuit file format. Gates with a built-in label may omit `unitary`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CircuitJson {
    pub layout: Vec<LayoutEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readonly: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ancillas: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<usize>,
    pub gates: Vec<GateJson>,
}

impl CircuitJson {
    pub fn from_circuit(c: &QuantumCircuit) -> Self {
        CircuitJson {
            layout: layout_to_json(c.layout()),
            readonly: c.readonly.clone(),
            ancillas: Some(c.ancillas.clone()),
            output: c.output,
            gates: c
                .gates()
                .iter()
                .map(|g| GateJson {
                    label: g.label.clone(),
                    targets: g.targets.clone(),
                    unitary: Some(matrix_to_json(&g.unitary)),
                })
                .collect(),
        }
    }

    pub fn to_circuit(&self) -> Result<QuantumCircuit> {
        let layout = layout_from_json(&self.layout)?;
        let mut c = QuantumCircuit::new(layout);
        if let Some(a) = &self.ancillas {
            c.ancillas = a.clone();
        }
        c.readonly = self.readonly.clone();
        if self.output.is_some() {
            c.output = self.output;
        }
        for g in &self.gates {
            match &g.unitary {
                Some(u) => c.push_unitary(&g.label, &g.targets, matrix_from_json(u)?)?,
                None => c.push_named(&g.label, &g.targets)?,
            }
        }
        c.ancilla_sites()?;
        c.check_readonly()?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::matrices::c;

    fn toffoli_oracle(bits: usize) -> usize {
        let (a, b, t) = ((bits >> 2) & 1, (bits >> 1) & 1, bits & 1);
        (a << 2) | (b << 1) | (t ^ (a & b))
    }

    #[test]
    fn decomposed_toffoli_matches_truth_table() {
        let l = RegisterLayout::qubits(&[("A", 3)]).unwrap();
        let mut circ = QuantumCircuit::new(l.clone());
        circ.push_named("TOFFOLI-decomposed", &[0, 1, 2]).unwrap();
        assert_eq!(circ.len(), 5);
        for x in 0..8 {
            let v = StateVector::basis(l.clone(), x).unwrap().into_amplitudes();
            let out = circ.trajectory(&v).pop().unwrap();
            assert!((out[toffoli_oracle(x)] - c(1.0)).norm() < 1e-14, "input {x}");
        }
    }

    #[test]
    fn rejects_three_qubit_unitary() {
        let l = RegisterLayout::qubits(&[("A", 3)]).unwrap();
        let mut circ = QuantumCircuit::new(l);
        assert!(circ.push_unitary("U", &[0, 1, 2], DMatrix::identity(8, 8)).is_err());
    }

    #[test]
    fn readonly_control_allowed_target_rejected() {
        let l = RegisterLayout::qubits(&[("Q", 1), ("W", 1)]).unwrap();
        let mut circ = QuantumCircuit::new(l);
        circ.readonly = Some("Q".into());
        circ.push_named("CNOT", &[0, 1]).unwrap();
        assert!(circ.check_readonly().is_ok());
        circ.push_named("CNOT", &[1, 0]).unwrap();
        assert!(circ.check_readonly().is_err());
    }

    #[test]
    fn acceptance_of_x_on_output() {
        let l = RegisterLayout::qubits(&[("Q", 1), ("W", 1)]).unwrap();
        let mut circ = QuantumCircuit::new(l);
        circ.push_named("CNOT", &[0, 1]).unwrap();
        let pl = circ.proof_layout().unwrap();
        assert_eq!(circ.acceptance_probability(&StateVector::basis(pl.clone(), 1).unwrap()).unwrap(), 1.0);
        assert_eq!(circ.acceptance_probability(&StateVector::basis(pl, 0).unwrap()).unwrap(), 0.0);
    }
}
