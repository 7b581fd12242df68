//! Circuit-to-Hamiltonian compilation.
//!
//! The clock register `C` is appended after the circuit registers. With
//! the abstract encoding it is a single `(L+1)`-level site holding `t`;
//! with the unary encoding it is `L` qubits holding `1^t 0^(L−t)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::QuantumCircuit;
use crate::operators::matrices::{c, identity, ket_bra, kron, pattern_projector, projector};
use crate::operators::{Hamiltonian, LocalTerm, Register, RegisterLayout};
use crate::{Error, Result, C64};

pub const CLOCK_REGISTER: &str = "C";
pub const TAG_IN: &str = "H_in";
pub const TAG_PROP: &str = "H_prop";
pub const TAG_STAB: &str = "H_stab";
pub const TAG_OUT: &str = "H_out";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClockEncoding {
    Abstract,
    Unary,
}

impl std::str::FromStr for ClockEncoding {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "abstract" => Ok(ClockEncoding::Abstract),
            "unary" => Ok(ClockEncoding::Unary),
            _ => Err(Error::Input(format!("unknown clock encoding {s}"))),
        }
    }
}

/// Result of compiling a circuit; terms are tagged by component.
#[derive(Clone, Debug)]
pub struct CompiledCircuit {
    pub hamiltonian: Hamiltonian,
    pub encoding: ClockEncoding,
    pub delta: f64,
    pub steps: usize,
    pub clock_sites: Vec<usize>,
}

impl CompiledCircuit {
    pub fn component(&self, tag: &str) -> Hamiltonian {
        self.hamiltonian.tagged(tag)
    }
}

/// Layout of the compiled Hamiltonian: circuit registers followed by `C`.
pub fn clock_layout(circuit: &QuantumCircuit, encoding: ClockEncoding) -> Result<RegisterLayout> {
    let l = circuit.len();
    if circuit.layout().has_register(CLOCK_REGISTER) {
        return Err(Error::Circuit(format!("register name {CLOCK_REGISTER} is reserved for the clock")));
    }
    let reg = match encoding {
        ClockEncoding::Abstract => Register::qudits(CLOCK_REGISTER, 1, l + 1),
        ClockEncoding::Unary => Register::qubits(CLOCK_REGISTER, l),
    };
    circuit.layout().with_register(reg)
}

/// Index of clock value `t` inside the clock register.
pub fn clock_index(encoding: ClockEncoding, steps: usize, t: usize) -> usize {
    match encoding {
        ClockEncoding::Abstract => t,
        ClockEncoding::Unary => (0..t).map(|j| 1usize << (steps - 1 - j)).sum(),
    }
}

/// Clock sites and patterns `(sites, before, after)` for step `t ∈ 1..=L`.
fn step_pattern(
    encoding: ClockEncoding,
    clock: &[usize],
    steps: usize,
    t: usize,
) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    match encoding {
        ClockEncoding::Abstract => (vec![clock[0]], vec![t - 1], vec![t]),
        ClockEncoding::Unary => {
            let cs = |j: usize| clock[j - 1];
            if steps == 1 {
                (vec![cs(1)], vec![0], vec![1])
            } else if t == 1 {
                (vec![cs(1), cs(2)], vec![0, 0], vec![1, 0])
            } else if t == steps {
                (vec![cs(steps - 1), cs(steps)], vec![1, 0], vec![1, 1])
            } else {
                (vec![cs(t - 1), cs(t), cs(t + 1)], vec![1, 0, 0], vec![1, 1, 0])
            }
        }
    }
}

/// Clock projector onto `t = 0` (`first`) or `t = L`, as `(sites, block)`.
fn endpoint_projector(
    encoding: ClockEncoding,
    clock: &[usize],
    steps: usize,
    first: bool,
) -> (Vec<usize>, DMatrix<C64>) {
    match encoding {
        ClockEncoding::Abstract => (vec![clock[0]], projector(steps + 1, if first { 0 } else { steps })),
        ClockEncoding::Unary => {
            if first {
                (vec![clock[0]], projector(2, 0))
            } else {
                (vec![clock[steps - 1]], projector(2, 1))
            }
        }
    }
}

/// Builds `Δ·(H_in + H_prop + H_stab [+ H_out])`.
pub fn compile(
    circuit: &QuantumCircuit,
    encoding: ClockEncoding,
    delta: f64,
    include_output: bool,
) -> Result<CompiledCircuit> {
    compile_with(circuit, encoding, delta, include_output, None)
}

/// As [`compile`], but `H_prop` is built from `override_unitaries[t]` when given.
pub fn compile_with(
    circuit: &QuantumCircuit,
    encoding: ClockEncoding,
    delta: f64,
    include_output: bool,
    override_unitaries: Option<&[DMatrix<C64>]>,
) -> Result<CompiledCircuit> {
    let steps = circuit.len();
    if steps == 0 {
        return Err(Error::Circuit("circuit has no gates".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::Input("Δ must be positive".into()));
    }
    circuit.check_readonly()?;
    let layout = clock_layout(circuit, encoding)?;
    let clock: Vec<usize> = layout.range(CLOCK_REGISTER)?.collect();
    let mut h = Hamiltonian::new(layout.clone());

    let (p0_sites, p0) = endpoint_projector(encoding, &clock, steps, true);
    for w in circuit.ancilla_sites()? {
        let mut sites = vec![w];
        sites.extend(&p0_sites);
        h.push(LocalTerm::from_ordered(&sites, kron(&projector(2, 1), &p0), delta, &layout)?.with_tag(TAG_IN))?;
    }

    for (t, gate) in circuit.gates().iter().enumerate().map(|(i, g)| (i + 1, g)) {
        let u = match override_unitaries {
            Some(us) => us[t - 1].clone(),
            None => gate.unitary.clone(),
        };
        let (csites, before, after) = step_pattern(encoding, &clock, steps, t);
        let cdims: Vec<usize> = csites.iter().map(|&s| layout.site_dim(s)).collect();
        let p_before = pattern_projector(&before, &cdims);
        let p_after = pattern_projector(&after, &cdims);
        let cd: usize = cdims.iter().product();
        let forward = ket_bra(
            cd,
            crate::operators::matrices::pattern_index(&after, &cdims),
            crate::operators::matrices::pattern_index(&before, &cdims),
        );
        let gd = u.nrows();
        let block =
            (kron(&identity(gd), &(p_before + p_after)) - kron(&u, &forward) - kron(&u.adjoint(), &forward.adjoint()))
                * c(0.5);
        let mut sites = gate.targets.clone();
        sites.extend(&csites);
        h.push(LocalTerm::from_ordered(&sites, block, delta, &layout)?.with_tag(TAG_PROP))?;
    }

    if encoding == ClockEncoding::Unary {
        for j in 0..steps.saturating_sub(1) {
            let block = pattern_projector(&[0, 1], &[2, 2]);
            h.push(LocalTerm::new(vec![clock[j], clock[j + 1]], block, delta)?.with_tag(TAG_STAB))?;
        }
    }

    if include_output {
        let w1 = circuit
            .output
            .ok_or_else(|| Error::Circuit("output penalty requested but no output qubit is designated".into()))?;
        let (pl_sites, pl) = endpoint_projector(encoding, &clock, steps, false);
        let mut sites = vec![w1];
        sites.extend(&pl_sites);
        h.push(LocalTerm::from_ordered(&sites, kron(&projector(2, 0), &pl), delta, &layout)?.with_tag(TAG_OUT))?;
    }

    Ok(CompiledCircuit { hamiltonian: h, encoding, delta, steps, clock_sites: clock })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::full_spectrum;

    #[test]
    fn single_identity_gate_abstract_spectrum() {
        let l = RegisterLayout::qubits(&[("Q", 2)]).unwrap();
        let mut circ = QuantumCircuit::new(l);
        circ.push_named("ID", &[0]).unwrap();
        let comp = compile(&circ, ClockEncoding::Abstract, 1.0, false).unwrap();
        let spec = full_spectrum(&comp.hamiltonian).unwrap();
        assert_eq!(spec.len(), 8);
        for (k, v) in spec.iter().enumerate() {
            let expect = if k < 4 { 0.0 } else { 1.0 };
            assert!((v - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn unary_locality_is_five() {
        let l = RegisterLayout::qubits(&[("Q", 1), ("W", 1)]).unwrap();
        let mut circ = QuantumCircuit::new(l);
        for _ in 0..4 {
            circ.push_named("CNOT", &[0, 1]).unwrap();
        }
        let comp = compile(&circ, ClockEncoding::Unary, 1.0, true).unwrap();
        assert_eq!(comp.hamiltonian.locality(), 5);
        assert_eq!(comp.component(TAG_STAB).terms().len(), 3);
    }

    #[test]
    fn output_penalty_needs_output_qubit() {
        let l = RegisterLayout::qubits(&[("Q", 1)]).unwrap();
        let mut circ = QuantumCircuit::new(l);
        circ.push_named("X", &[0]).unwrap();
        assert!(compile(&circ, ClockEncoding::Unary, 1.0, true).is_err());
    }

    #[test]
    fn unary_clock_index() {
        assert_eq!(clock_index(ClockEncoding::Unary, 3, 0), 0b000);
        assert_eq!(clock_index(ClockEncoding::Unary, 3, 2), 0b110);
        assert_eq!(clock_index(ClockEncoding::Unary, 3, 3), 0b111);
    }
}
