//! Observable-threshold instances `H = Δ·H_clock + H_query`.
//!
//! The simulator circuit reads the unary query string in `Q` and writes the
//! machine's output to `W₁` at its last step. `H_query` acts on `Q` and the
//! answer registers `Y1 … Ym`; because `Q` is read-only both parts commute
//! and `λ(H) = λ(H_query)`.

use serde::{Deserialize, Serialize};

use super::Verdict;
use crate::kitaev::{compile, ClockEncoding, QuantumCircuit};
use crate::operators::matrices::projector;
use crate::operators::{Hamiltonian, LocalTerm, Observable, Register};
use crate::queryham::{build_unary_query_hamiltonian, QueryMachine};
use crate::spectra::{min_observable_over_low_energy, SolverConfig};
use crate::{Error, Result};

/// Slack applied to both threshold comparisons.
pub const DECISION_SLACK: f64 = 1e-10;

/// Largest locality allowed for the assembled Hamiltonian.
pub const MAX_LOCALITY: usize = 5;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReductionParams {
    /// Gate count of the compiled circuit.
    pub steps: usize,
    pub m: usize,
    pub epsilon: f64,
    /// Term-wise norm bound of the query Hamiltonian.
    pub eta: f64,
    pub gamma: f64,
    /// Clock weight `Δ = L³ηγ`.
    pub clock_weight: f64,
    pub encoding: ClockEncoding,
}

/// Clock and query Hamiltonians on one layout, before thresholds are set.
#[derive(Clone, Debug)]
pub(crate) struct Assembled {
    pub hamiltonian: Hamiltonian,
    pub circuit: QuantumCircuit,
    pub params: ReductionParams,
}

/// Extends `circuit` with the answer registers, compiles it with weight
/// `L³ηγ` and adds the unary query Hamiltonian.
pub(crate) fn assemble(
    machine: &QueryMachine,
    circuit: &QuantumCircuit,
    gamma: f64,
    encoding: ClockEncoding,
) -> Result<Assembled> {
    if !(gamma > 0.0) {
        return Err(Error::Input("γ must be positive".into()));
    }
    let m = machine.m();
    let q = circuit.layout().register("Q").ok_or_else(|| Error::Circuit("simulator has no Q register".into()))?;
    if q.sites != (1 << m) - 1 || q.levels != 2 {
        return Err(Error::Circuit(format!("Q must hold {} qubits for m = {m}", (1 << m) - 1)));
    }
    if circuit.output.is_none() {
        return Err(Error::Circuit("simulator has no output qubit".into()));
    }
    let mut circ = circuit.clone();
    circ.readonly = Some("Q".into());
    circ.check_readonly()?;

    let qh = build_unary_query_hamiltonian(machine, machine.epsilon())?;
    let mut layout = circ.layout().clone();
    for (i, n) in machine.register_sizes().into_iter().enumerate() {
        layout = layout.with_register(Register::qubits(&format!("Y{}", i + 1), n))?;
    }
    let circ = circ.with_layout(layout)?;

    let eta = qh.hamiltonian.norm_bound();
    if !(eta > 0.0) {
        return Err(Error::Machine("query Hamiltonian is zero".into()));
    }
    let steps = circ.len();
    let clock_weight = (steps as f64).powi(3) * eta * gamma;
    let mut h = compile(&circ, encoding, clock_weight, false)?.hamiltonian;

    let full = h.layout().clone();
    let qlayout = qh.hamiltonian.layout();
    let mut map = Vec::with_capacity(qlayout.num_sites());
    map.extend(full.range("Q")?);
    for i in 1..=m {
        map.extend(full.range(&format!("Y{i}"))?);
    }
    h.extend(&qh.hamiltonian.remapped(&full, &map)?)?;
    if h.locality() > MAX_LOCALITY {
        return Err(Error::Circuit(format!("assembled Hamiltonian is {}-local", h.locality())));
    }
    let params = ReductionParams { steps, m, epsilon: machine.epsilon(), eta, gamma, clock_weight, encoding };
    Ok(Assembled { hamiltonian: h, circuit: circ, params })
}

#[derive(Clone, Debug)]
pub struct ApxSimInstance {
    pub hamiltonian: Hamiltonian,
    /// `(I + Z)/2` on `W₁`.
    pub observable: Observable,
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub params: Option<ReductionParams>,
}

/// Builds the instance with a unary clock.
pub fn build_apx_sim(machine: &QueryMachine, simulator: &QuantumCircuit, gamma: f64) -> Result<ApxSimInstance> {
    build_apx_sim_with(machine, simulator, gamma, ClockEncoding::Unary)
}

pub fn build_apx_sim_with(
    machine: &QueryMachine,
    simulator: &QuantumCircuit,
    gamma: f64,
    encoding: ClockEncoding,
) -> Result<ApxSimInstance> {
    let asm = assemble(machine, simulator, gamma, encoding)?;
    let w1 = asm.circuit.output.unwrap();
    let layout = asm.hamiltonian.layout().clone();
    let observable = Hamiltonian::with_terms(layout, vec![LocalTerm::new(vec![w1], projector(2, 0), 1.0)?])?;
    let l = asm.params.steps as f64;
    Ok(ApxSimInstance {
        hamiltonian: asm.hamiltonian,
        observable,
        a: 1.0 - 1.0 / (l + 1.0),
        b: 1.0 - 1.0 / (2.0 * l),
        delta: 1.0 / asm.params.clock_weight,
        params: Some(asm.params),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ApxSimDecision {
    pub verdict: Verdict,
    pub ground_energy: f64,
    /// Minimum of the observable over the ground space.
    pub ground_min: f64,
    /// Certified lower bound on the observable over states within `δ` of λ.
    pub low_energy_min: f64,
    /// Best feasible value found in that search.
    pub low_energy_primal: f64,
    pub a: f64,
    pub b: f64,
    pub delta: f64,
}

/// YES when some ground state has `⟨A⟩ ≤ a`, NO when every state within
/// `δ` of the ground energy has `⟨A⟩ ≥ b`.
pub fn decide_apx_sim(inst: &ApxSimInstance, config: &SolverConfig) -> Result<ApxSimDecision> {
    decide_observable_thresholds(&inst.hamiltonian, &inst.observable, inst.a, inst.b, inst.delta, config)
}

pub fn decide_observable_thresholds(
    h: &Hamiltonian,
    obs: &Observable,
    a: f64,
    b: f64,
    delta: f64,
    config: &SolverConfig,
) -> Result<ApxSimDecision> {
    let lambda = crate::spectra::dense::min_eigenvalue(&h.realize_dense()?);
    let ground = min_observable_over_low_energy(h, obs, lambda, config)?;
    let low = min_observable_over_low_energy(h, obs, ground.ground_energy + delta, config)?;
    let verdict = if ground.value <= a + DECISION_SLACK {
        Verdict::Yes
    } else if low.value >= b - DECISION_SLACK {
        Verdict::No
    } else {
        Verdict::PromiseViolated
    };
    Ok(ApxSimDecision {
        verdict,
        ground_energy: ground.ground_energy,
        ground_min: ground.value,
        low_energy_min: low.value,
        low_energy_primal: low.primal,
        a,
        b,
        delta,
    })
}
