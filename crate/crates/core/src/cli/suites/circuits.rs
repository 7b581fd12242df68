//! Clock-construction suites: null space and gap bound.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use super::{one, Assertion, SuiteContext};
use crate::kitaev::random::random_circuit;
use crate::kitaev::{compile, gap_report, verify_nullspace_with, CircuitJson, ClockEncoding, QuantumCircuit};
use crate::operators::matrices::{identity, kron};
use crate::{Result, C64};

const ANCHOR_NULLSPACE: &str = "history-state-nullspace";
const ANCHOR_GAP: &str = "clock-gap-lower-bound";
/// Slack on the gap bound.
const GAP_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomCircuits {
    pub count: usize,
    pub min_qubits: usize,
    pub max_qubits: usize,
    pub min_gates: usize,
    pub max_gates: usize,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
pub struct CircuitSet {
    #[serde(default)]
    pub circuits: Vec<CircuitJson>,
    #[serde(default)]
    pub random: Option<RandomCircuits>,
}

impl CircuitSet {
    fn build(&self, ctx: &SuiteContext) -> Result<Vec<QuantumCircuit>> {
        let mut out = self.circuits.iter().map(CircuitJson::to_circuit).collect::<Result<Vec<_>>>()?;
        if let Some(r) = &self.random {
            if r.min_qubits < 2 || r.min_qubits > r.max_qubits || r.min_gates < 1 || r.min_gates > r.max_gates {
                return Err(crate::Error::Input(
                    "random circuits need 2 ≤ min_qubits ≤ max_qubits, 1 ≤ min_gates ≤ max_gates".into(),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(r.seed.unwrap_or(ctx.seed));
            for _ in 0..r.count {
                let n = rng.random_range(r.min_qubits..=r.max_qubits);
                let l = rng.random_range(r.min_gates..=r.max_gates);
                out.push(random_circuit(n, l, &mut rng)?);
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct GapBoundConfig {
    #[serde(flatten)]
    pub set: CircuitSet,
    pub encodings: Vec<ClockEncoding>,
    pub deltas: Vec<f64>,
    /// The Hamiltonian is compiled at `Δ·compile_delta_scale` and checked
    /// against the bound for `Δ`.
    #[serde(default = "one")]
    pub compile_delta_scale: f64,
}

pub fn gap_bound(cfg: &GapBoundConfig, ctx: &SuiteContext) -> Result<Vec<Assertion>> {
    let circuits = cfg.set.build(ctx)?;
    let mut cases = Vec::new();
    for (i, c) in circuits.iter().enumerate() {
        for &enc in &cfg.encodings {
            for &d in &cfg.deltas {
                cases.push((i, c, enc, d));
            }
        }
    }
    cases
        .par_iter()
        .map(|&(i, c, enc, d)| {
            let comp = compile(c, enc, d * cfg.compile_delta_scale, false)?;
            let r = gap_report(&comp, d)?;
            let detail = format!(
                "L={} qubits={} smallest nonzero eigenvalue {:.6e}{}",
                r.steps,
                c.layout().num_sites(),
                r.smallest_nonzero,
                if r.flagged { " (within 1e-9 of the bound)" } else { "" }
            );
            Ok(Assertion::at_least(
                format!("lemma1/circuit{i}/{enc:?}/delta={d}").to_lowercase(),
                ANCHOR_GAP,
                r.smallest_nonzero,
                r.bound,
                GAP_SLACK,
                detail,
            ))
        })
        .collect()
}

/// Replaces gate `gate` of circuit `circuit` in `H_prop` by `U·(R_x(angle) ⊗ I)`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateFault {
    pub circuit: usize,
    pub gate: usize,
    pub angle: f64,
}

#[derive(Clone, Debug, Deserialize)]
pub struct NullspaceConfig {
    #[serde(flatten)]
    pub set: CircuitSet,
    pub encodings: Vec<ClockEncoding>,
    pub angle_tol: f64,
    #[serde(default)]
    pub fault: Option<GateFault>,
}

fn rx(angle: f64) -> DMatrix<C64> {
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    DMatrix::from_row_slice(2, 2, &[C64::new(c, 0.0), C64::new(0.0, -s), C64::new(0.0, -s), C64::new(c, 0.0)])
}

pub fn nullspace(cfg: &NullspaceConfig, ctx: &SuiteContext) -> Result<Vec<Assertion>> {
    let circuits = cfg.set.build(ctx)?;
    if let Some(f) = &cfg.fault {
        if f.circuit >= circuits.len() || f.gate >= circuits[f.circuit].len() {
            return Err(crate::Error::Input(format!("fault position {}:{} is out of range", f.circuit, f.gate)));
        }
    }
    let mut cases = Vec::new();
    for (i, c) in circuits.iter().enumerate() {
        for &enc in &cfg.encodings {
            cases.push((i, c, enc));
        }
    }
    cases
        .par_iter()
        .map(|&(i, c, enc)| {
            let mut us: Vec<DMatrix<C64>> = c.gates().iter().map(|g| g.unitary.clone()).collect();
            let mut note = String::new();
            if let Some(f) = cfg.fault.as_ref().filter(|f| f.circuit == i) {
                let u = &us[f.gate];
                let rest = identity(u.nrows() / 2);
                us[f.gate] = u * kron(&rx(f.angle), &rest);
                note = format!(", gate {} perturbed by R_x({})", f.gate, f.angle);
            }
            let r = verify_nullspace_with(c, enc, cfg.angle_tol, &us)?;
            let detail = format!(
                "L={} qubits={} kernel dim {} vs history dim {}{note}",
                r.steps, r.qubits, r.kernel_dim, r.history_dim
            );
            let mut a = Assertion::at_most(
                format!("nullspace/circuit{i}/{enc:?}").to_lowercase(),
                ANCHOR_NULLSPACE,
                r.max_principal_angle,
                cfg.angle_tol,
                0.0,
                detail,
            );
            a.passed = r.passed;
            Ok(a)
        })
        .collect()
}
