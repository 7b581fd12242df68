//! Two-point correlation instances.
//!
//! A Bell gadget controlled on `W₁` is appended to the simulator: when the
//! output qubit reads `1` it maps `W₂W₃` from `|00⟩` to `|φ⁺⟩`, then six
//! identity gates on `W₁` let the correlated state persist over several
//! clock steps. The observables are `Z` on `W₂` and on `W₃`, and the
//! correlation is `f = ⟨A⊗B⟩ − ⟨A⟩⟨B⟩`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::apxsim::{assemble, ReductionParams, DECISION_SLACK};
use super::Verdict;
use crate::kitaev::{history_state, ClockEncoding, QuantumCircuit};
use crate::operators::matrices::pauli_z;
use crate::operators::{expectation, Hamiltonian, LocalTerm, Observable, StateVector};
use crate::queryham::QueryMachine;
use crate::spectra::dense::eigh;
use crate::{Error, Result, C64};

/// Gates added by [`append_bell_gadget`].
pub const GADGET_GATES: usize = 12;

/// Appends controlled-Hadamard `(W₁, W₂)`, a five-gate Toffoli
/// `(W₁, W₂; W₃)` and six identities on `W₁`.
pub fn append_bell_gadget(circuit: &QuantumCircuit) -> Result<QuantumCircuit> {
    let layout = circuit.layout();
    let w = layout.register("W").ok_or_else(|| Error::Circuit("circuit has no W register".into()))?;
    if w.sites < 3 {
        return Err(Error::Circuit("the Bell gadget needs W to hold at least three qubits".into()));
    }
    let (w1, w2, w3) = (layout.site("W", 0)?, layout.site("W", 1)?, layout.site("W", 2)?);
    if circuit.output != Some(w1) {
        return Err(Error::Circuit("output qubit must be W1".into()));
    }
    if circuit.gates().iter().any(|g| g.targets.contains(&w2) || g.targets.contains(&w3)) {
        return Err(Error::Circuit("W2 and W3 must be untouched by the circuit".into()));
    }
    let mut v = circuit.clone();
    v.push_named("CH", &[w1, w2])?;
    v.push_named("TOFFOLI-decomposed", &[w1, w2, w3])?;
    for _ in 0..6 {
        v.push_named("ID", &[w1])?;
    }
    debug_assert_eq!(v.len(), circuit.len() + GADGET_GATES);
    Ok(v)
}

/// `⟨A⊗B⟩ − ⟨A⟩⟨B⟩` for observables on disjoint sites.
pub fn correlation_f(state: &StateVector, a: &Observable, b: &Observable) -> Result<f64> {
    if a.layout() != state.layout() || b.layout() != state.layout() {
        return Err(Error::LayoutMismatch("state and observables must share a layout".into()));
    }
    let support = |o: &Observable| -> Vec<usize> {
        let mut s: Vec<usize> = o.terms().iter().flat_map(|t| t.support().iter().copied()).collect();
        s.sort_unstable();
        s.dedup();
        s
    };
    let sb = support(b);
    if support(a).iter().any(|s| sb.contains(s)) {
        return Err(Error::Input("observables act on overlapping sites".into()));
    }
    let psi = state.amplitudes();
    let ab = a.apply(psi).dotc(&b.apply(psi)).re;
    Ok(ab - expectation(state, a)? * expectation(state, b)?)
}

/// `(1/(L+13))·(4 − 49/(L+13))`: guaranteed ground-state correlation.
pub fn yes_bound(original_steps: usize) -> f64 {
    let n = original_steps as f64 + 13.0;
    (4.0 - 49.0 / n) / n
}

/// `(1/(L+13))·(1 − 1/(4(L+13)))`: correlation ceiling on low-energy states.
pub fn no_bound(original_steps: usize) -> f64 {
    let n = original_steps as f64 + 13.0;
    (1.0 - 1.0 / (4.0 * n)) / n
}

#[derive(Clone, Debug)]
pub struct Apx2CorrInstance {
    pub hamiltonian: Hamiltonian,
    /// `Z` on `W₂`.
    pub observable_a: Observable,
    /// `Z` on `W₃`.
    pub observable_b: Observable,
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    /// Gate count `L` of the simulator before the gadget.
    pub original_steps: usize,
    pub params: ReductionParams,
    /// The gadgeted circuit on the full layout.
    pub circuit: QuantumCircuit,
    pub yes_bound: f64,
    pub no_bound: f64,
    /// Whether the guaranteed YES correlation reaches `a` at this `L`.
    pub yes_bound_reaches_a: bool,
}

/// Builds the instance with an abstract clock of `L + 13` levels.
pub fn build_apx_2corr(machine: &QueryMachine, simulator: &QuantumCircuit, gamma: f64) -> Result<Apx2CorrInstance> {
    build_apx_2corr_with(machine, simulator, gamma, ClockEncoding::Abstract)
}

pub fn build_apx_2corr_with(
    machine: &QueryMachine,
    simulator: &QuantumCircuit,
    gamma: f64,
    encoding: ClockEncoding,
) -> Result<Apx2CorrInstance> {
    let v = append_bell_gadget(simulator)?;
    build_apx_2corr_from_gadgeted(machine, &v, simulator.len(), gamma, encoding)
}

/// As [`build_apx_2corr_with`] for a circuit whose last [`GADGET_GATES`]
/// gates already form the gadget; `original_steps` is the length before it.
pub fn build_apx_2corr_from_gadgeted(
    machine: &QueryMachine,
    gadgeted: &QuantumCircuit,
    original_steps: usize,
    gamma: f64,
    encoding: ClockEncoding,
) -> Result<Apx2CorrInstance> {
    if gadgeted.len() != original_steps + GADGET_GATES {
        return Err(Error::Circuit(format!(
            "expected {} gates after the gadget, found {}",
            original_steps + GADGET_GATES,
            gadgeted.len()
        )));
    }
    let l = original_steps;
    let asm = assemble(machine, gadgeted, gamma, encoding)?;
    let layout = asm.hamiltonian.layout().clone();
    let z_on = |k: usize| -> Result<Observable> {
        let site = layout.site("W", k)?;
        Hamiltonian::with_terms(layout.clone(), vec![LocalTerm::new(vec![site], pauli_z(), 1.0)?])
    };
    let n = l as f64 + 13.0;
    let a = 3.0 / n;
    Ok(Apx2CorrInstance {
        observable_a: z_on(1)?,
        observable_b: z_on(2)?,
        a,
        b: 1.0 / n,
        delta: 1.0 / asm.params.clock_weight,
        original_steps: l,
        yes_bound: yes_bound(l),
        no_bound: no_bound(l),
        yes_bound_reaches_a: yes_bound(l) >= a,
        hamiltonian: asm.hamiltonian,
        params: asm.params,
        circuit: asm.circuit,
    })
}

/// Direct and time-resolved evaluations of `f` on a history state of the
/// gadgeted circuit. For `t ≤ L` the pair `W₂W₃` is `|00⟩`, contributing
/// `L + 1` to each `Z` sum; the remaining 12 steps are summed explicitly.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HistoryCorrelation {
    pub direct: f64,
    pub decomposed: f64,
}

pub fn history_correlation(inst: &Apx2CorrInstance, proof: &StateVector) -> Result<HistoryCorrelation> {
    let hist = history_state(&inst.circuit, proof, inst.params.encoding)?;
    let direct = correlation_f(&hist, &inst.observable_a, &inst.observable_b)?;

    let circ = &inst.circuit;
    let traj = circ.trajectory(&circ.embed_proof(proof)?);
    let cl = circ.layout();
    let (w2, w3) = (cl.site("W", 1)?, cl.site("W", 2)?);
    let strides = cl.strides();
    let sign = |x: usize, site: usize| if (x / strides[site]).is_multiple_of(2) { 1.0 } else { -1.0 };
    let l = inst.original_steps;
    let (mut s2, mut s3, mut s23) = (0.0, 0.0, 0.0);
    for phi in &traj[l + 1..] {
        for (x, amp) in phi.iter().enumerate() {
            let p = amp.norm_sqr();
            s2 += p * sign(x, w2);
            s3 += p * sign(x, w3);
            s23 += p * sign(x, w2) * sign(x, w3);
        }
    }
    let n = l as f64 + 13.0;
    let prefix = l as f64 + 1.0;
    let decomposed = (prefix + s23) / n - (prefix + s2) * (prefix + s3) / (n * n);
    Ok(HistoryCorrelation { direct, decomposed })
}

#[derive(Clone, Debug, Serialize)]
pub struct Apx2CorrDecision {
    pub verdict: Verdict,
    pub ground_energy: f64,
    pub ground_degeneracy: usize,
    /// Largest `f` found on the ground space.
    pub ground_max_f: f64,
    /// Eigenstates within `δ` of the ground energy.
    pub low_energy_states: usize,
    /// Largest `f` over those eigenstates.
    pub low_energy_max_f: f64,
    pub samples: usize,
    /// Largest `f` over sampled feasible superpositions.
    pub sampled_max_f: f64,
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub yes_bound: f64,
    pub no_bound: f64,
}

/// Eigenvectors kept for sampling low-energy superpositions.
const SAMPLE_SPAN: usize = 32;

/// YES when some ground state reaches `f ≥ a`; NO when every low-energy
/// eigenstate and every sampled state within `δ` stays at `f ≤ b`. The NO
/// side is evidence from sampling, not a certificate.
pub fn decide_apx_2corr(inst: &Apx2CorrInstance, samples: usize, seed: u64) -> Result<Apx2CorrDecision> {
    let h = inst.hamiltonian.realize_dense()?;
    let e = eigh(&h, true);
    let lambda = e.values[0];
    let scale = e.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-9 * scale;
    let span = SAMPLE_SPAN.min(e.values.len());
    let basis = e.vectors.as_ref().unwrap().columns(0, span).into_owned();

    // Observables compressed to the span of the lowest eigenvectors.
    let compress = |o: &Observable| -> Result<DMatrix<C64>> { Ok(basis.adjoint() * o.realize_dense()? * &basis) };
    let ma = compress(&inst.observable_a)?;
    let mb = compress(&inst.observable_b)?;
    let lay = inst.hamiltonian.layout();
    let (wa, wb) = (lay.site("W", 1)?, lay.site("W", 2)?);
    let joint = Hamiltonian::with_terms(
        lay.clone(),
        vec![LocalTerm::new(vec![wa, wb], pauli_z().kronecker(&pauli_z()), 1.0)?],
    )?;
    let mab = compress(&joint)?;
    let f = |c: &DVector<C64>| -> f64 {
        let n2 = c.norm_squared();
        let ev = |m: &DMatrix<C64>| c.dotc(&(m * c)).re / n2;
        ev(&mab) - ev(&ma) * ev(&mb)
    };

    let ground = e.values.iter().take_while(|&&v| v <= lambda + tol).count().min(span);
    let unit = |k: usize| DVector::from_fn(span, |i, _| if i == k { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    let mut ground_max = (0..ground).map(|k| f(&unit(k))).fold(f64::NEG_INFINITY, f64::max);
    for i in 0..ground {
        for j in i + 1..ground {
            for ti in 1..16 {
                let theta = std::f64::consts::FRAC_PI_2 * ti as f64 / 16.0;
                for pi in 0..8 {
                    let ph = C64::from_polar(theta.sin(), std::f64::consts::TAU * pi as f64 / 8.0);
                    let c = unit(i) * C64::new(theta.cos(), 0.0) + unit(j) * ph;
                    ground_max = ground_max.max(f(&c));
                }
            }
        }
    }

    let low = e.values.iter().take_while(|&&v| v <= lambda + inst.delta).count().min(span);
    let low_max = (0..low).map(|k| f(&unit(k))).fold(f64::NEG_INFINITY, f64::max);

    let excess: Vec<f64> = e.values[..span].iter().map(|v| v - lambda).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampled = f64::NEG_INFINITY;
    for _ in 0..samples {
        let mut c = DVector::from_fn(span, |_, _| {
            C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
        });
        // Scale the components outside the δ-window so that the energy
        // excess is a uniform fraction of δ.
        let target = inst.delta * rng.random::<f64>();
        let (mut inside, mut outside, mut cost) = (0.0, 0.0, 0.0);
        for k in 0..span {
            let w = c[k].norm_sqr();
            cost += w * excess[k];
            if k < low {
                inside += w;
            } else {
                outside += w;
            }
        }
        let total = inside + outside;
        if cost > target * total {
            let inner_cost: f64 = (0..low).map(|k| c[k].norm_sqr() * excess[k]).sum();
            let outer_cost = cost - inner_cost;
            // s² (outer_cost − target·outside) = target·inside − inner_cost
            let num = target * inside - inner_cost;
            let den = outer_cost - target * outside;
            let s2 = if den > 0.0 && num > 0.0 { num / den } else { 0.0 };
            for k in low..span {
                c[k] *= s2.sqrt();
            }
        }
        if c.norm_squared() > 0.0 {
            sampled = sampled.max(f(&c));
        }
    }

    let verdict = if ground_max >= inst.a - DECISION_SLACK {
        Verdict::Yes
    } else if low_max <= inst.b + DECISION_SLACK && (samples == 0 || sampled <= inst.b + DECISION_SLACK) {
        Verdict::No
    } else {
        Verdict::PromiseViolated
    };
    Ok(Apx2CorrDecision {
        verdict,
        ground_energy: lambda,
        ground_degeneracy: ground,
        ground_max_f: ground_max,
        low_energy_states: low,
        low_energy_max_f: low_max,
        samples,
        sampled_max_f: sampled,
        a: inst.a,
        b: inst.b,
        delta: inst.delta,
        yes_bound: inst.yes_bound,
        no_bound: inst.no_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::RegisterLayout;
    use crate::queryham::fixtures::machine_with;
    use crate::reductions::simulator_circuit;

    fn bell_pair_layout() -> (RegisterLayout, Observable, Observable) {
        let l = RegisterLayout::qubits(&[("A", 1), ("B", 1)]).unwrap();
        let z = |s| Hamiltonian::with_terms(l.clone(), vec![LocalTerm::new(vec![s], pauli_z(), 1.0).unwrap()]).unwrap();
        (l.clone(), z(0), z(1))
    }

    #[test]
    fn bell_state_and_product_state() {
        let (l, a, b) = bell_pair_layout();
        let r = 0.5f64.sqrt();
        let phi = StateVector::new(
            l.clone(),
            DVector::from_vec(vec![C64::new(r, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(r, 0.0)]),
        )
        .unwrap();
        assert!((correlation_f(&phi, &a, &b).unwrap() - 1.0).abs() < 1e-15);
        let zero = StateVector::basis(l, 0).unwrap();
        assert!(correlation_f(&zero, &a, &b).unwrap().abs() < 1e-15);
        assert!(correlation_f(&zero, &a, &a).is_err());
    }

    #[test]
    fn gadget_prepares_bell_pair_when_output_is_one() {
        let l = RegisterLayout::qubits(&[("W", 3)]).unwrap();
        let mut c = QuantumCircuit::new(l);
        c.ancillas.clear();
        c.push_named("ID", &[0]).unwrap();
        let v = append_bell_gadget(&c).unwrap();
        assert_eq!(v.len(), 13);
        // W1 = 1: W2W3 ends in φ⁺ (indices 0b100 and 0b111).
        let mut input = DVector::zeros(8);
        input[4] = C64::new(1.0, 0.0);
        let out = v.trajectory(&input).pop().unwrap();
        let r = 0.5f64.sqrt();
        assert!((out[4] - C64::new(r, 0.0)).norm() < 1e-12 && (out[7] - C64::new(r, 0.0)).norm() < 1e-12);
        let mut input0 = DVector::zeros(8);
        input0[0] = C64::new(1.0, 0.0);
        let out0 = v.trajectory(&input0).pop().unwrap();
        assert!((out0[0] - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn decomposition_matches_direct_evaluation() {
        let mach = machine_with(1.0, 1, |_| 0.0).unwrap();
        let sim = simulator_circuit(&mach, 2, 3).unwrap();
        let inst = build_apx_2corr(&mach, &sim, 1.0).unwrap();
        let pl = inst.circuit.proof_layout().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let amps = DVector::from_fn(pl.dim(), |_, _| {
                C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
            });
            let proof = StateVector::normalized(pl.clone(), amps).unwrap();
            let h = history_correlation(&inst, &proof).unwrap();
            assert!((h.direct - h.decomposed).abs() < 1e-9, "{h:?}");
        }
    }

    #[test]
    fn yes_and_no_machines() {
        let eps = 1.0;
        let l = 3;
        let yes = machine_with(eps, 1, |_| 0.0).unwrap();
        let inst = build_apx_2corr(&yes, &simulator_circuit(&yes, l, 3).unwrap(), 1.0).unwrap();
        let d = decide_apx_2corr(&inst, 0, 1).unwrap();
        assert_eq!(d.verdict, Verdict::Yes);
        // Gadget sums: Σ⟨ZZ⟩ = 7, Σ⟨Z₂⟩ = 0, Σ⟨Z₃⟩ = 2 over the last 12 steps.
        let n = l as f64 + 13.0;
        let oracle = (l as f64 + 8.0) / n - (l as f64 + 1.0) * (l as f64 + 3.0) / (n * n);
        assert!((d.ground_max_f - oracle).abs() < 1e-9, "{} vs {oracle}", d.ground_max_f);

        let no = machine_with(eps, 1, |_| 3.0 * eps).unwrap();
        let inst = build_apx_2corr(&no, &simulator_circuit(&no, l, 3).unwrap(), 1.0).unwrap();
        let d = decide_apx_2corr(&inst, 2000, 1).unwrap();
        assert_eq!(d.verdict, Verdict::No, "{d:?}");
        assert!(d.sampled_max_f <= inst.no_bound);
    }

    #[test]
    fn bound_reaches_a_from_36_gates() {
        assert!(yes_bound(35) < 3.0 / 48.0);
        assert!(yes_bound(36) >= 3.0 / 49.0);
    }
}
