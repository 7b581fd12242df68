//! Checks on compiled clock Hamiltonians.

use nalgebra::DMatrix;
use serde::Serialize;

use super::compile::{clock_index, compile, compile_with, ClockEncoding, CompiledCircuit};
use super::history::history_basis;
use super::QuantumCircuit;
use crate::spectra::dense::{eigenvalues, eigh};
use crate::{Error, Result, C64};

/// `π²Δ / (64 L³)`.
pub fn gap_lower_bound(delta: f64, steps: usize) -> f64 {
    std::f64::consts::PI.powi(2) * delta / (64.0 * (steps as f64).powi(3))
}

/// Kernel tolerance for a compiled Hamiltonian with eigenvalue scale `scale`.
fn kernel_tol(scale: f64) -> f64 {
    1e-9 * scale.max(1.0)
}

/// Comparison of the numerical null space with the history-state span.
#[derive(Clone, Debug, Serialize)]
pub struct NullspaceReport {
    pub encoding: ClockEncoding,
    pub steps: usize,
    pub qubits: usize,
    pub kernel_dim: usize,
    pub history_dim: usize,
    /// Largest principal angle between the two subspaces (radians).
    pub max_principal_angle: f64,
    pub passed: bool,
}

/// Diagonalises `Δ=1` `H_in + H_prop + H_stab` and compares its kernel with
/// the span of history states over all proofs.
pub fn verify_nullspace(circuit: &QuantumCircuit, encoding: ClockEncoding, angle_tol: f64) -> Result<NullspaceReport> {
    let comp = compile(circuit, encoding, 1.0, false)?;
    nullspace_of(&comp, circuit, angle_tol)
}

/// Same check with gate `t` of `H_prop` replaced by `unitaries[t]`.
pub fn verify_nullspace_with(
    circuit: &QuantumCircuit,
    encoding: ClockEncoding,
    angle_tol: f64,
    unitaries: &[DMatrix<C64>],
) -> Result<NullspaceReport> {
    let comp = compile_with(circuit, encoding, 1.0, false, Some(unitaries))?;
    nullspace_of(&comp, circuit, angle_tol)
}

fn nullspace_of(comp: &CompiledCircuit, circuit: &QuantumCircuit, angle_tol: f64) -> Result<NullspaceReport> {
    let m = comp.hamiltonian.realize_dense()?;
    let e = eigh(&m, true);
    let scale = e.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tol = kernel_tol(scale);
    let k = e.values.iter().filter(|&&v| v.abs() <= tol).count();
    let vecs = e.vectors.as_ref().unwrap();
    let kernel = vecs.columns(0, k).into_owned();
    let hist = history_basis(circuit, comp.encoding)?;
    let hdim = hist.len();
    let hmat = DMatrix::from_fn(m.nrows(), hdim, |i, j| hist[j].amplitudes()[i]);
    let angle = if k == hdim && k > 0 {
        // sin θ_max = ‖(I − K K†) H‖₂ for equal-dimensional subspaces.
        let resid = &hmat - &kernel * (kernel.adjoint() * &hmat);
        let s = resid.singular_values().iter().fold(0.0f64, |a, &v| a.max(v));
        s.min(1.0).asin()
    } else {
        std::f64::consts::FRAC_PI_2
    };
    Ok(NullspaceReport {
        encoding: comp.encoding,
        steps: comp.steps,
        qubits: circuit.layout().num_sites(),
        kernel_dim: k,
        history_dim: hdim,
        max_principal_angle: angle,
        passed: k == hdim && angle < angle_tol,
    })
}

/// Smallest nonzero eigenvalue against the `π²Δ/(64L³)` bound.
#[derive(Clone, Debug, Serialize)]
pub struct GapBoundReport {
    pub encoding: ClockEncoding,
    pub delta: f64,
    pub steps: usize,
    pub smallest_nonzero: f64,
    pub bound: f64,
    pub margin: f64,
    pub passed: bool,
    /// Set when the margin is within `1e-9` (informational).
    pub flagged: bool,
}

pub fn verify_gap_bound(circuit: &QuantumCircuit, encoding: ClockEncoding, delta: f64) -> Result<GapBoundReport> {
    let comp = compile(circuit, encoding, delta, false)?;
    gap_report(&comp, delta)
}

/// Gap check on an already compiled Hamiltonian (`H_out` must be absent).
pub fn gap_report(comp: &CompiledCircuit, delta: f64) -> Result<GapBoundReport> {
    let vals = eigenvalues(&comp.hamiltonian.realize_dense()?);
    let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tol = kernel_tol(scale);
    let smallest = vals
        .iter()
        .copied()
        .find(|v| v.abs() > tol)
        .ok_or_else(|| Error::Input("Hamiltonian has no nonzero eigenvalue".into()))?;
    let bound = gap_lower_bound(delta, comp.steps);
    let margin = smallest - bound;
    Ok(GapBoundReport {
        encoding: comp.encoding,
        delta,
        steps: comp.steps,
        smallest_nonzero: smallest,
        bound,
        margin,
        passed: margin >= 0.0,
        flagged: margin.abs() < 1e-9,
    })
}

/// Largest eigenvalue difference between the abstract-clock Hamiltonian and
/// the unary one compressed to valid clock states.
pub fn abstract_unary_discrepancy(circuit: &QuantumCircuit, include_output: bool) -> Result<f64> {
    let a = compile(circuit, ClockEncoding::Abstract, 1.0, include_output)?;
    let u = compile(circuit, ClockEncoding::Unary, 1.0, include_output)?;
    let steps = circuit.len();
    let clock_dim = 1usize << steps;
    let indices: Vec<usize> = (0..circuit.layout().dim())
        .flat_map(|x| (0..=steps).map(move |t| x * clock_dim + clock_index(ClockEncoding::Unary, steps, t)))
        .collect();
    let restricted = u.hamiltonian.compress_to_basis(&indices, false)?;
    let va = eigenvalues(&a.hamiltonian.realize_dense()?);
    let vu = eigenvalues(&restricted);
    Ok(va.iter().zip(&vu).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kitaev::random::random_circuit;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_circuits_pass_both_encodings() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3 {
            let c = random_circuit(3, 3, &mut rng).unwrap();
            for enc in [ClockEncoding::Abstract, ClockEncoding::Unary] {
                let r = verify_nullspace(&c, enc, 1e-7).unwrap();
                assert!(r.passed, "{r:?}");
                let g = verify_gap_bound(&c, enc, 1.0).unwrap();
                assert!(g.passed, "{g:?}");
            }
        }
    }

    #[test]
    fn encodings_agree_on_valid_clock_subspace() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = random_circuit(2, 4, &mut rng).unwrap();
        assert!(abstract_unary_discrepancy(&c, true).unwrap() < 1e-10);
    }

    #[test]
    fn abstract_gap_is_path_graph_gap() {
        // Identity gates: H_prop is the path-graph Laplacian/2 on L+1 sites,
        // whose smallest nonzero eigenvalue is 1 − cos(π/(L+1)).
        let l = crate::operators::RegisterLayout::qubits(&[("Q", 1)]).unwrap();
        let mut c = QuantumCircuit::new(l);
        for _ in 0..4 {
            c.push_named("ID", &[0]).unwrap();
        }
        let g = verify_gap_bound(&c, ClockEncoding::Abstract, 1.0).unwrap();
        let oracle = 1.0 - (std::f64::consts::PI / 5.0).cos();
        assert!((g.smallest_nonzero - oracle).abs() < 1e-12);
    }
}
