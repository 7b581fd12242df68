//! Pure states on a register layout.

use nalgebra::DVector;

use super::{Observable, RegisterLayout};
use crate::{Error, Result, C64};

/// Normalisation tolerance for state vectors.
pub const NORM_TOL: f64 = 1e-10;

/// Unit vector in the layout's Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    layout: RegisterLayout,
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(layout: RegisterLayout, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != layout.dim() {
            return Err(Error::LayoutMismatch(format!(
                "state has {} amplitudes, layout dimension is {}",
                amplitudes.len(),
                layout.dim()
            )));
        }
        let n = amplitudes.norm();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(StateVector { layout, amplitudes })
    }

    /// Normalises `amplitudes`; fails on the zero vector.
    pub fn normalized(layout: RegisterLayout, amplitudes: DVector<C64>) -> Result<Self> {
        let n = amplitudes.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n));
        }
        Self::new(layout, amplitudes / C64::new(n, 0.0))
    }

    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        let mut a = DVector::zeros(layout.dim());
        if index >= a.len() {
            return Err(Error::Input(format!("basis index {index} out of range")));
        }
        a[index] = C64::new(1.0, 0.0);
        Ok(StateVector { layout, amplitudes: a })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

/// `‖|v⟩⟨v| − |w⟩⟨w|‖_tr = 2√(1 − |⟨v|w⟩|²)` for unit vectors.
pub fn trace_distance_pure(v: &StateVector, w: &StateVector) -> f64 {
    let f = v.inner(w).norm_sqr();
    2.0 * (1.0 - f).max(0.0).sqrt()
}

/// `⟨ψ|O|ψ⟩`; errors if the imaginary part exceeds `1e-10 · max(1, ‖O‖)`.
pub fn expectation(state: &StateVector, observable: &Observable) -> Result<f64> {
    if state.layout() != observable.layout() {
        return Err(Error::LayoutMismatch("state and observable layouts differ".into()));
    }
    let z = observable.quadratic_form(state.amplitudes());
    if z.im.abs() > 1e-10 * observable.norm_bound().max(1.0) {
        return Err(Error::NonHermitian(z.im.abs()));
    }
    Ok(z.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::matrices::pauli_z;
    use crate::operators::{Hamiltonian, LocalTerm};

    #[test]
    fn trace_distance_limits() {
        let l = RegisterLayout::qubits(&[("A", 1)]).unwrap();
        let a = StateVector::basis(l.clone(), 0).unwrap();
        let b = StateVector::basis(l.clone(), 1).unwrap();
        assert!((trace_distance_pure(&a, &a)).abs() < 1e-15);
        assert!((trace_distance_pure(&a, &b) - 2.0).abs() < 1e-15);
        let plus = StateVector::normalized(l, DVector::from_element(2, C64::new(1.0, 0.0))).unwrap();
        assert!((trace_distance_pure(&a, &plus) - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn expectation_of_z() {
        let l = RegisterLayout::qubits(&[("A", 1)]).unwrap();
        let mut h = Hamiltonian::new(l.clone());
        h.push(LocalTerm::new(vec![0], pauli_z(), 1.0).unwrap()).unwrap();
        let one = StateVector::basis(l, 1).unwrap();
        assert_eq!(expectation(&one, &h).unwrap(), -1.0);
    }

    #[test]
    fn rejects_unnormalised() {
        let l = RegisterLayout::qubits(&[("A", 1)]).unwrap();
        assert!(StateVector::new(l, DVector::from_element(2, C64::new(1.0, 0.0))).is_err());
    }
}
