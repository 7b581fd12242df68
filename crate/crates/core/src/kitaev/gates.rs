//! Gate library.
//!
//! Two-qubit matrices list the first target as the more significant qubit;
//! for controlled gates the first target is the control.

use nalgebra::DMatrix;

use crate::operators::matrices::{c, identity, pauli_x, pauli_y, pauli_z, projector};
use crate::C64;

/// A unitary on one or two qubits of a circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub label: String,
    pub targets: Vec<usize>,
    pub unitary: DMatrix<C64>,
}

/// `V = √X`.
pub fn sqrt_x() -> DMatrix<C64> {
    let a = C64::new(0.5, 0.5);
    let b = C64::new(0.5, -0.5);
    DMatrix::from_row_slice(2, 2, &[a, b, b, a])
}

pub fn hadamard() -> DMatrix<C64> {
    let s = c(std::f64::consts::FRAC_1_SQRT_2);
    DMatrix::from_row_slice(2, 2, &[s, s, s, -s])
}

/// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ U`.
pub fn controlled(u: &DMatrix<C64>) -> DMatrix<C64> {
    projector(2, 0).kronecker(&identity(u.nrows())) + projector(2, 1).kronecker(u)
}

/// Matrix of a built-in label, if known.
pub fn standard_matrix(label: &str) -> Option<DMatrix<C64>> {
    let m = match label {
        "ID" => identity(2),
        "X" => pauli_x(),
        "Y" => pauli_y(),
        "Z" => pauli_z(),
        "H" => hadamard(),
        "S" => DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), C64::new(0.0, 1.0)])),
        "T" => DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0),
            C64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
        ])),
        "V" => sqrt_x(),
        "CNOT" => controlled(&pauli_x()),
        "CZ" => controlled(&pauli_z()),
        "CH" => controlled(&hadamard()),
        "CV" => controlled(&sqrt_x()),
        "CVDG" => controlled(&sqrt_x().adjoint()),
        _ => return None,
    };
    Some(m)
}

/// Number of targets taken by a built-in label.
pub fn standard_arity(label: &str) -> Option<usize> {
    match label {
        "ID" | "X" | "Y" | "Z" | "H" | "S" | "T" | "V" => Some(1),
        "CNOT" | "CZ" | "CH" | "CV" | "CVDG" => Some(2),
        "TOFFOLI-decomposed" => Some(3),
        _ => None,
    }
}

/// Expands a built-in label into gates. `TOFFOLI-decomposed` on
/// `[a, b, t]` becomes `CV(b,t) CNOT(a,b) CV†(b,t) CNOT(a,b) CV(a,t)`.
pub fn expand_named(label: &str, targets: &[usize]) -> Option<Vec<Gate>> {
    let arity = standard_arity(label)?;
    if targets.len() != arity {
        return None;
    }
    let g =
        |l: &str, t: &[usize]| Gate { label: l.to_string(), targets: t.to_vec(), unitary: standard_matrix(l).unwrap() };
    if label == "TOFFOLI-decomposed" {
        let (a, b, t) = (targets[0], targets[1], targets[2]);
        return Some(vec![
            g("CV", &[b, t]),
            g("CNOT", &[a, b]),
            g("CVDG", &[b, t]),
            g("CNOT", &[a, b]),
            g("CV", &[a, t]),
        ]);
    }
    Some(vec![g(label, targets)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::matrices::unitarity_defect;

    #[test]
    fn sqrt_x_squares_to_x() {
        assert!((sqrt_x() * sqrt_x() - pauli_x()).norm() < 1e-15);
    }

    #[test]
    fn built_ins_are_unitary() {
        for l in ["ID", "X", "Y", "Z", "H", "S", "T", "V", "CNOT", "CZ", "CH", "CV", "CVDG"] {
            assert!(unitarity_defect(&standard_matrix(l).unwrap()) < 1e-14, "{l}");
        }
    }

    #[test]
    fn cnot_flips_target_when_control_set() {
        let m = standard_matrix("CNOT").unwrap();
        assert_eq!(m[(3, 2)], c(1.0));
        assert_eq!(m[(0, 0)], c(1.0));
    }
}
