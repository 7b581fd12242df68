//! Small dense matrix helpers.

use nalgebra::DMatrix;

use crate::C64;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(d: usize) -> DMatrix<C64> {
    DMatrix::identity(d, d)
}

/// `|i⟩⟨j|` on a `d`-level system.
pub fn ket_bra(d: usize, i: usize, j: usize) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(d, d);
    m[(i, j)] = c(1.0);
    m
}

/// `|k⟩⟨k|` on a `d`-level system.
pub fn projector(d: usize, k: usize) -> DMatrix<C64> {
    ket_bra(d, k, k)
}

pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

pub fn kron_all(ms: &[DMatrix<C64>]) -> DMatrix<C64> {
    ms.iter().fold(identity(1), |acc, m| acc.kronecker(m))
}

/// Index of a digit string in a mixed-radix system, first digit most significant.
pub fn pattern_index(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&v, &d)| acc * d + v)
}

/// `|x⟩⟨x|` for the digit string `x` over local dimensions `dims`.
pub fn pattern_projector(digits: &[usize], dims: &[usize]) -> DMatrix<C64> {
    let d: usize = dims.iter().product();
    projector(d, pattern_index(digits, dims))
}

/// Largest entry of `|M − M†|`.
pub fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entry of `|U†U − I|`.
pub fn unitarity_defect(u: &DMatrix<C64>) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let p = u.adjoint() * u;
    let mut worst: f64 = 0.0;
    for i in 0..p.nrows() {
        for j in 0..p.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((p[(i, j)] - c(target)).norm());
        }
    }
    worst
}

pub fn pauli_x() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
}

pub fn pauli_y() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), c(0.0)])
}

pub fn pauli_z() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)])
}

/// True when every entry has zero imaginary part.
pub fn is_real(m: &DMatrix<C64>) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_projector_places_one() {
        let p = pattern_projector(&[1, 0], &[2, 2]);
        assert_eq!(p[(2, 2)], c(1.0));
        assert_eq!(p.iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn paulis_are_hermitian_unitary() {
        for p in [pauli_x(), pauli_y(), pauli_z()] {
            assert_eq!(hermiticity_defect(&p), 0.0);
            assert!(unitarity_defect(&p) < 1e-15);
        }
    }
}
