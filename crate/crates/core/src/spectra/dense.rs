//! Dense Hermitian eigendecomposition.

use nalgebra::{DMatrix, DVector};

use crate::C64;

/// Ascending eigenvalues with optional eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct DenseEigen {
    pub values: Vec<f64>,
    pub vectors: Option<DMatrix<C64>>,
}

impl DenseEigen {
    pub fn vector(&self, k: usize) -> DVector<C64> {
        self.vectors.as_ref().expect("eigenvectors were not requested").column(k).into_owned()
    }
}

/// Eigendecomposition of the Hermitian part of `m`. Real input takes a
/// real-symmetric path.
pub fn eigh(m: &DMatrix<C64>, with_vectors: bool) -> DenseEigen {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "matrix is not square");
    if n == 0 {
        return DenseEigen { values: vec![], vectors: with_vectors.then(|| DMatrix::zeros(0, 0)) };
    }
    if m.iter().all(|z| z.im == 0.0) {
        let r = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)].re + m[(j, i)].re));
        if !with_vectors {
            return DenseEigen { values: sorted(r.symmetric_eigenvalues().iter().copied().collect()), vectors: None };
        }
        let e = r.symmetric_eigen();
        let order = argsort(e.eigenvalues.as_slice());
        let values = order.iter().map(|&k| e.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(n, n, |i, j| C64::new(e.eigenvectors[(i, order[j])], 0.0));
        return DenseEigen { values, vectors: Some(vectors) };
    }
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    if !with_vectors {
        return DenseEigen { values: sorted(h.symmetric_eigenvalues().iter().copied().collect()), vectors: None };
    }
    let e = h.symmetric_eigen();
    let order = argsort(e.eigenvalues.as_slice());
    let values = order.iter().map(|&k| e.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| e.eigenvectors[(i, order[j])]);
    DenseEigen { values, vectors: Some(vectors) }
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    eigh(m, false).values
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &DMatrix<C64>) -> f64 {
    eigenvalues(m)[0]
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn argsort(v: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    idx
}
