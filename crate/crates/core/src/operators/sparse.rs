//! Compressed sparse row storage for realised operators.

use nalgebra::DVector;

use crate::C64;

/// Square CSR matrix.
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl SparseMatrix {
    /// Builds from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        SparseMatrix { dim, row_ptr, col_idx, values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn mul_vec(&self, v: &DVector<C64>) -> DVector<C64> {
        DVector::from_fn(self.dim, |r, _| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(|k| self.values[k] * v[self.col_idx[k]]).sum()
        })
    }
}
