//! Sums of local terms over a register layout.

use nalgebra::{DMatrix, DVector};

use super::{LocalTerm, RegisterLayout, SparseMatrix};
use crate::{Error, Result, C64};

/// Largest base-2 dimension for which a dense matrix is materialised.
pub const DENSE_LIMIT_LOG2: u32 = 14;

/// `Σ_k c_k · B_k` with every term embedded into `layout`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    layout: RegisterLayout,
    terms: Vec<LocalTerm>,
}

/// Observables share the Hamiltonian representation.
pub type Observable = Hamiltonian;

impl Hamiltonian {
    pub fn new(layout: RegisterLayout) -> Self {
        Hamiltonian { layout, terms: Vec::new() }
    }

    pub fn with_terms(layout: RegisterLayout, terms: Vec<LocalTerm>) -> Result<Self> {
        let mut h = Hamiltonian::new(layout);
        for t in terms {
            h.push(t)?;
        }
        Ok(h)
    }

    pub fn push(&mut self, term: LocalTerm) -> Result<()> {
        term.check_layout(&self.layout)?;
        self.terms.push(term);
        Ok(())
    }

    /// Adds every term of `other`, which must share this layout.
    pub fn extend(&mut self, other: &Hamiltonian) -> Result<()> {
        if other.layout != self.layout {
            return Err(Error::LayoutMismatch("cannot add Hamiltonians on different layouts".into()));
        }
        self.terms.extend(other.terms.iter().cloned());
        Ok(())
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn terms(&self) -> &[LocalTerm] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    /// Largest support size over all terms.
    pub fn locality(&self) -> usize {
        self.terms.iter().map(|t| t.locality()).max().unwrap_or(0)
    }

    /// `Σ_k |c_k| ‖B_k‖₂`, an upper bound on the operator norm.
    pub fn norm_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.norm()).sum()
    }

    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|t| super::matrices::is_real(t.block()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Hamiltonian { layout: self.layout.clone(), terms: self.terms.iter().map(|t| t.scaled(s)).collect() }
    }

    /// Sub-sum of terms carrying `tag`.
    pub fn tagged(&self, tag: &str) -> Self {
        Hamiltonian {
            layout: self.layout.clone(),
            terms: self.terms.iter().filter(|t| t.tag() == Some(tag)).cloned().collect(),
        }
    }

    /// Same operator with every term's coefficient under `tag` multiplied by `s`.
    pub fn rescale_tag(&self, tag: &str, s: f64) -> Self {
        Hamiltonian {
            layout: self.layout.clone(),
            terms: self.terms.iter().map(|t| if t.tag() == Some(tag) { t.scaled(s) } else { t.clone() }).collect(),
        }
    }

    /// Re-embeds into `layout`, sending old site `i` to `map[i]`.
    pub fn remapped(&self, layout: &RegisterLayout, map: &[usize]) -> Result<Self> {
        if map.len() != self.layout.num_sites() {
            return Err(Error::LayoutMismatch("site map has the wrong length".into()));
        }
        for (i, &j) in map.iter().enumerate() {
            if j >= layout.num_sites() || layout.site_dim(j) != self.layout.site_dim(i) {
                return Err(Error::LayoutMismatch(format!("site {i} cannot be mapped to site {j}")));
            }
        }
        let terms = self.terms.iter().map(|t| t.remapped(map, layout)).collect::<Result<Vec<_>>>()?;
        Hamiltonian::with_terms(layout.clone(), terms)
    }

    /// Largest off-diagonal entry of any term with respect to the
    /// computational basis of `sites`. Zero means `H` is block diagonal there.
    pub fn off_diagonal_on(&self, sites: &[usize]) -> f64 {
        self.terms.iter().map(|t| t.off_diagonal_on(sites, &self.layout)).fold(0.0, f64::max)
    }

    /// Dense `2^n × 2^n` matrix.
    pub fn realize_dense(&self) -> Result<DMatrix<C64>> {
        let dim = self.dim();
        if dim > 1usize << DENSE_LIMIT_LOG2 {
            return Err(Error::DimensionOverflow(format!("dense realisation of dimension {dim}")));
        }
        let mut m = DMatrix::zeros(dim, dim);
        self.for_each_entry(|r, c, v| m[(r, c)] += v);
        Ok(m)
    }

    /// Compressed sparse row matrix.
    pub fn realize_sparse(&self) -> SparseMatrix {
        let mut triplets = Vec::new();
        self.for_each_entry(|r, c, v| triplets.push((r, c, v)));
        SparseMatrix::from_triplets(self.dim(), triplets)
    }

    fn for_each_entry(&self, mut f: impl FnMut(usize, usize, C64)) {
        for t in &self.terms {
            let s_off = self.layout.local_offsets(t.support());
            let rest = self.layout.complement(t.support());
            let r_off = self.layout.local_offsets(&rest);
            let b = t.block();
            let c = t.coefficient();
            let nz: Vec<(usize, usize, C64)> = (0..b.nrows())
                .flat_map(|i| (0..b.ncols()).map(move |j| (i, j)))
                .filter(|&(i, j)| b[(i, j)] != C64::new(0.0, 0.0))
                .map(|(i, j)| (s_off[i], s_off[j], b[(i, j)] * c))
                .collect();
            for &r in &r_off {
                for &(i, j, v) in &nz {
                    f(r + i, r + j, v);
                }
            }
        }
    }

    /// `H v` computed term by term without materialising `H`.
    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        assert_eq!(v.len(), self.dim(), "vector length does not match layout");
        let mut out = DVector::zeros(v.len());
        let mut local = DVector::zeros(0);
        for t in &self.terms {
            let s_off = self.layout.local_offsets(t.support());
            let rest = self.layout.complement(t.support());
            let r_off = self.layout.local_offsets(&rest);
            let b = t.block() * C64::new(t.coefficient(), 0.0);
            if local.len() != s_off.len() {
                local = DVector::zeros(s_off.len());
            }
            for &r in &r_off {
                for (k, &o) in s_off.iter().enumerate() {
                    local[k] = v[r + o];
                }
                let w = &b * &local;
                for (k, &o) in s_off.iter().enumerate() {
                    out[r + o] += w[k];
                }
            }
        }
        out
    }

    /// `⟨v|H|v⟩` for a vector of matching length (not necessarily normalised).
    pub fn quadratic_form(&self, v: &DVector<C64>) -> C64 {
        v.dotc(&self.apply(v))
    }

    /// Compression `P H P` onto the span of the listed basis states,
    /// returned in the listed order. With `strict`, any amplitude leaving the
    /// span is an error.
    pub fn compress_to_basis(&self, indices: &[usize], strict: bool) -> Result<DMatrix<C64>> {
        let dim = self.dim();
        let mut pos = vec![usize::MAX; dim];
        for (k, &i) in indices.iter().enumerate() {
            if i >= dim {
                return Err(Error::Input(format!("basis index {i} out of range")));
            }
            pos[i] = k;
        }
        let n = indices.len();
        let mut m = DMatrix::zeros(n, n);
        for t in &self.terms {
            let support = t.support();
            let s_off = self.layout.local_offsets(support);
            let dims: Vec<usize> = support.iter().map(|&s| self.layout.site_dim(s)).collect();
            let strides: Vec<usize> = support.iter().map(|&s| self.layout.strides()[s]).collect();
            let b = t.block();
            let c = t.coefficient();
            for (col, &idx) in indices.iter().enumerate() {
                let local: usize = dims.iter().zip(&strides).fold(0, |acc, (&d, &s)| acc * d + (idx / s) % d);
                let base = idx - s_off[local];
                for (i, &o) in s_off.iter().enumerate() {
                    let v = b[(i, local)];
                    if v == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let target = base + o;
                    match pos[target] {
                        usize::MAX if strict => {
                            return Err(Error::Input(format!(
                                "operator maps basis state {idx} outside the chosen span"
                            )))
                        }
                        usize::MAX => {}
                        row => m[(row, col)] += v * c,
                    }
                }
            }
        }
        Ok(m)
    }

    /// Dense block of `H` on the sector where each `(site, level)` in
    /// `fixed` is pinned, ordered by the remaining sites. `H` must leave the
    /// sector invariant.
    pub fn realize_sector(&self, fixed: &[(usize, usize)]) -> Result<DMatrix<C64>> {
        let indices = self.sector_indices(fixed)?;
        self.compress_to_basis(&indices, true)
    }

    /// Basis indices consistent with the pinned digits, in increasing order.
    pub fn sector_indices(&self, fixed: &[(usize, usize)]) -> Result<Vec<usize>> {
        for &(s, v) in fixed {
            if s >= self.layout.num_sites() || v >= self.layout.site_dim(s) {
                return Err(Error::Input(format!("cannot pin site {s} to level {v}")));
            }
        }
        let pinned: Vec<usize> = fixed.iter().map(|&(s, _)| s).collect();
        let free = self.layout.complement(&pinned);
        let base: usize = fixed.iter().map(|&(s, v)| v * self.layout.strides()[s]).sum();
        Ok(self.layout.local_offsets(&free).into_iter().map(|o| base + o).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::matrices::{c, kron, pauli_x, pauli_z, projector};

    fn two_qubit() -> Hamiltonian {
        let l = RegisterLayout::qubits(&[("A", 2)]).unwrap();
        let mut h = Hamiltonian::new(l);
        h.push(LocalTerm::new(vec![0], pauli_z(), 0.5).unwrap()).unwrap();
        h.push(LocalTerm::new(vec![1], pauli_x(), 2.0).unwrap()).unwrap();
        h.push(LocalTerm::new(vec![0, 1], kron(&pauli_z(), &pauli_z()), -1.0).unwrap()).unwrap();
        h
    }

    #[test]
    fn dense_matches_kronecker_oracle() {
        let h = two_qubit();
        let i2 = DMatrix::<C64>::identity(2, 2);
        let oracle = kron(&pauli_z(), &i2) * c(0.5) + kron(&i2, &pauli_x()) * c(2.0) - kron(&pauli_z(), &pauli_z());
        assert!((h.realize_dense().unwrap() - oracle).norm() < 1e-14);
    }

    #[test]
    fn apply_and_sparse_agree_with_dense() {
        let h = two_qubit();
        let m = h.realize_dense().unwrap();
        let v = DVector::from_fn(4, |i, _| C64::new(i as f64 + 1.0, 0.5 - i as f64));
        assert!((h.apply(&v) - &m * &v).norm() < 1e-13);
        assert!((h.realize_sparse().mul_vec(&v) - &m * &v).norm() < 1e-13);
    }

    #[test]
    fn sector_block_of_diagonal_site() {
        let l = RegisterLayout::qubits(&[("A", 2)]).unwrap();
        let mut h = Hamiltonian::new(l);
        h.push(LocalTerm::new(vec![0, 1], kron(&projector(2, 1), &pauli_x()), 1.0).unwrap()).unwrap();
        let s1 = h.realize_sector(&[(0, 1)]).unwrap();
        assert!((s1 - pauli_x()).norm() < 1e-15);
        assert!(h.realize_sector(&[(1, 0)]).is_err());
    }

    #[test]
    fn remap_moves_terms() {
        let h = two_qubit();
        let big = RegisterLayout::qubits(&[("A", 3)]).unwrap();
        let moved = h.remapped(&big, &[2, 0]).unwrap();
        assert_eq!(moved.terms()[0].support(), &[2]);
        assert_eq!(moved.terms()[2].support(), &[0, 2]);
    }
}
