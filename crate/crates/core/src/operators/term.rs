//! Weighted Hermitian operators acting on a few sites.

use nalgebra::DMatrix;

use super::matrices::{hermiticity_defect, pattern_index};
use super::RegisterLayout;
use crate::{Error, Result, C64};

/// Hermiticity tolerance applied to term blocks.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// `coefficient · block` acting on `support`.
///
/// Invariants: `support` is strictly increasing, `block` is square and
/// Hermitian within [`HERMITIAN_TOL`]. The block's basis enumerates the
/// support sites with the first one most significant. An empty support
/// denotes a multiple of the identity with a 1×1 block.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalTerm {
    support: Vec<usize>,
    block: DMatrix<C64>,
    coefficient: f64,
    tag: Option<String>,
}

impl LocalTerm {
    pub fn new(support: Vec<usize>, block: DMatrix<C64>, coefficient: f64) -> Result<Self> {
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Term(format!("support {support:?} is not strictly increasing")));
        }
        if block.nrows() != block.ncols() {
            return Err(Error::Term("block is not square".into()));
        }
        if !coefficient.is_finite() {
            return Err(Error::Term("coefficient is not finite".into()));
        }
        let defect = hermiticity_defect(&block);
        if defect > HERMITIAN_TOL {
            return Err(Error::NonHermitian(defect));
        }
        Ok(LocalTerm { support, block, coefficient, tag: None })
    }

    /// `value · I`.
    pub fn scalar(value: f64) -> Self {
        LocalTerm { support: vec![], block: DMatrix::identity(1, 1), coefficient: value, tag: None }
    }

    /// Term whose block is written over `sites` in the listed order; the
    /// block is permuted so the stored support is sorted.
    pub fn from_ordered(
        sites: &[usize],
        block: DMatrix<C64>,
        coefficient: f64,
        layout: &RegisterLayout,
    ) -> Result<Self> {
        for &s in sites {
            if s >= layout.num_sites() {
                return Err(Error::SupportOutOfRange { support: sites.to_vec(), sites: layout.num_sites() });
            }
        }
        let mut sorted = sites.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Term(format!("support {sites:?} repeats a site")));
        }
        let dims_given: Vec<usize> = sites.iter().map(|&s| layout.site_dim(s)).collect();
        let dims_sorted: Vec<usize> = sorted.iter().map(|&s| layout.site_dim(s)).collect();
        let d: usize = dims_given.iter().product();
        if block.nrows() != d {
            return Err(Error::Term(format!("block dimension {} does not match support dimension {d}", block.nrows())));
        }
        let pos: Vec<usize> = sorted.iter().map(|s| sites.iter().position(|t| t == s).unwrap()).collect();
        let map: Vec<usize> = (0..d)
            .map(|i| {
                let digits_sorted = mixed_digits(i, &dims_sorted);
                let mut digits_given = vec![0; sites.len()];
                for (k, &p) in pos.iter().enumerate() {
                    digits_given[p] = digits_sorted[k];
                }
                pattern_index(&digits_given, &dims_given)
            })
            .collect();
        let permuted = DMatrix::from_fn(d, d, |i, j| block[(map[i], map[j])]);
        let term = LocalTerm::new(sorted, permuted, coefficient)?;
        term.check_layout(layout)?;
        Ok(term)
    }

    pub fn with_tag(mut self, tag: &str) -> Self {
        self.tag = Some(tag.to_string());
        self
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn block(&self) -> &DMatrix<C64> {
        &self.block
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn tag(&self) -> Option<&str> {
        self.tag.as_deref()
    }

    pub fn locality(&self) -> usize {
        self.support.len()
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut t = self.clone();
        t.coefficient *= s;
        t
    }

    /// Same term with every support site sent through `map`.
    pub fn remapped(&self, map: &[usize], layout: &RegisterLayout) -> Result<Self> {
        let sites: Vec<usize> = self.support.iter().map(|&s| map[s]).collect();
        let mut t = LocalTerm::from_ordered(&sites, self.block.clone(), self.coefficient, layout)?;
        t.tag = self.tag.clone();
        Ok(t)
    }

    /// Checks that the support fits `layout` and the block matches the
    /// product of the local dimensions.
    pub fn check_layout(&self, layout: &RegisterLayout) -> Result<()> {
        if let Some(&last) = self.support.last() {
            if last >= layout.num_sites() {
                return Err(Error::SupportOutOfRange { support: self.support.clone(), sites: layout.num_sites() });
            }
        }
        let d = layout.support_dim(&self.support);
        if self.block.nrows() != d {
            return Err(Error::Term(format!(
                "block dimension {} does not match support dimension {d}",
                self.block.nrows()
            )));
        }
        Ok(())
    }

    /// `|coefficient| · ‖block‖₂`.
    pub fn norm(&self) -> f64 {
        let eig = self.block.clone().symmetric_eigenvalues();
        self.coefficient.abs() * eig.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Largest off-diagonal magnitude of the block with respect to the
    /// computational basis of `sites` (sites outside the support are ignored).
    pub fn off_diagonal_on(&self, sites: &[usize], layout: &RegisterLayout) -> f64 {
        let dims: Vec<usize> = self.support.iter().map(|&s| layout.site_dim(s)).collect();
        let watched: Vec<usize> =
            self.support.iter().enumerate().filter(|(_, s)| sites.contains(s)).map(|(k, _)| k).collect();
        if watched.is_empty() {
            return 0.0;
        }
        let d = self.block.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            let di = mixed_digits(i, &dims);
            for j in 0..d {
                let dj = mixed_digits(j, &dims);
                if watched.iter().any(|&k| di[k] != dj[k]) {
                    worst = worst.max(self.block[(i, j)].norm() * self.coefficient.abs());
                }
            }
        }
        worst
    }
}

/// Digits of `i` in the mixed radix `dims`, first digit most significant.
pub fn mixed_digits(mut i: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = i % dims[k];
        i /= dims[k];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::matrices::{c, kron, pauli_x, pauli_z, projector};

    #[test]
    fn rejects_non_hermitian() {
        let mut b = DMatrix::zeros(2, 2);
        b[(0, 1)] = c(1.0);
        assert!(matches!(LocalTerm::new(vec![0], b, 1.0), Err(Error::NonHermitian(_))));
    }

    #[test]
    fn rejects_unsorted_support() {
        assert!(LocalTerm::new(vec![1, 0], DMatrix::identity(4, 4), 1.0).is_err());
    }

    #[test]
    fn from_ordered_permutes_block() {
        let l = RegisterLayout::qubits(&[("A", 2)]).unwrap();
        // Z on site 1 ⊗ X on site 0, written in order (1, 0).
        let t = LocalTerm::from_ordered(&[1, 0], kron(&pauli_z(), &pauli_x()), 1.0, &l).unwrap();
        assert_eq!(t.support(), &[0, 1]);
        assert_eq!(t.block(), &kron(&pauli_x(), &pauli_z()));
    }

    #[test]
    fn off_diagonal_detection() {
        let l = RegisterLayout::qubits(&[("A", 2)]).unwrap();
        let t = LocalTerm::new(vec![0, 1], kron(&projector(2, 1), &pauli_x()), 2.0).unwrap();
        assert_eq!(t.off_diagonal_on(&[0], &l), 0.0);
        assert_eq!(t.off_diagonal_on(&[1], &l), 2.0);
    }

    #[test]
    fn norm_is_scaled_spectral_norm() {
        let t = LocalTerm::new(vec![0], pauli_z(), -3.0).unwrap();
        assert!((t.norm() - 3.0).abs() < 1e-12);
    }
}
