//! Eigensolvers, spectral gaps and low-energy optimisation.
//!
//! Hamiltonians up to `2^dense_cutoff` dimensions are diagonalised densely;
//! larger ones go through a seeded Lanczos iteration on the term-wise
//! matrix-vector product.

pub mod dense;
mod lanczos;
mod lowenergy;
mod overlap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

pub use lanczos::{lanczos_smallest, LanczosParams};
pub use lowenergy::{min_observable_over_low_energy, LowEnergyMin};
pub use overlap::{projection_overlap_bound, random_overlap_instance, sample_low_energy_overlap, OverlapInstance};

use crate::operators::Hamiltonian;
use crate::{Error, Result, C64};

/// Default base-2 dimension above which the Lanczos backend is used.
pub const DEFAULT_DENSE_CUTOFF: u32 = 11;

/// Numerical settings shared by every solver entry point.
#[derive(Clone, Debug, Serialize)]
pub struct SolverConfig {
    pub dense_cutoff: u32,
    /// Relative tolerance for residuals and degeneracy, scaled by `max(1, ‖H‖)`.
    pub tol: f64,
    pub seed: u64,
    pub max_restarts: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { dense_cutoff: DEFAULT_DENSE_CUTOFF, tol: 1e-9, seed: 0, max_restarts: 500 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Dense,
    Lanczos,
}

/// Lowest eigenpairs of a Hamiltonian together with diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `λ₁ − λ₀` when at least two eigenvalues were computed.
    pub gap: Option<f64>,
    pub ground_degeneracy: usize,
    /// Absolute degeneracy tolerance that was applied.
    pub tolerance: f64,
    pub backend: Backend,
    pub seed: u64,
    #[serde(skip)]
    pub vectors: Vec<DVector<C64>>,
    /// Orthonormal basis of the computed ground space.
    #[serde(skip)]
    pub ground_basis: Vec<DVector<C64>>,
}

impl SpectralReport {
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }
}

fn choose_backend(h: &Hamiltonian, config: &SolverConfig) -> Backend {
    if h.dim() <= 1usize << config.dense_cutoff.min(crate::operators::DENSE_LIMIT_LOG2) {
        Backend::Dense
    } else {
        Backend::Lanczos
    }
}

/// The `k` smallest eigenpairs. The ground basis covers the whole ground
/// space (eigenvalues within `tol · max(1, ‖H‖)` of the minimum).
pub fn eigensolve_smallest(h: &Hamiltonian, k: usize, config: &SolverConfig) -> Result<SpectralReport> {
    if k == 0 {
        return Err(Error::Input("k must be positive".into()));
    }
    let backend = choose_backend(h, config);
    let (values, vectors, scale) = match backend {
        Backend::Dense => {
            let m = h.realize_dense()?;
            let e = dense::eigh(&m, true);
            let scale = e.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let tol = config.tol * scale.max(1.0);
            let lowest = e.values[0];
            let keep = e.values.iter().take_while(|&&v| v <= lowest + tol).count().max(k).min(e.values.len());
            let vecs = (0..keep).map(|i| e.vector(i)).collect::<Vec<_>>();
            (e.values[..keep].to_vec(), vecs, scale)
        }
        Backend::Lanczos => {
            let scale = h.norm_bound();
            let params = LanczosParams {
                krylov: 80.min(h.dim()),
                max_restarts: config.max_restarts,
                tol: config.tol,
                scale,
                seed: config.seed,
            };
            let apply = |v: &DVector<C64>| h.apply(v);
            let mut want = k;
            loop {
                let (vals, vecs) = lanczos_smallest(&apply, h.dim(), want, &params)?;
                let tol = config.tol * scale.max(1.0);
                let degenerate_tail = vals.len() == want && vals[want - 1] <= vals[0] + tol && want < h.dim();
                if degenerate_tail && want < 64 {
                    want += 1;
                    continue;
                }
                break (vals, vecs, scale);
            }
        }
    };
    let tol = config.tol * scale.max(1.0);
    let residuals: Vec<f64> =
        values.iter().zip(&vectors).map(|(&l, v)| (h.apply(v) - v * C64::new(l, 0.0)).norm()).collect();
    if let Some((i, r)) = residuals.iter().enumerate().find(|(_, &r)| r > 1e3 * tol) {
        return Err(Error::NonConvergence(format!("eigenpair {i} has residual {r:.3e}")));
    }
    let ground_degeneracy = values.iter().filter(|&&v| v <= values[0] + tol).count();
    let ground_basis = vectors[..ground_degeneracy].to_vec();
    let gap = (values.len() >= 2).then(|| values[1] - values[0]);
    let n = k.max(ground_degeneracy).min(values.len());
    Ok(SpectralReport {
        eigenvalues: values[..n].to_vec(),
        residuals: residuals[..n].to_vec(),
        gap,
        ground_degeneracy,
        tolerance: tol,
        backend,
        seed: config.seed,
        vectors: vectors[..n].to_vec(),
        ground_basis,
    })
}

/// All eigenvalues, ascending (dense backend only).
pub fn full_spectrum(h: &Hamiltonian) -> Result<Vec<f64>> {
    Ok(dense::eigenvalues(&h.realize_dense()?))
}

/// `λ₁ − λ₀` from ascending eigenvalues, or 0 when the lowest two agree
/// within `tol` (a degenerate ground space has no gap).
pub fn gap_from_values(values: &[f64], tol: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let g = values[1] - values[0];
    if g <= tol {
        0.0
    } else {
        g
    }
}

/// Spectral gap with an absolute degeneracy tolerance `tol`.
pub fn spectral_gap(h: &Hamiltonian, tol: f64, config: &SolverConfig) -> Result<f64> {
    if h.dim() < 2 {
        return Ok(0.0);
    }
    let report = eigensolve_smallest(h, 2, config)?;
    Ok(gap_from_values(&report.eigenvalues, tol))
}

/// Matrix of `H` in an orthonormal basis.
pub fn restrict(h: &Hamiltonian, basis: &[DVector<C64>]) -> Result<DMatrix<C64>> {
    let n = basis.len();
    for i in 0..n {
        if basis[i].len() != h.dim() {
            return Err(Error::LayoutMismatch("basis vector has the wrong length".into()));
        }
        for j in 0..n {
            let d = basis[i].dotc(&basis[j]) - C64::new(if i == j { 1.0 } else { 0.0 }, 0.0);
            if d.norm() > 1e-10 {
                return Err(Error::NotOrthonormal(d.norm()));
            }
        }
    }
    let images: Vec<DVector<C64>> = basis.iter().map(|b| h.apply(b)).collect();
    Ok(DMatrix::from_fn(n, n, |i, j| basis[i].dotc(&images[j])))
}

/// Full spectrum of a Hamiltonian that is block diagonal in the
/// computational basis of `sites`, assembled sector by sector.
pub fn sector_spectrum(h: &Hamiltonian, sites: &[usize]) -> Result<Vec<f64>> {
    let off = h.off_diagonal_on(sites);
    if off > 0.0 {
        return Err(Error::Input(format!("Hamiltonian mixes the pinned sites (entry {off:.3e})")));
    }
    let dims: Vec<usize> = sites.iter().map(|&s| h.layout().site_dim(s)).collect();
    let count: usize = dims.iter().product();
    let mut all = Vec::with_capacity(h.dim());
    for idx in 0..count {
        let digits = crate::operators::mixed_digits(idx, &dims);
        let fixed: Vec<(usize, usize)> = sites.iter().copied().zip(digits).collect();
        let block = h.realize_sector(&fixed)?;
        all.extend(dense::eigenvalues(&block));
    }
    all.sort_by(f64::total_cmp);
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::matrices::{c, pauli_x, pauli_z};
    use crate::operators::{LocalTerm, RegisterLayout};

    fn diag_h(values: &[f64]) -> Hamiltonian {
        let n = values.len().trailing_zeros() as usize;
        let l = RegisterLayout::qubits(&[("A", n)]).unwrap();
        let block = DMatrix::from_fn(values.len(), values.len(), |i, j| c(if i == j { values[i] } else { 0.0 }));
        Hamiltonian::with_terms(l, vec![LocalTerm::new((0..n).collect(), block, 1.0).unwrap()]).unwrap()
    }

    #[test]
    fn gap_of_diagonal() {
        let h = diag_h(&[0.0, 0.5, 2.0, 3.0]);
        assert!((spectral_gap(&h, 1e-9, &SolverConfig::default()).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_ground_has_no_gap() {
        let h = diag_h(&[0.0, 1e-14, 0.5, 0.7]);
        assert_eq!(spectral_gap(&h, 1e-9, &SolverConfig::default()).unwrap(), 0.0);
        let r = eigensolve_smallest(&h, 1, &SolverConfig::default()).unwrap();
        assert_eq!(r.ground_degeneracy, 2);
        assert_eq!(r.ground_basis.len(), 2);
    }

    #[test]
    fn lanczos_backend_agrees_with_dense() {
        let l = RegisterLayout::qubits(&[("A", 8)]).unwrap();
        let mut h = Hamiltonian::new(l);
        for i in 0..8 {
            h.push(LocalTerm::new(vec![i], pauli_x(), 0.3 + 0.1 * i as f64).unwrap()).unwrap();
            if i + 1 < 8 {
                h.push(LocalTerm::new(vec![i, i + 1], pauli_z().kronecker(&pauli_z()), -1.0).unwrap()).unwrap();
            }
        }
        let dense = eigensolve_smallest(&h, 3, &SolverConfig::default()).unwrap();
        let cfg = SolverConfig { dense_cutoff: 4, ..SolverConfig::default() };
        let lz = eigensolve_smallest(&h, 3, &cfg).unwrap();
        assert_eq!(lz.backend, Backend::Lanczos);
        for k in 0..3 {
            assert!((dense.eigenvalues[k] - lz.eigenvalues[k]).abs() < 1e-8);
        }
    }

    #[test]
    fn sector_spectrum_matches_full() {
        let l = RegisterLayout::qubits(&[("A", 2)]).unwrap();
        let mut h = Hamiltonian::new(l);
        h.push(
            LocalTerm::new(vec![0, 1], crate::operators::matrices::projector(2, 1).kronecker(&pauli_x()), 1.0).unwrap(),
        )
        .unwrap();
        h.push(LocalTerm::new(vec![0], pauli_z(), 0.25).unwrap()).unwrap();
        let full = full_spectrum(&h).unwrap();
        let sect = sector_spectrum(&h, &[0]).unwrap();
        for (a, b) in full.iter().zip(&sect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn restrict_rejects_non_orthonormal() {
        let h = diag_h(&[0.0, 1.0]);
        let v = DVector::from_element(2, c(1.0));
        assert!(restrict(&h, &[v]).is_err());
    }
}
