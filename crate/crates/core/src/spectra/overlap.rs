//! Overlap of low-energy states with the null space of a gapped penalty.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::dense::eigh;
use crate::{Error, Result, C64};

/// Lower bound on `‖Π_S ψ‖²` for any `ψ` with `⟨ψ|H₁+H₂|ψ⟩ ≤ λ(H₁+H₂) + δ`,
/// where `H₁ ≥ 0` has null space `S` and gap at least `J`, and
/// `‖H₂‖ ≤ K`. Requires `J > 2K`.
pub fn projection_overlap_bound(k: f64, j: f64, delta: f64) -> Result<f64> {
    if !(j > 2.0 * k) || k < 0.0 || delta < 0.0 {
        return Err(Error::Input(format!("need J > 2K ≥ 0 and δ ≥ 0 (K={k}, J={j}, δ={delta})")));
    }
    let denom = j - 2.0 * k;
    let ratio = (k + (k * k + delta * denom).sqrt()) / denom;
    Ok(1.0 - ratio * ratio)
}

/// Smallest `‖Π ψ‖²` over the ground state of `h` and `samples` random
/// states whose energy is within `delta` of the ground energy.
pub fn sample_low_energy_overlap<R: Rng>(
    h: &DMatrix<C64>,
    projector: &DMatrix<C64>,
    delta: f64,
    samples: usize,
    rng: &mut R,
) -> f64 {
    let e = eigh(h, true);
    let lambda = e.values[0];
    let n = e.values.len();
    let overlap = |v: &DVector<C64>| v.dotc(&(projector * v)).re / v.norm_squared();
    let mut worst = overlap(&e.vector(0));
    for _ in 0..samples {
        // Random amplitudes on the eigenbasis, with the excited weight scaled
        // so the energy excess is a random fraction of δ.
        let mut coeffs: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let ground_w: f64 =
            coeffs.iter().zip(&e.values).filter(|(_, &v)| v - lambda <= 1e-12).map(|(c, _)| c.norm_sqr()).sum();
        let excess: f64 = coeffs.iter().zip(&e.values).map(|(c, &v)| c.norm_sqr() * (v - lambda)).sum();
        let target = delta * rng.random::<f64>();
        let total: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if excess > target * total && excess > 0.0 {
            // Solve for s with s²·excess = target·(ground_w + s²·(total − ground_w)).
            let excited_w = total - ground_w;
            let denom = excess - target * excited_w;
            let s2 = if denom > 0.0 { target * ground_w / denom } else { 1.0 };
            let s = s2.max(0.0).sqrt();
            for (c, &v) in coeffs.iter_mut().zip(&e.values) {
                if v - lambda > 1e-12 {
                    *c *= s;
                }
            }
        }
        let mut psi = DVector::zeros(n);
        for (k, c) in coeffs.iter().enumerate() {
            psi += e.vector(k) * *c;
        }
        if psi.norm() > 0.0 {
            worst = worst.min(overlap(&psi));
        }
    }
    worst
}

/// Random `(H₁, H₂)` pair with `H₁ ≥ 0`, null space `S` of dimension
/// `kernel_dim`, gap at least `j ∈ [1, 3)`, and `‖H₂‖ = k ∈ [0.05j, 0.3j)`.
#[derive(Clone, Debug)]
pub struct OverlapInstance {
    pub h1: DMatrix<C64>,
    pub h2: DMatrix<C64>,
    /// Projector onto `S`.
    pub projector: DMatrix<C64>,
    pub j: f64,
    pub k: f64,
}

pub fn random_overlap_instance<R: Rng>(dim: usize, kernel_dim: usize, rng: &mut R) -> OverlapInstance {
    assert!(0 < kernel_dim && kernel_dim < dim);
    let u = crate::kitaev::random::random_unitary(dim, rng);
    let j = 1.0 + 2.0 * rng.random::<f64>();
    let diag: Vec<f64> = (0..dim).map(|i| if i < kernel_dim { 0.0 } else { j + rng.random::<f64>() }).collect();
    let d = DMatrix::from_fn(dim, dim, |a, b| C64::new(if a == b { diag[a] } else { 0.0 }, 0.0));
    let h1 = &u * d * u.adjoint();
    let p = DMatrix::from_fn(dim, dim, |a, b| C64::new(if a == b && a < kernel_dim { 1.0 } else { 0.0 }, 0.0));
    let projector = &u * p * u.adjoint();
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let herm = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    let norm = eigh(&herm, false).values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let k = j * (0.05 + 0.25 * rng.random::<f64>());
    let h2 = herm * C64::new(k / norm, 0.0);
    OverlapInstance { h1, h2, projector, j, k }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_reduces_to_delta_over_j_without_perturbation() {
        let b = projection_overlap_bound(0.0, 4.0, 1.0).unwrap();
        assert!((b - 0.75).abs() < 1e-15);
    }

    #[test]
    fn rejects_small_gap() {
        assert!(projection_overlap_bound(1.0, 2.0, 0.1).is_err());
    }
}
