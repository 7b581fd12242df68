//! Minimum of an observable over states of bounded energy.
//!
//! The value reported is the Lagrange dual
//! `sup_{μ≥0} λ_min(A + μ(H − λI)) − μ(cutoff − λ)`, which never exceeds
//! the true minimum. A feasible primal state gives an upper bound, so the
//! true value is bracketed.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::dense::{eigenvalues, eigh};
use super::SolverConfig;
use crate::operators::{Hamiltonian, Observable};
use crate::{Error, Result, C64};

const GOLDEN_ITERATIONS: usize = 200;

#[derive(Clone, Debug, Serialize)]
pub struct LowEnergyMin {
    /// Certified lower bound on `min ⟨ψ|A|ψ⟩` subject to `⟨ψ|H|ψ⟩ ≤ cutoff`.
    pub value: f64,
    /// Best feasible `⟨ψ|A|ψ⟩` found; an upper bound on the minimum.
    pub primal: f64,
    pub mu: f64,
    pub ground_energy: f64,
    /// Whether the exact ground-space restriction was used.
    pub ground_space_only: bool,
    #[serde(skip)]
    pub witness: DVector<C64>,
}

/// Minimises `⟨ψ|A|ψ⟩` over unit `ψ` with `⟨ψ|H|ψ⟩ ≤ cutoff`.
pub fn min_observable_over_low_energy(
    h: &Hamiltonian,
    a: &Observable,
    cutoff: f64,
    config: &SolverConfig,
) -> Result<LowEnergyMin> {
    if h.layout() != a.layout() {
        return Err(Error::LayoutMismatch("Hamiltonian and observable layouts differ".into()));
    }
    let hm = h.realize_dense()?;
    let am = a.realize_dense()?;
    let he = eigh(&hm, true);
    let lambda = he.values[0];
    let h_scale = he.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let tol = config.tol * h_scale;
    if cutoff < lambda - tol {
        return Err(Error::Input(format!("cutoff {cutoff} lies below the ground energy {lambda}")));
    }
    let n = hm.nrows();
    let shifted = &hm - DMatrix::<C64>::identity(n, n) * C64::new(lambda, 0.0);
    let slack = cutoff - lambda;

    if slack <= tol {
        let g = he.values.iter().take_while(|&&v| v <= lambda + tol).count();
        let basis = he.vectors.as_ref().unwrap().columns(0, g).into_owned();
        let restricted = basis.adjoint() * &am * &basis;
        let re = eigh(&restricted, true);
        let witness = &basis * re.vector(0);
        return Ok(LowEnergyMin {
            value: re.values[0],
            primal: re.values[0],
            mu: 0.0,
            ground_energy: lambda,
            ground_space_only: true,
            witness,
        });
    }

    let a_norm = eigenvalues(&am).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mu_max = 2.0 * a_norm / slack.max(1e-12);
    let dual = |mu: f64| -> f64 {
        let m = &am + &shifted * C64::new(mu, 0.0);
        eigenvalues(&m)[0] - mu * slack
    };
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (0.0f64, mu_max);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = dual(x1);
    let mut f2 = dual(x2);
    let mut best = (0.0, dual(0.0));
    for (x, f) in [(x1, f1), (x2, f2), (mu_max, dual(mu_max))] {
        if f > best.1 {
            best = (x, f);
        }
    }
    for _ in 0..GOLDEN_ITERATIONS {
        if hi - lo <= 1e-14 * (1.0 + mu_max) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = dual(x2);
            if f2 > best.1 {
                best = (x2, f2);
            }
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = dual(x1);
            if f1 > best.1 {
                best = (x1, f1);
            }
        }
    }
    let (mu, value) = best;

    // Feasible primal candidates: minimisers at the bracket ends, the ground
    // state, and the best feasible mixture of the two bracket minimisers.
    let minimiser = |mu: f64| eigh(&(&am + &shifted * C64::new(mu, 0.0)), true).vector(0);
    let energy = |v: &DVector<C64>| v.dotc(&(&shifted * v)).re;
    let obs = |v: &DVector<C64>| v.dotc(&(&am * v)).re;
    let v_lo = minimiser(lo.min(mu));
    let v_hi = minimiser(hi.max(mu));
    let ground = he.vector(0);
    let mut primal = obs(&ground);
    let mut witness = ground.clone();
    for v in [&v_lo, &v_hi] {
        if energy(v) <= slack + tol && obs(v) < primal {
            primal = obs(v);
            witness = v.clone();
        }
    }
    for (u, w) in [(&v_lo, &v_hi), (&v_lo, &ground), (&v_hi, &ground)] {
        if let Some((val, v)) = best_feasible_mixture(u, w, &am, &shifted, slack + tol) {
            if val < primal {
                primal = val;
                witness = v;
            }
        }
    }
    Ok(LowEnergyMin { value: value.min(primal), primal, mu, ground_energy: lambda, ground_space_only: false, witness })
}

/// Scans `cos θ u + e^{iφ} sin θ w` for the smallest `A` value with shifted
/// energy at most `slack`.
fn best_feasible_mixture(
    u: &DVector<C64>,
    w: &DVector<C64>,
    a: &DMatrix<C64>,
    shifted: &DMatrix<C64>,
    slack: f64,
) -> Option<(f64, DVector<C64>)> {
    let mut best: Option<(f64, DVector<C64>)> = None;
    let (au, aw) = (a * u, a * w);
    let (hu, hw) = (shifted * u, shifted * w);
    let form = |x: &DVector<C64>, y: &DVector<C64>| x.dotc(y);
    let (a_uu, a_ww, a_uw) = (form(u, &au).re, form(w, &aw).re, form(u, &aw));
    let (h_uu, h_ww, h_uw) = (form(u, &hu).re, form(w, &hw).re, form(u, &hw));
    let overlap = form(u, w);
    for ti in 0..=128 {
        let theta = std::f64::consts::FRAC_PI_2 * ti as f64 / 128.0;
        let (c, s) = (theta.cos(), theta.sin());
        for pi in 0..16 {
            let phase = C64::from_polar(1.0, std::f64::consts::TAU * pi as f64 / 16.0);
            let norm2 = c * c + s * s + 2.0 * c * s * (overlap * phase).re;
            if norm2 < 1e-12 {
                continue;
            }
            let e = (c * c * h_uu + s * s * h_ww + 2.0 * c * s * (h_uw * phase).re) / norm2;
            if e > slack {
                continue;
            }
            let val = (c * c * a_uu + s * s * a_ww + 2.0 * c * s * (a_uw * phase).re) / norm2;
            if best.as_ref().is_none_or(|(b, _)| val < *b) {
                let v = (u * C64::new(c, 0.0) + w * (phase * s)) / C64::new(norm2.sqrt(), 0.0);
                best = Some((val, v));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::matrices::{pauli_x, pauli_z};
    use crate::operators::{LocalTerm, RegisterLayout};

    fn single(op: DMatrix<C64>) -> Hamiltonian {
        let l = RegisterLayout::qubits(&[("A", 1)]).unwrap();
        Hamiltonian::with_terms(l, vec![LocalTerm::new(vec![0], op, 1.0).unwrap()]).unwrap()
    }

    #[test]
    fn cutoff_at_ground_energy_restricts_to_ground_space() {
        let r = min_observable_over_low_energy(&single(pauli_z()), &single(pauli_x()), -1.0, &SolverConfig::default())
            .unwrap();
        assert!(r.ground_space_only);
        assert!(r.value.abs() < 1e-12);
    }

    #[test]
    fn generous_cutoff_reaches_global_minimum() {
        let r = min_observable_over_low_energy(&single(pauli_z()), &single(pauli_x()), 1.0, &SolverConfig::default())
            .unwrap();
        assert!((r.value + 1.0).abs() < 1e-8);
        assert!((r.primal + 1.0).abs() < 1e-8);
    }

    #[test]
    fn intermediate_cutoff_matches_bloch_oracle() {
        // ⟨Z⟩ = cos t ≤ c and ⟨X⟩ = sin t on the Bloch circle: min ⟨X⟩ = −√(1 − c²) for |c| ≤ 1.
        let cut = -0.6;
        let r = min_observable_over_low_energy(&single(pauli_z()), &single(pauli_x()), cut, &SolverConfig::default())
            .unwrap();
        let oracle = -(1.0f64 - cut * cut).sqrt();
        assert!(r.value <= oracle + 1e-9);
        assert!((r.value - oracle).abs() < 1e-6);
        assert!((r.primal - oracle).abs() < 1e-3);
    }
}
