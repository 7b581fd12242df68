//! Restarted Lanczos with full reorthogonalisation and locking.
//!
//! Converged Ritz pairs are locked and projected out of every later Krylov
//! space, so degenerate eigenvalues are found one copy at a time.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Error, Result, C64};

/// Parameters of the restarted iteration.
#[derive(Clone, Debug)]
pub struct LanczosParams {
    /// Krylov dimension per restart.
    pub krylov: usize,
    pub max_restarts: usize,
    /// Residual threshold `‖Hv − θv‖ ≤ tol · scale`.
    pub tol: f64,
    /// Norm scale used in the residual threshold.
    pub scale: f64,
    pub seed: u64,
}

/// Smallest `k` eigenpairs of the Hermitian operator `apply` on `C^dim`.
pub fn lanczos_smallest(
    apply: &dyn Fn(&DVector<C64>) -> DVector<C64>,
    dim: usize,
    k: usize,
    params: &LanczosParams,
) -> Result<(Vec<f64>, Vec<DVector<C64>>)> {
    let k = k.min(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut locked: Vec<DVector<C64>> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let threshold = params.tol * params.scale.max(1.0);
    let mut start = random_vector(dim, &mut rng);
    let mut restarts = 0;
    while locked.len() < k {
        let m = params.krylov.min(dim - locked.len()).max(1);
        let (basis, alpha, beta) = krylov(apply, &start, m, &locked, &mut rng);
        let steps = alpha.len();
        let t = DMatrix::from_fn(steps, steps, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = t.symmetric_eigen();
        let mut order: Vec<usize> = (0..steps).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let ritz = |idx: usize| -> DVector<C64> {
            let mut y = DVector::zeros(dim);
            for (q, v) in basis.iter().enumerate() {
                y += v * C64::new(eig.eigenvectors[(q, idx)], 0.0);
            }
            let n = y.norm();
            y / C64::new(n, 0.0)
        };
        let mut progressed = false;
        // Only the lowest Ritz pair is locked per pass: a Krylov space built from
        // one start vector holds a single copy of each degenerate eigenvalue.
        for &idx in order.iter().take(1) {
            let theta = eig.eigenvalues[idx];
            let mut y = ritz(idx);
            orthogonalize(&mut y, &locked);
            let n = y.norm();
            if n < 0.5 {
                break;
            }
            y /= C64::new(n, 0.0);
            let r = (apply(&y) - &y * C64::new(theta, 0.0)).norm();
            if r <= threshold {
                locked.push(y);
                values.push(theta);
                progressed = true;
            } else {
                break;
            }
        }
        if locked.len() >= k {
            break;
        }
        if !progressed {
            restarts += 1;
        }
        if restarts > params.max_restarts {
            return Err(Error::NonConvergence(format!(
                "Lanczos locked {} of {k} eigenpairs after {} restarts",
                locked.len(),
                params.max_restarts
            )));
        }
        start = if progressed {
            let next = order.get(1).copied().unwrap_or(order[0]);
            random_vector(dim, &mut rng) * C64::new(0.1, 0.0) + ritz(next)
        } else {
            ritz(order[0])
        };
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    Ok((order.iter().map(|&i| values[i]).collect(), order.iter().map(|&i| locked[i].clone()).collect()))
}

type Krylov = (Vec<DVector<C64>>, Vec<f64>, Vec<f64>);

fn krylov(
    apply: &dyn Fn(&DVector<C64>) -> DVector<C64>,
    start: &DVector<C64>,
    m: usize,
    locked: &[DVector<C64>],
    rng: &mut ChaCha8Rng,
) -> Krylov {
    let dim = start.len();
    let mut v = start.clone();
    orthogonalize(&mut v, locked);
    if v.norm() < 1e-8 {
        v = random_vector(dim, rng);
        orthogonalize(&mut v, locked);
    }
    let n = v.norm();
    v /= C64::new(n, 0.0);
    let mut basis = vec![v];
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    for j in 0..m {
        let mut w = apply(&basis[j]);
        let a = basis[j].dotc(&w).re;
        alpha.push(a);
        orthogonalize(&mut w, locked);
        orthogonalize(&mut w, &basis);
        orthogonalize(&mut w, locked);
        orthogonalize(&mut w, &basis);
        let b = w.norm();
        if j + 1 == m || b < 1e-12 {
            break;
        }
        beta.push(b);
        basis.push(w / C64::new(b, 0.0));
    }
    (basis, alpha, beta)
}

fn orthogonalize(w: &mut DVector<C64>, against: &[DVector<C64>]) {
    for q in against {
        let p = q.dotc(w);
        *w -= q * p;
    }
}

fn random_vector(dim: usize, rng: &mut ChaCha8Rng) -> DVector<C64> {
    let v = DVector::from_fn(dim, |_, _| C64::new(StandardNormal.sample(&mut *rng), StandardNormal.sample(&mut *rng)));
    let n = v.norm();
    v / C64::new(n, 0.0)
}
