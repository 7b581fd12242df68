//! Query-Hamiltonian suites and the projection-overlap bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use super::{one, Assertion, SuiteContext};
use crate::cli::io::MachineSpec;
use crate::operators::{Hamiltonian, LocalTerm, RegisterLayout};
use crate::queryham::{
    build_query_hamiltonian_with, verify_block_separation, BlockClass, QueryEncoding, QueryOptions, SEPARATION_SLACK,
};
use crate::spectra::{
    min_observable_over_low_energy, projection_overlap_bound, random_overlap_instance, sample_low_energy_overlap,
};
use crate::Result;

const ANCHOR_SEPARATION: &str = "query-block-separation";
const ANCHOR_UNARY: &str = "unary-encoding-penalty";
const ANCHOR_OVERLAP: &str = "projection-overlap-bound";
const OVERLAP_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparationConfig {
    pub machines: Vec<MachineSpec>,
    pub epsilon: f64,
    pub encodings: Vec<QueryEncoding>,
    /// The Hamiltonian is built at `ε·hamiltonian_epsilon_scale` while the
    /// machine and the required margin use `ε`.
    #[serde(default = "one")]
    pub hamiltonian_epsilon_scale: f64,
}

fn separation_assertion(id: String, anchor: &str, report: &crate::queryham::SeparationReport) -> Assertion {
    let detail = if report.offending.is_empty() {
        format!("λ={:.6e}, {} blocks", report.lambda, report.blocks.len())
    } else {
        format!("offending: {}", report.offending.join("; "))
    };
    let mut a = Assertion::at_least(id, anchor, report.worst_margin, report.required_margin, SEPARATION_SLACK, detail);
    a.passed = report.passed;
    a
}

pub fn separation(cfg: &SeparationConfig) -> Result<Vec<Assertion>> {
    let mut out = Vec::new();
    for spec in &cfg.machines {
        let mach = spec.build(cfg.epsilon)?;
        let eps = mach.epsilon();
        for &enc in &cfg.encodings {
            let opts = QueryOptions { encoding: enc, ..QueryOptions::binary() };
            let qh = build_query_hamiltonian_with(&mach, eps * cfg.hamiltonian_epsilon_scale, &opts)?;
            let report = verify_block_separation(&qh, &mach, eps)?;
            out.push(separation_assertion(
                format!("lemma4/{}/{enc:?}", spec.label()).to_lowercase(),
                ANCHOR_SEPARATION,
                &report,
            ));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnarySeparationConfig {
    pub machines: Vec<MachineSpec>,
    pub epsilon: f64,
    /// Multiplier on the unary stabiliser weight.
    #[serde(default = "one")]
    pub stab_scale: f64,
}

pub fn unary_separation(cfg: &UnarySeparationConfig) -> Result<Vec<Assertion>> {
    let mut out = Vec::new();
    for spec in &cfg.machines {
        let mach = spec.build(cfg.epsilon)?;
        let eps = mach.epsilon();
        let opts = QueryOptions { stab_scale: cfg.stab_scale, ..QueryOptions::unary() };
        let qh = build_query_hamiltonian_with(&mach, eps, &opts)?;
        let report = verify_block_separation(&qh, &mach, eps)?;
        let label = spec.label();
        out.push(separation_assertion(format!("lemma5/{label}/separation"), ANCHOR_SEPARATION, &report));

        let invalid = report.blocks.iter().filter(|b| b.class == BlockClass::InvalidPattern);
        let (worst, pattern) = invalid
            .map(|b| (b.excess, b.pattern.clone()))
            .fold((f64::INFINITY, String::new()), |acc, x| if x.0 < acc.0 { x } else { acc });
        if worst.is_finite() {
            out.push(Assertion::at_least(
                format!("lemma5/{label}/invalid-patterns"),
                ANCHOR_UNARY,
                worst,
                report.required_margin,
                SEPARATION_SLACK,
                format!("lowest invalid pattern {pattern}"),
            ));
        }
        // The all-zero string costs Σ_d 2ε/4^d < 8ε/3, so λ(H′) is below that.
        out.push(Assertion::at_most(
            format!("lemma5/{label}/ground-ceiling"),
            ANCHOR_UNARY,
            report.lambda,
            8.0 * eps / 3.0,
            SEPARATION_SLACK,
            "λ(H′) against the all-zero string's energy ceiling".into(),
        ));
    }
    Ok(out)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlapConfig {
    pub instances: usize,
    pub min_qubits: usize,
    pub max_qubits: usize,
    /// Random feasible states per instance.
    pub samples: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    /// The bound is evaluated with `J·claimed_j_scale`.
    #[serde(default = "one")]
    pub claimed_j_scale: f64,
}

pub fn overlap(cfg: &OverlapConfig, ctx: &SuiteContext) -> Result<Vec<Assertion>> {
    if cfg.min_qubits < 1 || cfg.min_qubits > cfg.max_qubits || cfg.max_qubits > 6 {
        return Err(crate::Error::Input("corollary1 needs 1 ≤ min_qubits ≤ max_qubits ≤ 6".into()));
    }
    let seed = cfg.seed.unwrap_or(ctx.seed);
    let results: Vec<Result<Vec<Assertion>>> = (0..cfg.instances)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let n = rng.random_range(cfg.min_qubits..=cfg.max_qubits);
            let dim = 1usize << n;
            let kernel = rng.random_range(1..=dim / 2);
            let inst = random_overlap_instance(dim, kernel, &mut rng);
            let delta = 0.5 * (inst.j - 2.0 * inst.k) * rng.random::<f64>();
            let claimed_j = inst.j * cfg.claimed_j_scale;
            let bound = projection_overlap_bound(inst.k, claimed_j, delta)?;
            let h = &inst.h1 + &inst.h2;

            let layout = RegisterLayout::qubits(&[("A", n)])?;
            let sites: Vec<usize> = (0..n).collect();
            let ham = Hamiltonian::with_terms(layout.clone(), vec![LocalTerm::new(sites.clone(), h.clone(), 1.0)?])?;
            let proj = Hamiltonian::with_terms(layout, vec![LocalTerm::new(sites, inst.projector.clone(), 1.0)?])?;
            let lambda = crate::spectra::dense::min_eigenvalue(&h);
            let certified = min_observable_over_low_energy(&ham, &proj, lambda + delta, &ctx.solver)?;
            let sampled = sample_low_energy_overlap(&h, &inst.projector, delta, cfg.samples, &mut rng);
            let info = format!("dim={dim} dim S={kernel} J={:.4} K={:.4} δ={delta:.4e}", inst.j, inst.k);
            Ok(vec![
                Assertion::at_least(
                    format!("corollary1/instance{i}/certified"),
                    ANCHOR_OVERLAP,
                    certified.value,
                    bound,
                    OVERLAP_SLACK,
                    format!("{info}; dual lower bound on min ‖Π_S ψ‖² over the δ-window"),
                ),
                Assertion::at_least(
                    format!("corollary1/instance{i}/sampled"),
                    ANCHOR_OVERLAP,
                    sampled,
                    bound,
                    OVERLAP_SLACK,
                    format!("{info}; minimum over the ground state and {} sampled feasible states", cfg.samples),
                ),
            ])
        })
        .collect();
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}
