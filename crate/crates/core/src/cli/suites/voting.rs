//! Hierarchical-voting suite: exact advantage, bounds and Monte Carlo.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Deserialize;

use super::{Assertion, SuiteContext};
use crate::cli::io::MachineSpec;
use crate::queryham::{BitString, QueryStringClass};
use crate::voting::{compare_masses, exact_voting_distribution, simulate_voting, verify_delta_positive, VerifierModel};
use crate::{Error, Result};

const ANCHOR_DELTA: &str = "voting-advantage";
const ANCHOR_ACCEPT: &str = "voting-acceptance";
const ANCHOR_PARTITION: &str = "voting-divergence-partition";
const ANCHOR_MC: &str = "voting-sampling";

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VotingCase {
    pub machine: MachineSpec,
    pub p_amp: u32,
    /// Acceptance probabilities of invalid queries, by prefix.
    #[serde(default)]
    pub invalid_p: BTreeMap<String, f64>,
    /// Rounds; defaults to `2^m`.
    #[serde(default)]
    pub n_c: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VotingConfig {
    pub machines: Vec<VotingCase>,
    pub epsilon: f64,
    pub trials: u64,
    pub k_sigma: f64,
    #[serde(default)]
    pub seed: Option<u64>,
}

pub fn voting(cfg: &VotingConfig, ctx: &SuiteContext) -> Result<Vec<Assertion>> {
    let seed = cfg.seed.unwrap_or(ctx.seed);
    let mut out = Vec::new();
    for case in &cfg.machines {
        let mach = case.machine.build(cfg.epsilon)?;
        let label = format!("{}/p={}", case.machine.label(), case.p_amp);
        let invalid =
            case.invalid_p.iter().map(|(p, &v)| Ok((BitString::parse(p)?, v))).collect::<Result<BTreeMap<_, _>>>()?;
        let verifier = VerifierModel::canonical(&mach, case.p_amp, &invalid)?;
        let n_c = case.n_c.unwrap_or(1 << mach.m());
        let report = verify_delta_positive(&mach, &verifier, n_c)?;
        for c in &report.checks {
            out.push(Assertion {
                id: format!("voting/{label}/{}", c.name),
                anchor: ANCHOR_DELTA.into(),
                passed: c.passed,
                measured: c.value,
                bound: c.bound,
                margin: c.margin,
                detail: format!(
                    "exact value {} bound{}{}",
                    c.relation,
                    if c.note.is_empty() { "" } else { "; " },
                    c.note
                ),
            });
        }
        let p = &report.partition;
        let zeta_ok = p.steps.iter().all(|s| s.zeta_nonnegative);
        out.push(Assertion::holds(
            format!("voting/{label}/partition"),
            ANCHOR_PARTITION,
            p.covers_incorrect && p.telescopes && zeta_ok,
            format!(
                "{} steps, covers incorrect strings: {}, telescopes: {}, all ζ ≥ 0: {}",
                p.steps.len(),
                p.covers_incorrect,
                p.telescopes,
                zeta_ok
            ),
        ));

        let exact = exact_voting_distribution(&mach, &verifier, n_c)?;
        let outs: Vec<bool> = mach.correct_strings().iter().map(|y| mach.output(y)).collect();
        if let Some(&acc) = outs.first().filter(|_| outs.iter().all(|&o| o == outs[0])) {
            // Non-correct strings that share the correct output add to the
            // accept side, so the relation is an inequality in general.
            let half = BigRational::new(1.into(), 2.into());
            let one = BigRational::one();
            let target = if acc { (&one + &exact.delta) * &half } else { (&one - &exact.delta) * &half };
            let tight = BitString::all(mach.m())
                .filter(|y| mach.classify(y) != QueryStringClass::Correct)
                .all(|y| mach.output(&y) != acc);
            let holds = if acc { exact.accept >= target } else { exact.accept <= target };
            let equal = exact.accept == target;
            let diff = (&exact.accept - &target).to_f64().unwrap_or(f64::NAN);
            out.push(Assertion {
                id: format!("voting/{label}/accept"),
                anchor: ANCHOR_ACCEPT.into(),
                passed: holds && (!tight || equal),
                measured: exact.accept.to_f64().unwrap_or(f64::NAN),
                bound: target.to_f64().unwrap_or(f64::NAN),
                margin: if acc { diff } else { -diff },
                detail: format!(
                    "exact accept {} (1{}Δ)/2{}",
                    if equal {
                        "="
                    } else if acc {
                        "≥"
                    } else {
                        "≤"
                    },
                    if acc { "+" } else { "−" },
                    if tight { ", equality required" } else { "" }
                ),
            });
        }

        if cfg.trials > 0 {
            let emp = simulate_voting(&mach, &verifier, n_c, cfg.trials, seed)?;
            let cmp = compare_masses(&exact, &emp, cfg.k_sigma);
            let worst = cmp
                .iter()
                .map(|c| {
                    if c.sigma > 0.0 {
                        (c.empirical - c.exact).abs() / c.sigma
                    } else if c.empirical == c.exact {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                })
                .fold(0.0f64, f64::max);
            let bad: Vec<&str> = cmp.iter().filter(|c| !c.within).map(|c| c.label.as_str()).collect();
            let mut a = Assertion::at_most(
                format!("voting/{label}/monte-carlo"),
                ANCHOR_MC,
                worst,
                cfg.k_sigma,
                0.0,
                if bad.is_empty() {
                    format!("{} trials, largest deviation in σ units", cfg.trials)
                } else {
                    format!("{} trials; outside {}σ: {}", cfg.trials, cfg.k_sigma, bad.join(", "))
                },
            );
            a.passed = bad.is_empty();
            out.push(a);
        }
    }
    if out.is_empty() {
        return Err(Error::Input("voting config lists no machines".into()));
    }
    Ok(out)
}
