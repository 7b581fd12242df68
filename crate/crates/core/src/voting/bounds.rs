//! Closed-form lower bounds on the voting advantage and their exact checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::distribution::{exact_voting_distribution, ExactOutcome};
use super::model::{pow2_inv, VerifierModel};
use crate::queryham::{BitString, QueryMachine, QueryStringClass, Validity};
use crate::Result;

fn int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `(2^{-q})^{(n_c−1)}·2^{-Mm}` with `q = (M+2)m`.
fn prefactor(proof_qubits: u64, m: u64, n_c: u64) -> BigRational {
    let q = (proof_qubits + 2) * m;
    pow2_inv(q * (n_c - 1) + proof_qubits * m)
}

/// `(2^{-q})^{(n_c−1)}·2^{-Mm}·[1 − 2^{-m} − m/2^p] − 2^m/2^p`, exactly.
pub fn delta_lower_bound_exact(proof_qubits: u64, m: u64, p_amp: u64, n_c: u64) -> BigRational {
    let bracket = BigRational::one() - pow2_inv(m) - int(m) * pow2_inv(p_amp);
    prefactor(proof_qubits, m, n_c) * bracket - int(1 << m) * pow2_inv(p_amp)
}

/// Floating-point value of [`delta_lower_bound_exact`].
pub fn delta_lower_bound(proof_qubits: u64, m: u64, p_amp: u64, n_c: u64) -> f64 {
    delta_lower_bound_exact(proof_qubits, m, p_amp, n_c).to_f64().unwrap_or(0.0)
}

/// `(2^{-q})^{(n_c−1)}·2^{-Mm}·[1 − 2^{-m} − m/(2^p − 1)]`: lower bound on
/// `Pr[A] − Pr[B]`.
pub fn incorrect_margin_bound(proof_qubits: u64, m: u64, p_amp: u64, n_c: u64) -> BigRational {
    let denom = (BigRational::one() / pow2_inv(p_amp)) - BigRational::one();
    let bracket = BigRational::one() - pow2_inv(m) - int(m) / denom;
    prefactor(proof_qubits, m, n_c) * bracket
}

/// One iteration of the partition of `B` driven by correct strings.
#[derive(Clone, Debug, Serialize)]
pub struct PartitionStep {
    pub chosen: String,
    /// Branch index `k` (1-based) where `chosen` leaves the previous choice.
    pub branch: Option<usize>,
    /// Bounded divergence probability `q_i*` (1 on the first step).
    pub bounded_divergence: f64,
    pub divergence: f64,
    pub assigned: Vec<String>,
    /// `Pr[Y = chosen] − Pr[Y ∈ assigned]`.
    pub zeta: f64,
    pub zeta_nonnegative: bool,
    /// `ζ_i` against `q_i*` times [`incorrect_margin_bound`], when applicable.
    pub zeta_meets_bound: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionReport {
    pub steps: Vec<PartitionStep>,
    /// Every incorrect string was assigned exactly once.
    pub covers_incorrect: bool,
    /// Sum of `ζ_i` equals `Pr[chosen] − Pr[B]`.
    pub telescopes: bool,
}

/// `∏ p_{y,t}` over invalid positions `t < upto` on `y`'s path.
fn divergence(machine: &QueryMachine, verifier: &VerifierModel, y: &BitString, upto: usize) -> BigRational {
    let mut p = BigRational::one();
    for t in machine.invalid_positions(y).into_iter().filter(|&t| t < upto) {
        let acc = verifier.probability(&y.prefix(t));
        p *= if y.bit(t) == 1 { acc.clone() } else { BigRational::one() - acc };
    }
    p
}

/// Largest divergence probability; ties go to the lexicographically largest.
fn pick<'a>(machine: &QueryMachine, verifier: &VerifierModel, set: &[&'a BitString]) -> (&'a BitString, BigRational) {
    let mut best: Option<(&BitString, BigRational)> = None;
    for &y in set {
        let d = divergence(machine, verifier, y, machine.m());
        let better = match &best {
            None => true,
            Some((b, bd)) => d > *bd || (d == *bd && y > *b),
        };
        if better {
            best = Some((y, d));
        }
    }
    best.unwrap()
}

/// Builds the sequence `y₁*, y₂*, …` of correct strings and the matching
/// blocks of incorrect strings, and evaluates each `ζ_i`.
pub fn divergence_partition(
    machine: &QueryMachine,
    verifier: &VerifierModel,
    exact: &ExactOutcome,
    per_step_bound: Option<&BigRational>,
) -> PartitionReport {
    let m = machine.m();
    let correct: Vec<BitString> = machine.correct_strings();
    let incorrect: Vec<BitString> =
        BitString::all(m).filter(|y| machine.classify(y) == QueryStringClass::Incorrect).collect();
    let mass = |y: &BitString| exact.distribution[y].clone();
    let mut steps = Vec::new();
    let mut assigned_count = vec![0usize; 1 << m];
    let mut zeta_sum = BigRational::zero();
    let mut chosen_mass = BigRational::zero();

    let all: Vec<&BitString> = correct.iter().collect();
    let (mut prev, mut d) = pick(machine, verifier, &all);
    let mut q_star = BigRational::one();
    let mut branch = None;
    let mut lower = None::<usize>;
    loop {
        let upper = prev.value();
        let block: Vec<&BitString> =
            incorrect.iter().filter(|y| lower.is_none_or(|l| y.value() > l) && y.value() < upper).collect();
        for y in &block {
            assigned_count[y.value()] += 1;
        }
        let block_mass: BigRational = block.iter().map(|y| mass(y)).fold(BigRational::zero(), |a, b| a + b);
        let zeta = mass(prev) - &block_mass;
        zeta_sum += &zeta;
        chosen_mass += mass(prev);
        let meets = per_step_bound.map(|b| zeta >= b * &q_star);
        steps.push(PartitionStep {
            chosen: prev.to_string(),
            branch,
            bounded_divergence: q_star.to_f64().unwrap_or(0.0),
            divergence: d.to_f64().unwrap_or(0.0),
            assigned: block.iter().map(|y| y.to_string()).collect(),
            zeta: zeta.to_f64().unwrap_or(0.0),
            zeta_nonnegative: !zeta.is_negative(),
            zeta_meets_bound: meets,
        });

        // Correct strings above the previous choice, grouped by the first
        // bit where they leave it.
        let above: Vec<&BitString> = correct.iter().filter(|y| y.value() > prev.value()).collect();
        if above.is_empty() {
            break;
        }
        let mut best_k: Option<(usize, BigRational)> = None;
        for k in 1..=m {
            let rep = above.iter().find(|y| y.prefix(k - 1) == prev.prefix(k - 1) && y.bit(k - 1) != prev.bit(k - 1));
            if let Some(z) = rep {
                let qk = divergence(machine, verifier, z, k);
                if best_k.as_ref().is_none_or(|(_, b)| qk > *b) {
                    best_k = Some((k, qk));
                }
            }
        }
        let (k, qk) = best_k.unwrap();
        let s_k: Vec<&BitString> = above
            .iter()
            .copied()
            .filter(|y| y.prefix(k - 1) == prev.prefix(k - 1) && y.bit(k - 1) != prev.bit(k - 1))
            .collect();
        lower = Some(prev.value());
        let (next, nd) = pick(machine, verifier, &s_k);
        prev = next;
        d = nd;
        q_star = qk;
        branch = Some(k);
    }

    let total_b: BigRational = incorrect.iter().map(mass).fold(BigRational::zero(), |a, b| a + b);
    PartitionReport {
        covers_incorrect: incorrect.iter().all(|y| assigned_count[y.value()] == 1),
        telescopes: zeta_sum == chosen_mass - total_b,
        steps,
    }
}

/// `value ≥ bound` or `value ≤ bound`; `margin` is positive on the
/// passing side.
#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub name: String,
    /// `">="` or `"<="`.
    pub relation: &'static str,
    pub passed: bool,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaReport {
    pub delta: f64,
    pub delta_exact: String,
    pub checks: Vec<BoundCheck>,
    pub partition: PartitionReport,
    pub passed: bool,
}

fn check(name: &str, value: &BigRational, bound: &BigRational, note: &str) -> BoundCheck {
    BoundCheck {
        name: name.into(),
        relation: ">=",
        passed: value >= bound,
        value: value.to_f64().unwrap_or(0.0),
        bound: bound.to_f64().unwrap_or(0.0),
        margin: (value - bound).to_f64().unwrap_or(0.0),
        note: note.into(),
    }
}

fn check_at_most(name: &str, value: &BigRational, bound: &BigRational, note: &str) -> BoundCheck {
    BoundCheck {
        relation: "<=",
        passed: value <= bound,
        margin: -check(name, value, bound, note).margin,
        ..check(name, value, bound, note)
    }
}

/// Exact `Δ > 0`, the closed-form lower bounds (when the verifier follows
/// the `(c, s)` model), the strongly-incorrect mass bound and the
/// partition recurrence.
pub fn verify_delta_positive(machine: &QueryMachine, verifier: &VerifierModel, n_c: u64) -> Result<DeltaReport> {
    let exact = exact_voting_distribution(machine, verifier, n_c)?;
    let mm = machine.proof_qubits() as u64;
    let m = machine.m() as u64;
    let mut checks = Vec::new();
    let zero = BigRational::zero();
    let mut positive = check("delta-positive", &exact.delta, &zero, "");
    positive.passed = exact.delta > zero;
    checks.push(positive);

    let cs = verifier.honors_completeness_soundness(machine);
    let all_valid = machine.nodes().all(|(p, _)| machine.validity(p) != Validity::Invalid);
    let mut per_step = None;
    if let (Some(p), true) = (verifier.p_amp(), cs) {
        let p = p as u64;
        let lb = delta_lower_bound_exact(mm, m, p, n_c);
        if all_valid {
            let mut c = check("delta-closed-form", &exact.delta, &lb, "");
            if lb <= zero {
                c.note = "analytically inconclusive".into();
            }
            checks.push(c);
        }
        let b6 = incorrect_margin_bound(mm, m, p, n_c);
        checks.push(check("incorrect-margin", &exact.delta_prime, &b6, ""));
        per_step = Some(b6);
    }

    let s = match verifier.p_amp() {
        Some(p) => pow2_inv(p as u64),
        None => verifier.effective_soundness(machine),
    };
    let c_bound = int(1 << m) * &s;
    checks.push(check_at_most("strongly-incorrect-mass", &exact.mass_c, &c_bound, ""));

    let partition = divergence_partition(machine, verifier, &exact, per_step.as_ref());
    let passed = checks.iter().all(|c| c.passed)
        && partition.covers_incorrect
        && partition.telescopes
        && partition.steps.iter().all(|s| s.zeta_nonnegative && s.zeta_meets_bound != Some(false));
    Ok(DeltaReport {
        delta: exact.delta.to_f64().unwrap_or(0.0),
        delta_exact: exact.delta.to_string(),
        checks,
        partition,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::queryham::fixtures::{machine_from_energies, named_machine};
    use std::collections::BTreeMap;

    #[test]
    fn closed_form_example() {
        let v = delta_lower_bound(1, 1, 10, 2);
        let oracle = 0.125 * 0.5 * (1.0 - 0.5 - 1.0 / 1024.0) - 2.0 / 1024.0;
        assert!((v - oracle).abs() < 1e-15);
        assert!((v - 0.029236).abs() < 1e-6);
    }

    #[test]
    fn large_amplification_limit() {
        let v = delta_lower_bound(1, 2, 200, 4);
        // q = (1 + 2)·2 = 6, three rounds, M·m = 2.
        let limit = 0.5f64.powi(6 * 3) * 0.25 * 0.75;
        assert!((v - limit).abs() < 1e-12 * limit);
    }

    #[test]
    fn valid_machines_pass_all_checks() {
        for name in ["yes", "no", "adaptive", "deep"] {
            let mach = named_machine(name, 0.1).unwrap();
            let v = VerifierModel::canonical(&mach, 100, &BTreeMap::new()).unwrap();
            let r = verify_delta_positive(&mach, &v, 1 << mach.m()).unwrap();
            assert!(r.passed, "{name}: {r:?}");
            assert_eq!(r.partition.steps.len(), 1);
        }
    }

    #[test]
    fn invalid_queries_walk_several_correct_strings() {
        // Root invalid: both "0x" and "1x" subtrees hold correct strings.
        let eps = 0.1;
        let mach = machine_from_energies(
            eps,
            &[("", 2.0 * eps), ("0", 0.0), ("1", 2.0 * eps)],
            &[("00", 0), ("01", 1), ("10", 0), ("11", 1)],
        )
        .unwrap();
        let mut inv = BTreeMap::new();
        inv.insert(BitString::parse("").unwrap(), 0.25);
        inv.insert(BitString::parse("1").unwrap(), 0.75);
        let v = VerifierModel::canonical(&mach, 100, &inv).unwrap();
        let r = verify_delta_positive(&mach, &v, 4).unwrap();
        assert!(r.passed, "{r:?}");
        let chosen: Vec<&str> = r.partition.steps.iter().map(|s| s.chosen.as_str()).collect();
        // Correct strings are 01, 10, 11; "01" has the largest divergence probability.
        assert_eq!(chosen[0], "01");
        assert_eq!(chosen.last().copied(), Some("11"));
    }
}
