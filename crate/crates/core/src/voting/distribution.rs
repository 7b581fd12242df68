//! Output distribution of the voting procedure, exactly and by sampling.
//!
//! Step 1 samples answers `y` query by query from the verifier model.
//! Step 3 replaces `y` by `#` with probability `1 − 2^{-q}` at each of the
//! rounds `i = 1 … n_c − 1` with `|y| < i`, so
//! `Pr[Y = y] = Pr[y in Step 1]·(2^{-q})^{(n_c−1)−|y|}`. Step 4 outputs a
//! fair coin on `#` and the machine's output otherwise.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::model::{pow2_inv, VerifierModel};
use crate::queryham::{BitString, QueryMachine, QueryStringClass};
use crate::{Error, Result};

/// `q = (M + 2)·m`.
pub fn survival_exponent(machine: &QueryMachine) -> u64 {
    ((machine.proof_qubits() + 2) * machine.m()) as u64
}

fn check_rounds(machine: &QueryMachine, n_c: u64) -> Result<()> {
    if n_c < 1u64 << machine.m() {
        return Err(Error::Input(format!(
            "n_c − 1 = {} is below 2^m − 1 = {}",
            n_c as i128 - 1,
            (1u64 << machine.m()) - 1
        )));
    }
    Ok(())
}

/// Probability that Step 1 produces `y`.
pub fn step_one_probability(machine: &QueryMachine, verifier: &VerifierModel, y: &BitString) -> BigRational {
    let mut p = BigRational::one();
    for i in 0..machine.m() {
        let acc = verifier.probability(&y.prefix(i));
        p *= if y.bit(i) == 1 { acc.clone() } else { BigRational::one() - acc };
    }
    p
}

#[derive(Clone, Debug)]
pub struct ExactOutcome {
    pub m: usize,
    pub q: u64,
    pub n_c: u64,
    pub step_one: BTreeMap<BitString, BigRational>,
    pub distribution: BTreeMap<BitString, BigRational>,
    pub hash: BigRational,
    pub mass_a: BigRational,
    pub mass_b: BigRational,
    pub mass_c: BigRational,
    /// `Pr[A] − Pr[B ∪ C]`.
    pub delta: BigRational,
    /// `Pr[A] − Pr[B]`.
    pub delta_prime: BigRational,
    pub accept: BigRational,
}

pub fn exact_voting_distribution(machine: &QueryMachine, verifier: &VerifierModel, n_c: u64) -> Result<ExactOutcome> {
    check_rounds(machine, n_c)?;
    let q = survival_exponent(machine);
    let mut step_one = BTreeMap::new();
    let mut distribution = BTreeMap::new();
    let (mut a, mut b, mut c) = (BigRational::zero(), BigRational::zero(), BigRational::zero());
    let mut accept_strings = BigRational::zero();
    for y in BitString::all(machine.m()) {
        let p1 = step_one_probability(machine, verifier, &y);
        let rounds = n_c - 1 - y.value() as u64;
        let p = &p1 * pow2_inv(q * rounds);
        match machine.classify(&y) {
            QueryStringClass::Correct => a += &p,
            QueryStringClass::Incorrect => b += &p,
            QueryStringClass::StronglyIncorrect => c += &p,
        }
        if machine.output(&y) {
            accept_strings += &p;
        }
        step_one.insert(y.clone(), p1);
        distribution.insert(y, p);
    }
    let hash = BigRational::one() - &a - &b - &c;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let accept = &hash * &half + accept_strings;
    Ok(ExactOutcome {
        m: machine.m(),
        q,
        n_c,
        step_one,
        delta: &a - &b - &c,
        delta_prime: &a - &b,
        mass_a: a,
        mass_b: b,
        mass_c: c,
        hash,
        distribution,
        accept,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EmpiricalOutcome {
    pub trials: u64,
    pub seed: u64,
    pub counts: BTreeMap<String, u64>,
    pub hash_count: u64,
    pub accept_count: u64,
    pub class_counts: [u64; 3],
}

/// Shards used by [`simulate_voting`]; results do not depend on the
/// number of worker threads.
pub const SHARDS: u64 = 64;

/// Runs the literal procedure `trials` times.
pub fn simulate_voting(
    machine: &QueryMachine,
    verifier: &VerifierModel,
    n_c: u64,
    trials: u64,
    seed: u64,
) -> Result<EmpiricalOutcome> {
    if trials == 0 {
        return Err(Error::Input("trials must be at least 1".into()));
    }
    check_rounds(machine, n_c)?;
    let q = survival_exponent(machine);
    let keep = 0.5f64.powf(q as f64);
    let probs: BTreeMap<BitString, f64> =
        verifier.probabilities().iter().map(|(k, v)| (k.clone(), v.to_f64().unwrap_or(0.0))).collect();
    let m = machine.m();
    let classes: Vec<usize> = BitString::all(m)
        .map(|y| match machine.classify(&y) {
            QueryStringClass::Correct => 0,
            QueryStringClass::Incorrect => 1,
            QueryStringClass::StronglyIncorrect => 2,
        })
        .collect();
    let outputs: Vec<bool> = BitString::all(m).map(|y| machine.output(&y)).collect();

    let shard = |s: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(s);
        let n = trials / SHARDS + u64::from(s < trials % SHARDS);
        let mut counts = vec![0u64; 1 << m];
        let (mut hash, mut accept) = (0u64, 0u64);
        for _ in 0..n {
            let mut y = BitString::empty();
            for _ in 0..m {
                let bit = rng.random::<f64>() < probs[&y];
                y = y.pushed(u8::from(bit));
            }
            let v = y.value() as u64;
            let mut killed = false;
            for i in 1..n_c {
                if v < i && rng.random::<f64>() >= keep {
                    killed = true;
                    break;
                }
            }
            if killed {
                hash += 1;
                accept += u64::from(rng.random::<bool>());
            } else {
                counts[v as usize] += 1;
                accept += u64::from(outputs[v as usize]);
            }
        }
        (counts, hash, accept)
    };
    let results: Vec<_> = (0..SHARDS).into_par_iter().map(shard).collect();

    let mut counts = vec![0u64; 1 << m];
    let (mut hash_count, mut accept_count) = (0, 0);
    for (c, h, a) in results {
        for (t, x) in counts.iter_mut().zip(c) {
            *t += x;
        }
        hash_count += h;
        accept_count += a;
    }
    let mut class_counts = [0u64; 3];
    for (v, &n) in counts.iter().enumerate() {
        class_counts[classes[v]] += n;
    }
    Ok(EmpiricalOutcome {
        trials,
        seed,
        counts: BitString::all(m).zip(counts).map(|(y, n)| (y.to_string(), n)).collect(),
        hash_count,
        accept_count,
        class_counts,
    })
}

/// One exact-versus-empirical comparison.
#[derive(Clone, Debug, Serialize)]
pub struct MassComparison {
    pub label: String,
    pub exact: f64,
    pub empirical: f64,
    pub sigma: f64,
    pub within: bool,
}

/// Compares every string, `#`, the three classes and the accept
/// frequency against the exact values, each within `k_sigma` binomial
/// standard deviations.
pub fn compare_masses(exact: &ExactOutcome, emp: &EmpiricalOutcome, k_sigma: f64) -> Vec<MassComparison> {
    let n = emp.trials as f64;
    let cmp = |label: String, p: &BigRational, count: u64| {
        let pe = p.to_f64().unwrap_or(0.0);
        let sigma = (pe * (1.0 - pe) / n).max(0.0).sqrt();
        let empirical = count as f64 / n;
        MassComparison { label, exact: pe, empirical, sigma, within: (empirical - pe).abs() <= k_sigma * sigma }
    };
    let mut out: Vec<MassComparison> =
        exact.distribution.iter().map(|(y, p)| cmp(format!("Y={y}"), p, emp.counts[&y.to_string()])).collect();
    out.push(cmp("Y=#".into(), &exact.hash, emp.hash_count));
    out.push(cmp("A".into(), &exact.mass_a, emp.class_counts[0]));
    out.push(cmp("B".into(), &exact.mass_b, emp.class_counts[1]));
    out.push(cmp("C".into(), &exact.mass_c, emp.class_counts[2]));
    out.push(cmp("accept".into(), &exact.accept, emp.accept_count));
    out
}
