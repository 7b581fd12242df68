//! Exact hierarchical-voting distribution of an adaptive machine, checked
//! against a Monte Carlo run.

use std::collections::BTreeMap;

use hamgadget::queryham::fixtures::named_machine;
use hamgadget::voting::{
    exact_voting_distribution, simulate_voting, verify_delta_positive, VerifierModel, VotingOutcome,
};

fn main() -> hamgadget::Result<()> {
    let machine = named_machine("mixed", 0.1)?;
    let mut invalid = BTreeMap::new();
    invalid.insert(hamgadget::queryham::BitString::empty(), 0.5);
    let verifier = VerifierModel::canonical(&machine, 20, &invalid)?;
    let exact = exact_voting_distribution(&machine, &verifier, 4)?;
    let emp = simulate_voting(&machine, &verifier, 4, 200_000, 7)?;
    let out = VotingOutcome::new(&exact, Some(emp), 3.0);
    for (y, m) in &out.distribution {
        println!("Pr[Y={y}] = {:.6e}", m.value);
    }
    println!("Pr[#] = {:.6e}, Δ = {:.6e}, accept = {:.6}", out.hash.value, out.delta.value, out.accept.value);
    for c in &out.comparisons {
        println!(
            "  {:<8} exact {:.5} sampled {:.5} ({})",
            c.label,
            c.exact,
            c.empirical,
            if c.within { "within 3σ" } else { "outside 3σ" }
        );
    }
    for c in verify_delta_positive(&machine, &verifier, 4)?.checks {
        println!("{}: {} (value {:.3e}, bound {:.3e}) {}", c.name, c.passed, c.value, c.bound, c.note);
    }
    Ok(())
}
