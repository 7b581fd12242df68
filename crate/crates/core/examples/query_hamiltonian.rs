//! Builds binary and unary query Hamiltonians for a depth-two adaptive
//! machine and prints the energy of every block.

use hamgadget::queryham::fixtures::named_machine;
use hamgadget::queryham::{build_query_hamiltonian, build_unary_query_hamiltonian, verify_block_separation};

fn main() -> hamgadget::Result<()> {
    let eps = 0.1;
    let machine = named_machine("adaptive", eps)?;
    println!("correct strings: {:?}", machine.correct_strings().iter().map(|y| y.to_string()).collect::<Vec<_>>());
    for qh in [build_query_hamiltonian(&machine, eps)?, build_unary_query_hamiltonian(&machine, eps)?] {
        let report = verify_block_separation(&qh, &machine, eps)?;
        println!(
            "{:?} encoding: λ = {:.4}, required margin {:.4}, worst {:.4}",
            qh.encoding, report.lambda, report.required_margin, report.worst_margin
        );
        for b in report.blocks.iter().filter(|b| b.string.is_some()) {
            println!("  X={} y={} {:?}: +{:.4}", b.pattern, b.string.as_deref().unwrap_or("-"), b.class, b.excess);
        }
    }
    Ok(())
}
