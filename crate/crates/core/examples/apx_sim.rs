//! Builds observable-threshold instances from one-query machines and decides
//! them by diagonalisation.

use hamgadget::queryham::fixtures::named_machine;
use hamgadget::reductions::{build_apx_sim, decide_apx_sim, simulator_circuit};
use hamgadget::spectra::SolverConfig;

fn main() -> hamgadget::Result<()> {
    for name in ["yes", "no"] {
        let machine = named_machine(name, 1.0)?;
        let sim = simulator_circuit(&machine, 3, 1)?;
        for gamma in [1.0, 10.0] {
            let inst = build_apx_sim(&machine, &sim, gamma)?;
            let d = decide_apx_sim(&inst, &SolverConfig::default())?;
            println!(
                "{name} γ={gamma}: {} (ground min {:.4} vs a={:.4}; low-energy min {:.4} vs b={:.4}; {} qubits)",
                d.verdict,
                d.ground_min,
                d.a,
                d.low_energy_min,
                d.b,
                inst.hamiltonian.layout().num_sites()
            );
        }
    }
    Ok(())
}
