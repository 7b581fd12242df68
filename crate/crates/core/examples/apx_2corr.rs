//! Appends the Bell gadget to a simulator and measures the two-point
//! correlation of the resulting ground state.

use hamgadget::queryham::fixtures::named_machine;
use hamgadget::reductions::{build_apx_2corr, decide_apx_2corr, simulator_circuit};

fn main() -> hamgadget::Result<()> {
    for name in ["yes", "no"] {
        let machine = named_machine(name, 1.0)?;
        let sim = simulator_circuit(&machine, 3, 3)?;
        let inst = build_apx_2corr(&machine, &sim, 1.0)?;
        let d = decide_apx_2corr(&inst, 2000, 1)?;
        println!(
            "{name}: {} ground f = {:.4}, low-energy f ≤ {:.4}, sampled f ≤ {:.4}; a = {:.4}, b = {:.4}",
            d.verdict, d.ground_max_f, d.low_energy_max_f, d.sampled_max_f, d.a, d.b
        );
    }
    Ok(())
}
