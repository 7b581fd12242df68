//! Spectral-gap instances: accepting machines close the gap, rejecting ones
//! keep it open, and a planted borderline query is replaced by validation.

use hamgadget::queryham::fixtures::{machine_from_energies, named_machine};
use hamgadget::reductions::{build_spectral_gap_instance, decide_gap_value};

fn main() -> hamgadget::Result<()> {
    let (eps, delta) = (0.1, 0.01);
    let mut machines = vec![];
    for name in ["yes", "no", "adaptive", "deep"] {
        machines.push((name.to_string(), named_machine(name, eps)?));
    }
    machines.push(("planted".into(), machine_from_energies(eps, &[("", 2.0 * eps)], &[("0", 0), ("1", 0)])?));
    for (name, m) in machines {
        let inst = build_spectral_gap_instance(&m, eps, delta)?;
        let gap = inst.block_gap()?;
        let replaced: Vec<_> = inst.validation.iter().filter(|e| e.replaced).map(|e| e.prefix.clone()).collect();
        println!(
            "{name}: gap {gap:.3e}, α {:.3e} → {} (replaced {replaced:?})",
            inst.alpha,
            decide_gap_value(gap, inst.alpha).verdict
        );
    }
    Ok(())
}
