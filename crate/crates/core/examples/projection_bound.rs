//! Compares the projection overlap bound with the certified and sampled
//! minimum overlap on random instances.

use hamgadget::operators::{Hamiltonian, LocalTerm, RegisterLayout};
use hamgadget::spectra::dense::min_eigenvalue;
use hamgadget::spectra::{
    min_observable_over_low_energy, projection_overlap_bound, random_overlap_instance, sample_low_energy_overlap,
    SolverConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hamgadget::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let layout = RegisterLayout::qubits(&[("A", 3)])?;
    for _ in 0..5 {
        let inst = random_overlap_instance(8, 3, &mut rng);
        let delta = 0.1 * (inst.j - 2.0 * inst.k);
        let h = &inst.h1 + &inst.h2;
        let ham = Hamiltonian::with_terms(layout.clone(), vec![LocalTerm::new(vec![0, 1, 2], h.clone(), 1.0)?])?;
        let p =
            Hamiltonian::with_terms(layout.clone(), vec![LocalTerm::new(vec![0, 1, 2], inst.projector.clone(), 1.0)?])?;
        let certified = min_observable_over_low_energy(&ham, &p, min_eigenvalue(&h) + delta, &SolverConfig::default())?;
        let sampled = sample_low_energy_overlap(&h, &inst.projector, delta, 500, &mut rng);
        println!(
            "J={:.3} K={:.3} δ={delta:.3}: bound {:.5} ≤ certified {:.5} ≤ sampled {:.5}",
            inst.j,
            inst.k,
            projection_overlap_bound(inst.k, inst.j, delta)?,
            certified.value,
            sampled
        );
    }
    Ok(())
}
