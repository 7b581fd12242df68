//! Property tests over randomly generated instances.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use hamgadget::kitaev::random::random_circuit;
use hamgadget::kitaev::{compile, history_state, ClockEncoding};
use hamgadget::operators::{trace_distance_pure, RegisterLayout, StateVector};
use hamgadget::queryham::fixtures::machine_with;
use hamgadget::queryham::{build_query_hamiltonian_with, verify_block_separation, BitString, QueryOptions};
use hamgadget::spectra::{dense, projection_overlap_bound, random_overlap_instance, sample_low_energy_overlap};
use hamgadget::voting::{exact_voting_distribution, VerifierModel};
use hamgadget::C64;

fn random_state(layout: &RegisterLayout, rng: &mut ChaCha8Rng) -> StateVector {
    let amps = DVector::from_fn(layout.dim(), |_, _| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)));
    StateVector::normalized(layout.clone(), amps).unwrap()
}

fn encoding() -> impl Strategy<Value = ClockEncoding> {
    prop_oneof![Just(ClockEncoding::Unary), Just(ClockEncoding::Abstract)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn history_states_have_zero_energy(
        seed in any::<u64>(), qubits in 2usize..=3, gates in 1usize..=4, enc in encoding(), delta in 0.5f64..20.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_circuit(qubits, gates, &mut rng).unwrap();
        let comp = compile(&c, enc, delta, false).unwrap();
        let proof = random_state(&c.proof_layout().unwrap(), &mut rng);
        let h = history_state(&c, &proof, enc).unwrap();
        let e = comp.hamiltonian.quadratic_form(h.amplitudes());
        prop_assert!(e.norm() <= 1e-9 * delta, "⟨η|H|η⟩ = {e}");
    }

    #[test]
    fn compiled_hamiltonians_are_hermitian_and_positive(
        seed in any::<u64>(), qubits in 2usize..=3, gates in 1usize..=4, enc in encoding(), hout in any::<bool>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_circuit(qubits, gates, &mut rng).unwrap();
        let m = compile(&c, enc, 1.0, hout).unwrap().hamiltonian.realize_dense().unwrap();
        prop_assert!((&m - m.adjoint()).camax() <= 1e-12);
        prop_assert!(dense::min_eigenvalue(&m) >= -1e-9);
    }

    #[test]
    fn trace_distance_is_a_metric(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layout = RegisterLayout::qubits(&[("A", n)]).unwrap();
        let (u, v, w) = (random_state(&layout, &mut rng), random_state(&layout, &mut rng), random_state(&layout, &mut rng));
        let (uv, vw, uw) = (trace_distance_pure(&u, &v), trace_distance_pure(&v, &w), trace_distance_pure(&u, &w));
        prop_assert!((0.0..=2.0 + 1e-12).contains(&uv));
        // Trace norm of |u⟩⟨u| − |v⟩⟨v| as the sum of absolute eigenvalues.
        let (a, b) = (u.amplitudes(), v.amplitudes());
        let diff = a * a.adjoint() - b * b.adjoint();
        let oracle: f64 = diff.symmetric_eigenvalues().iter().map(|x| x.abs()).sum();
        prop_assert!((uv - oracle).abs() <= 1e-9, "{uv} vs {oracle}");
        prop_assert!((uv - trace_distance_pure(&v, &u)).abs() <= 1e-12);
        prop_assert!(trace_distance_pure(&u, &u) <= 1e-6);
        prop_assert!(uw <= uv + vw + 1e-12);
    }

    #[test]
    fn low_energy_states_overlap_the_null_space(seed in any::<u64>(), n in 1usize..=3, frac in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = 1usize << n;
        let kernel = 1 + ((frac * (dim / 2) as f64) as usize).min(dim / 2 - 1);
        let inst = random_overlap_instance(dim, kernel, &mut rng);
        let delta = 0.5 * (inst.j - 2.0 * inst.k) * frac;
        let bound = projection_overlap_bound(inst.k, inst.j, delta).unwrap();
        let h = &inst.h1 + &inst.h2;
        let sampled = sample_low_energy_overlap(&h, &inst.projector, delta, 50, &mut rng);
        prop_assert!(sampled >= bound - 1e-9, "sampled {sampled} < bound {bound}");
        let wider = projection_overlap_bound(inst.k, inst.j, delta + 0.1).unwrap();
        prop_assert!(wider <= bound);
    }

    #[test]
    fn bitstrings_round_trip(len in 0usize..=12, raw in any::<u32>()) {
        let value = raw as usize & ((1usize << len) - 1);
        let y = BitString::from_value(value, len);
        prop_assert_eq!(y.value(), value);
        prop_assert_eq!(y.len(), len);
        let text: String = y.bits().iter().map(|b| char::from(b'0' + b)).collect();
        prop_assert_eq!(BitString::parse(&text).unwrap(), y);
    }
}

/// Energies strictly inside the valid regions: `≤ ε` or `≥ 3ε`.
fn valid_energies(m: usize, seed: u64, eps: f64) -> BTreeMap<BitString, f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = BTreeMap::new();
    for d in 0..m {
        for p in BitString::all(d) {
            let u: f64 = rand::Rng::random(&mut rng);
            let yes = rand::Rng::random_bool(&mut rng, 0.5);
            out.insert(p, if yes { eps * u } else { eps * (3.0 + u) });
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn valid_machines_separate_in_both_encodings(m in 1usize..=3, seed in any::<u64>(), unary in any::<bool>()) {
        let eps = 0.1;
        let energies = valid_energies(m, seed, eps);
        let mach = machine_with(eps, m, |p| energies[p]).unwrap();
        let opts = if unary { QueryOptions::unary() } else { QueryOptions::binary() };
        let qh = build_query_hamiltonian_with(&mach, eps, &opts).unwrap();
        let r = verify_block_separation(&qh, &mach, eps).unwrap();
        prop_assert!(r.passed, "margin {} < {}: {:?}", r.worst_margin, r.required_margin, r.offending);
    }

    #[test]
    fn voting_distribution_is_normalized_and_survival_is_monotone(
        m in 1usize..=3, seed in any::<u64>(), p_amp in 1u32..=60, extra_rounds in 0u64..3,
    ) {
        let eps = 0.1;
        let energies = valid_energies(m, seed, eps);
        let mach = machine_with(eps, m, |p| energies[p]).unwrap();
        let verifier = VerifierModel::canonical(&mach, p_amp, &BTreeMap::new()).unwrap();
        let n_c = (1u64 << m) + extra_rounds;
        let exact = exact_voting_distribution(&mach, &verifier, n_c).unwrap();

        let step_one: BigRational = exact.step_one.values().sum();
        prop_assert!(step_one.is_one());
        let total: BigRational = exact.distribution.values().sum::<BigRational>() + &exact.hash;
        prop_assert!(total.is_one());
        prop_assert!(exact.hash >= BigRational::zero());
        prop_assert!(exact.accept >= BigRational::zero() && exact.accept <= BigRational::one());

        // Survival `Pr[Y = y] / Pr[y in Step 1]` grows with the value of `y`.
        let mut last: Option<BigRational> = None;
        for (y, p1) in &exact.step_one {
            if p1.is_zero() {
                continue;
            }
            let s = &exact.distribution[y] / p1;
            if let Some(prev) = &last {
                prop_assert!(&s >= prev, "survival drops at {y:?}");
            }
            last = Some(s);
        }
    }
}
