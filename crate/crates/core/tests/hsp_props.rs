mod common;

use common::{exhaustive_witness, prime, random_subgroup_without_center};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xhsp_core::hsp::{
    character_distribution, find_hg_prime, find_witness, fourier_sample_gbar, solve_hsp, verify_witness,
    verify_witness_linear, HidingFamily, HidingPath, Oracle, SamplingBackend, SolverConfig, StabilizationPolicy,
    TripleHiding, HidingProcedure,
};
use xhsp_core::simq::{lemma4_run, PrepConfig, U_REGISTER};
use xhsp_core::xgroup::{random_subgroup, GroupSpec, Subgroup};

fn large_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![11u64, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101])
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 2000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn both_forms_of_the_system_agree(p in large_prime(), u in prop::array::uniform4(0u32..101), j in prop::array::uniform4(0u32..101)) {
        let pr = prime(p);
        let (u, j) = (u.map(|x| x % pr.get()), j.map(|x| x % pr.get()));
        prop_assert_eq!(verify_witness(&u, &j, pr), verify_witness_linear(&u, &j, pr));
    }

    #[test]
    fn returned_witnesses_verify(p in large_prime(), u in prop::array::uniform4(0u32..101)) {
        let pr = prime(p);
        let u = u.map(|x| x % pr.get());
        if let Some(j) = find_witness(&u, pr).unwrap() {
            prop_assert!(verify_witness(&u, &j, pr));
            prop_assert!(j.iter().all(|&x| x != 0 && x < pr.get()));
        }
    }
}

#[test]
fn closed_form_search_can_miss_existing_witnesses() {
    let p = prime(11);
    assert_eq!(find_witness(&[1, 1, 1, 1], p).unwrap(), None);
    let j = exhaustive_witness(&[1, 1, 1, 1], p).unwrap();
    assert!(verify_witness(&[1, 1, 1, 1], &j, p));
}

#[test]
fn zero_phase_probability_is_one_over_p() {
    let g = GroupSpec::heisenberg(prime(3), 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10 {
        let h = random_subgroup_without_center(&g, &mut rng);
        let o = Oracle::new(&h).unwrap();
        let cfg = PrepConfig { keep_superposition: true, ..Default::default() };
        let run = lemma4_run(&o, &mut rng, &cfg).unwrap();
        let dist = run.superposition.unwrap().outcome_distribution(U_REGISTER).unwrap();
        let zero = dist.iter().find(|d| d.value == 0).unwrap();
        assert!((zero.probability - 1.0 / 3.0).abs() < 1e-12);
    }
}

#[test]
fn samples_are_orthogonal_to_hg_prime() {
    for (spec, seed) in [
        (GroupSpec::heisenberg(prime(11), 1).unwrap(), 1u64),
        (GroupSpec::heisenberg(prime(5), 2).unwrap(), 2),
        (GroupSpec::two_group(2, true).unwrap(), 3),
    ] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..5 {
            let h = random_subgroup(&spec, &mut rng).unwrap();
            let hg = h.with_center().unwrap();
            let o = Oracle::new(&h).unwrap();
            let family = if spec.p().get() >= 11 {
                TripleHiding::new(&o, PrepConfig::default()).next_family(&mut rng).unwrap()
            } else {
                let (run, _) = xhsp_core::hsp::zero_phase_state(&o, &mut rng, &PrepConfig::default()).unwrap();
                HidingFamily::from_coset_state(&run.state).unwrap()
            };
            let p = spec.p();
            for _ in 0..10 {
                let c = fourier_sample_gbar(&family, SamplingBackend::Structured, &mut rng).unwrap();
                for g in hg.elements() {
                    let dot = c.iter().zip(spec.bar(&g).coords()).fold(0, |acc, (&a, &b)| p.add(acc, p.mul(a, b)));
                    assert_eq!(dot, 0, "{spec}: sample {c:?} vs {g:?}");
                }
            }
        }
    }
}

#[test]
fn structured_distribution_is_uniform_on_the_annihilator() {
    let spec = GroupSpec::heisenberg(prime(5), 1).unwrap();
    let h = Subgroup::generated(&spec, &[spec.x(0)]).unwrap();
    let o = Oracle::new(&h).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (run, _) = xhsp_core::hsp::zero_phase_state(&o, &mut rng, &PrepConfig::default()).unwrap();
    let fam = HidingFamily::from_coset_state(&run.state).unwrap();
    let dist = character_distribution(&fam, SamplingBackend::Structured).unwrap();
    let keys: Vec<Vec<u32>> = dist.keys().cloned().collect();
    assert_eq!(keys, (0..5).map(|t| vec![0, t]).collect::<Vec<_>>());
    assert!(dist.values().all(|q| (q - 0.2).abs() < 1e-9));
}

#[test]
fn hg_prime_examples() {
    let spec = GroupSpec::heisenberg(prime(11), 1).unwrap();
    let cfg = SolverConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let h = Subgroup::generated(&spec, &[spec.x(0)]).unwrap();
    let got = find_hg_prime(&Oracle::new(&h).unwrap(), &mut rng, &cfg).unwrap();
    assert!(got.same_elements(&Subgroup::generated(&spec, &[spec.x(0), spec.z()]).unwrap()));
    let center = Subgroup::generated(&spec, &[spec.z()]).unwrap();
    let got = find_hg_prime(&Oracle::new(&center).unwrap(), &mut rng, &cfg).unwrap();
    assert!(got.same_elements(&center));
    for _ in 0..5 {
        let h = random_subgroup(&spec, &mut rng).unwrap();
        let got = find_hg_prime(&Oracle::new(&h).unwrap(), &mut rng, &cfg).unwrap();
        assert!(got.same_elements(&h.with_center().unwrap()));
    }
}

#[test]
fn query_count_has_a_soft_bound() {
    const C: u64 = 200;
    for (spec, seed) in [
        (GroupSpec::heisenberg(prime(11), 1).unwrap(), 5u64),
        (GroupSpec::heisenberg(prime(3), 2).unwrap(), 6),
        (GroupSpec::ap_squared(prime(5), 1).unwrap(), 7),
        (GroupSpec::two_group(2, false).unwrap(), 8),
    ] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cap = StabilizationPolicy::for_rank(2 * spec.k(), spec.p()).cap as u64;
        for _ in 0..6 {
            let h = random_subgroup(&spec, &mut rng).unwrap();
            let o = Oracle::new(&h).unwrap();
            let mut r = solve_hsp(&o, &mut rng, &SolverConfig::default());
            assert!(r.check(&h).unwrap(), "{r:?}");
            assert!(r.queries <= C * spec.rank() as u64 * cap, "{} queries", r.queries);
        }
    }
}

#[test]
fn forced_zero_phase_path_works_for_large_primes() {
    let spec = GroupSpec::heisenberg(prime(11), 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let cfg = SolverConfig { path: HidingPath::ZeroPhase, ..Default::default() };
    for _ in 0..3 {
        let h = random_subgroup_without_center(&spec, &mut rng);
        let mut r = solve_hsp(&Oracle::new(&h).unwrap(), &mut rng, &cfg);
        assert!(r.check(&h).unwrap(), "{r:?}");
        assert_eq!(r.triple_resamples, 0);
        assert!(r.zero_phase_tries > 0);
    }
}

#[test]
fn same_seed_same_result() {
    let spec = GroupSpec::heisenberg(prime(11), 1).unwrap();
    let run = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_subgroup_without_center(&spec, &mut rng);
        let r = solve_hsp(&Oracle::new(&h).unwrap(), &mut rng, &SolverConfig::default());
        (r.recovered, r.queries, r.lemma4_runs)
    };
    assert_eq!(run(77), run(77));
}
