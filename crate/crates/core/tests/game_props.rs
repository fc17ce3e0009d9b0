use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssag_core::game::*;
use ssag_core::instances;
use ssag_core::model::ContentionMechanism;
use ssag_core::{GameSpec, MixedProfile};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every profile of `n` users over `m` channels, user 0 most significant.
fn all_profiles(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..m).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out
}

fn no_profitable_deviation<G: Game>(g: &G, a: &[usize]) -> bool {
    (0..g.n_users()).all(|n| {
        let u = g.payoff(a, n);
        (0..g.n_channels()).all(|m| g.payoff_deviating(a, n, m) <= u * (1.0 + 1e-12) + 1e-300)
    })
}

fn random_mixed<R: Rng>(n: usize, m: usize, rng: &mut R) -> MixedProfile {
    let rows = (0..n)
        .map(|_| {
            let w: Vec<f64> = (0..m).map(|_| rng.gen_range(0.01..1.0)).collect();
            let s: f64 = w.iter().sum();
            w.into_iter().map(|x| x / s).collect()
        })
        .collect();
    MixedProfile::new(rows).unwrap()
}

fn any_mechanism<R: Rng>(n: usize, rng: &mut R) -> ContentionMechanism {
    match rng.gen_range(0..4) {
        0 => ContentionMechanism::Backoff { lambda_max: rng.gen_range(1..=12) },
        1 => ContentionMechanism::BackoffAsymptotic,
        2 => instances::random_weighted(n, rng),
        _ => instances::random_aloha(n, rng),
    }
}

fn potential_instance(variant: PotentialVariant, seed: u64) -> GameSpec {
    instances::random_potential_instance(variant, &mut rng(seed)).unwrap()
}

fn sign(x: f64, scale: f64) -> i8 {
    if x.abs() <= 1e-12 * scale {
        0
    } else if x > 0.0 {
        1
    } else {
        -1
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factorized_payoff_matches_enumeration(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=4);
        let m = r.gen_range(1..=3);
        let g = instances::random_directed(n, 0.5, &mut r).unwrap();
        let mech = any_mechanism(n, &mut r);
        let spec = instances::random_spec(g, m, mech, &mut r).unwrap();
        let sigma = random_mixed(n, m, &mut r);
        for user in 0..n {
            let mut oracle = 0.0;
            for a in all_profiles(n, m) {
                let p: f64 = (0..n).map(|i| sigma.row(i)[a[i]]).product();
                oracle += p * spec.payoff(&a, user);
            }
            let got = payoff_mixed(&spec, &sigma, user).unwrap();
            prop_assert!((got - oracle).abs() <= 1e-10 * oracle.abs().max(1.0), "{} vs {}", got, oracle);
        }
    }

    #[test]
    fn potential_tracks_every_deviation(seed in any::<u64>(), which in 0usize..5) {
        let variant = PotentialVariant::ALL[which];
        let spec = potential_instance(variant, seed);
        prop_assert!(variant.check_hypotheses(&spec).is_ok());
        let (n, m) = (spec.n_users(), spec.n_channels());
        for a in all_profiles(n, m) {
            let phi = potential_value(&spec, &a, variant).unwrap();
            for user in 0..n {
                for c in 0..m {
                    if c == a[user] {
                        continue;
                    }
                    let mut b = a.clone();
                    b[user] = c;
                    let (u0, u1) = (spec.payoff(&a, user), spec.payoff(&b, user));
                    let phi1 = potential_value(&spec, &b, variant).unwrap();
                    prop_assert_eq!(
                        sign(u1 - u0, u0.abs().max(u1.abs())),
                        sign(phi1 - phi, phi.abs().max(phi1.abs())),
                        "{} profile {:?} user {} -> {}", variant.name(), a, user, c
                    );
                }
            }
        }
    }

    #[test]
    fn better_response_climbs_the_potential(seed in any::<u64>(), which in 0usize..5) {
        let variant = PotentialVariant::ALL[which];
        let spec = potential_instance(variant, seed);
        let (n, m) = (spec.n_users(), spec.n_channels());
        let mut r = rng(seed ^ 1);
        let start: Vec<usize> = (0..n).map(|_| r.gen_range(0..m)).collect();
        let out = better_response_dynamics(&spec, &start, 200 * n * m).unwrap();
        prop_assert!(out.converged);
        prop_assert!(out.steps.len() <= 200 * n * m);
        prop_assert!(no_profitable_deviation(&spec, &out.profile));
        let mut a = start.clone();
        let mut phi = potential_value(&spec, &a, variant).unwrap();
        for s in &out.steps {
            a[s.user] = s.to;
            let next = potential_value(&spec, &a, variant).unwrap();
            prop_assert!(next > phi);
            phi = next;
        }
    }

    #[test]
    fn equilibria_invariant_under_rate_scaling(seed in any::<u64>(), c in 0.01f64..100.0) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=4);
        let m = r.gen_range(1..=3);
        let g = instances::random_directed(n, 0.4, &mut r).unwrap();
        let mech = any_mechanism(n, &mut r);
        let spec = instances::random_spec(g.clone(), m, mech.clone(), &mut r).unwrap();
        let scaled_rates = spec.mean_rate().iter().map(|row| row.iter().map(|b| b * c).collect()).collect();
        let scaled = GameSpec::new(g, spec.theta().to_vec(), scaled_rates, None, mech).unwrap();
        let a = enumerate_pure_ne(&spec).unwrap();
        let b = enumerate_pure_ne(&scaled).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn dag_construction_is_an_equilibrium(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=6);
        let m = r.gen_range(1..=3);
        let g = instances::random_dag(n, 0.4, &mut r).unwrap();
        let mech = any_mechanism(n, &mut r);
        let spec = instances::random_spec(g, m, mech, &mut r).unwrap();
        let a = construct_ne_dag(&spec).unwrap();
        prop_assert!(no_profitable_deviation(&spec, &a));
        prop_assert!(enumerate_pure_ne(&spec).unwrap().contains(&a));
    }

    #[test]
    fn tree_construction_is_an_equilibrium(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=7);
        let m = r.gen_range(1..=3);
        let g = instances::random_forest(n, 0.85, &mut r).unwrap();
        let mech = any_mechanism(n, &mut r);
        let spec = instances::random_spec(g, m, mech, &mut r).unwrap();
        let t = construct_ne_directed_tree(&spec).unwrap();
        prop_assert!(no_profitable_deviation(&spec, &t.profile));
    }

    #[test]
    fn price_of_anarchy_respects_bound(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=5);
        let m = r.gen_range(1..=3);
        let g = instances::random_dag(n, 0.5, &mut r).unwrap();
        let lambda_max = r.gen_range(1..=10);
        let spec = instances::random_spec(g, m, ContentionMechanism::Backoff { lambda_max }, &mut r).unwrap();
        let rep = social_welfare_and_poa(&spec).unwrap();
        // Oracle: brute-force welfare over all profiles.
        let best = all_profiles(n, m).iter().map(|a| spec.welfare(a)).fold(0.0, f64::max);
        prop_assert!((rep.optimal_welfare - best).abs() <= 1e-12 * best);
        prop_assert!(rep.poa <= 1.0 + 1e-12);
        prop_assert!(rep.poa >= poa_lower_bound(&spec) - 1e-9);
    }
}

#[test]
fn three_cycle_aloha_has_no_equilibrium() {
    let g = ssag_core::DirectedInterferenceGraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
    let spec = GameSpec::new(
        g,
        vec![1.0, 1.0],
        vec![vec![10.0, 10.0]; 3],
        None,
        ContentionMechanism::Aloha { p: vec![0.5; 3] },
    )
    .unwrap();
    assert!(enumerate_pure_ne(&spec).unwrap().is_empty());
    for a in all_profiles(3, 2) {
        assert!(!no_profitable_deviation(&spec, &a));
    }
    let out = better_response_dynamics(&spec, &[0, 0, 0], 100).unwrap();
    assert!(!out.converged);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn physical_potential_tracks_every_deviation(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=4);
        let m = r.gen_range(2..=3);
        let spec = instances::random_physical(n, m, &mut r);
        for a in all_profiles(n, m) {
            let phi = spec.potential_value(&a).unwrap();
            for user in 0..n {
                for c in 0..m {
                    let mut b = a.clone();
                    b[user] = c;
                    let (u0, u1) = (spec.payoff(&a, user), spec.payoff(&b, user));
                    let phi1 = spec.potential_value(&b).unwrap();
                    prop_assert_eq!(
                        sign(u1 - u0, u0.abs().max(u1.abs())),
                        sign(phi1 - phi, phi.abs().max(phi1.abs()))
                    );
                }
            }
        }
    }
}
