//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::collections::HashSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use ssag::commands::{has_interior_peak, replicate};
use ssag::load_config;
use ssag_core::estimation::{mle_grab, mle_markov, ObservationSet};
use ssag_core::game::{
    better_response_dynamics, construct_ne_dag, construct_ne_directed_tree, enumerate_pure_ne,
    is_pure_ne, potential_value, social_welfare_and_poa, Game, PotentialVariant,
};
use ssag_core::instances;
use ssag_core::learning::{
    approx_ne_gap, boltzmann_profile, contraction_temperature_bound, mean_dynamics_fixed_point,
    mean_dynamics_operator, run_learning, GammaBound, LearningConfig,
};
use ssag_core::math::max_abs_diff;
use ssag_core::model::{backoff_grab, ChannelModel, ContentionMechanism, GrabModel, RateModel};
use ssag_core::simulator::{Policy, Scenario, SimState, SimulatedEstimates};
use ssag_core::{DirectedInterferenceGraph, GameSpec, MixedProfile};

type Verdict = Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn all_profiles(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|a| {
                (0..m).map(move |c| {
                    let mut b = a.clone();
                    b.push(c);
                    b
                })
            })
            .collect();
    }
    out
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

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Instances shared between criteria 2 to 6.
#[derive(Default)]
struct Pool {
    dags: Vec<GameSpec>,
    trees: Vec<GameSpec>,
    potential: Vec<(PotentialVariant, GameSpec)>,
}

fn dag_instances() -> Vec<GameSpec> {
    let mut r = rng(0xda6);
    (0..200)
        .map(|_| {
            let n = r.gen_range(1..=6);
            let m = r.gen_range(1..=3);
            let g = instances::random_dag(n, 0.5, &mut r).unwrap();
            instances::random_spec(
                g,
                m,
                ContentionMechanism::Backoff { lambda_max: 10 },
                &mut r,
            )
            .unwrap()
        })
        .collect()
}

fn tree_instances() -> Vec<GameSpec> {
    let mut r = rng(0x7ee);
    (0..200)
        .map(|k| {
            let n = r.gen_range(2..=7);
            let m = r.gen_range(2..=3);
            let g = instances::random_forest(n, 0.8, &mut r).unwrap();
            let mech = if k % 2 == 0 {
                ContentionMechanism::Backoff { lambda_max: 10 }
            } else {
                instances::random_aloha(n, &mut r)
            };
            instances::random_spec(g, m, mech, &mut r).unwrap()
        })
        .collect()
}

fn potential_instances() -> Vec<(PotentialVariant, GameSpec)> {
    let mut r = rng(0x907);
    PotentialVariant::ALL
        .iter()
        .flat_map(|&v| (0..100).map(move |_| v))
        .map(|v| (v, instances::random_potential_instance(v, &mut r).unwrap()))
        .collect()
}

fn three_cycle() -> Verdict {
    let spec = GameSpec::new(
        DirectedInterferenceGraph::new(3, [(0, 1), (1, 2), (2, 0)]).map_err(err)?,
        vec![1.0, 1.0],
        vec![vec![1.0, 1.0]; 3],
        None,
        ContentionMechanism::Aloha { p: vec![0.5; 3] },
    )
    .map_err(err)?;
    let ne = enumerate_pure_ne(&spec).map_err(err)?;
    if !ne.is_empty() {
        return Err(format!("found equilibria {ne:?}"));
    }
    for a in all_profiles(3, 2) {
        if is_pure_ne(&spec, &a).map_err(err)?.is_ne {
            return Err(format!("{a:?} passes the equilibrium check"));
        }
    }
    let out = better_response_dynamics(&spec, &[0, 0, 0], 100).map_err(err)?;
    if out.converged {
        return Err("better-response dynamics converged".into());
    }
    let mut a = vec![0, 0, 0];
    let mut seen = HashSet::from([a.clone()]);
    let mut revisit = false;
    for s in &out.steps {
        a[s.user] = s.to;
        revisit |= !seen.insert(a.clone());
    }
    if !revisit {
        return Err("better-response path never revisits a profile".into());
    }
    Ok(format!(
        "0 of 8 profiles are equilibria, dynamics cycle ({} moves)",
        out.steps.len()
    ))
}

fn dag_existence(pool: &Pool) -> Verdict {
    for (k, spec) in pool.dags.iter().enumerate() {
        let ne = enumerate_pure_ne(spec).map_err(err)?;
        if ne.is_empty() {
            return Err(format!("instance {k}: no pure equilibrium"));
        }
        let a = construct_ne_dag(spec).map_err(err)?;
        if !ne.contains(&a) {
            return Err(format!(
                "instance {k}: constructed {a:?} is not among the equilibria"
            ));
        }
    }
    Ok(format!(
        "{} DAG instances, construction always an equilibrium",
        pool.dags.len()
    ))
}

fn tree_existence(pool: &Pool) -> Verdict {
    let mut fallbacks = 0;
    for (k, spec) in pool.trees.iter().enumerate() {
        if enumerate_pure_ne(spec).map_err(err)?.is_empty() {
            return Err(format!("instance {k}: no pure equilibrium"));
        }
        let out = construct_ne_directed_tree(spec).map_err(err)?;
        fallbacks += usize::from(out.used_fallback);
        if !is_pure_ne(spec, &out.profile).map_err(err)?.is_ne {
            return Err(format!(
                "instance {k}: constructed {:?} is not an equilibrium",
                out.profile
            ));
        }
    }
    Ok(format!(
        "{} tree/forest instances, {fallbacks} enumeration fallbacks",
        pool.trees.len()
    ))
}

fn potential_signs(pool: &Pool) -> Verdict {
    let mut deviations = 0usize;
    for (k, (v, spec)) in pool.potential.iter().enumerate() {
        v.check_hypotheses(spec)
            .map_err(|e| format!("{} instance {k}: {e}", v.name()))?;
        let (n, m) = (spec.n_users(), spec.n_channels());
        for a in all_profiles(n, m) {
            let phi = potential_value(spec, &a, *v).map_err(err)?;
            for user in 0..n {
                for c in (0..m).filter(|&c| c != a[user]) {
                    let mut b = a.clone();
                    b[user] = c;
                    let (u0, u1) = (spec.payoff(&a, user), spec.payoff(&b, user));
                    let phi1 = potential_value(spec, &b, *v).map_err(err)?;
                    if sign(u1 - u0, u0.abs().max(u1.abs()))
                        != sign(phi1 - phi, phi.abs().max(phi1.abs()))
                    {
                        return Err(format!(
                            "{} instance {k}: {a:?}, user {user} -> {c}",
                            v.name()
                        ));
                    }
                    deviations += 1;
                }
            }
        }
    }
    let mut r = rng(0x13);
    for k in 0..100 {
        let n = r.gen_range(2..=4);
        let m = r.gen_range(2..=3);
        let spec = instances::random_physical(n, m, &mut r);
        for a in all_profiles(n, m) {
            let phi = spec.potential_value(&a).map_err(err)?;
            for user in 0..n {
                for c in (0..m).filter(|&c| c != a[user]) {
                    let mut b = a.clone();
                    b[user] = c;
                    let (u0, u1) = (spec.payoff(&a, user), spec.payoff(&b, user));
                    let phi1 = spec.potential_value(&b).map_err(err)?;
                    if sign(u1 - u0, u0.abs().max(u1.abs()))
                        != sign(phi1 - phi, phi.abs().max(phi1.abs()))
                    {
                        return Err(format!("physical instance {k}: {a:?}, user {user} -> {c}"));
                    }
                    deviations += 1;
                }
            }
        }
    }
    Ok(format!(
        "6 x 100 instances, {deviations} deviations agree in sign"
    ))
}

fn finite_improvement(pool: &Pool) -> Verdict {
    let fip = [
        PotentialVariant::AsymptoticBackoff,
        PotentialVariant::WeightedShare,
        PotentialVariant::Aloha,
    ];
    let mut r = rng(0xf1b);
    let mut runs = 0;
    let mut longest = 0;
    for (k, (v, spec)) in pool
        .potential
        .iter()
        .enumerate()
        .filter(|(_, (v, _))| fip.contains(v))
    {
        let (n, m) = (spec.n_users(), spec.n_channels());
        let budget = m * n * 200;
        let start: Vec<usize> = (0..n).map(|_| r.gen_range(0..m)).collect();
        let out = better_response_dynamics(spec, &start, budget).map_err(err)?;
        if !out.converged || out.steps.len() > budget {
            return Err(format!(
                "{} instance {k}: no termination within {budget} steps",
                v.name()
            ));
        }
        if !is_pure_ne(spec, &out.profile).map_err(err)?.is_ne {
            return Err(format!(
                "{} instance {k}: terminal profile is not an equilibrium",
                v.name()
            ));
        }
        let mut a = start;
        let mut phi = potential_value(spec, &a, *v).map_err(err)?;
        for s in &out.steps {
            a[s.user] = s.to;
            let next = potential_value(spec, &a, *v).map_err(err)?;
            if sign(next - phi, next.abs().max(phi.abs())) != 1 {
                return Err(format!(
                    "{} instance {k}: potential did not increase at {a:?}",
                    v.name()
                ));
            }
            phi = next;
        }
        runs += 1;
        longest = longest.max(out.steps.len());
    }
    Ok(format!(
        "{runs} runs terminate at equilibria, longest {longest} moves"
    ))
}

/// `min_n V_n g_n(N_n) / max_n V_n` computed from the primitives.
fn efficiency_bound(spec: &GameSpec) -> f64 {
    let v: Vec<f64> = (0..spec.n_users())
        .map(|n| {
            (0..spec.n_channels())
                .map(|m| spec.gain()[n] * spec.theta()[m] * spec.mean_rate()[n][m])
                .fold(0.0, f64::max)
        })
        .collect();
    let top = v.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0.0;
    }
    (0..spec.n_users())
        .map(|n| {
            v[n] * spec
                .mechanism()
                .grab(n, spec.graph().in_neighbors(n).unwrap())
        })
        .fold(f64::INFINITY, f64::min)
        / top
}

fn poa_bound(pool: &Pool) -> Verdict {
    let specs = pool
        .dags
        .iter()
        .chain(&pool.trees)
        .chain(pool.potential.iter().map(|(_, s)| s));
    let mut count = 0;
    let mut tightest = f64::INFINITY;
    for (k, spec) in specs.enumerate() {
        let r = social_welfare_and_poa(spec).map_err(err)?;
        let bound = efficiency_bound(spec);
        if r.poa < bound - 1e-9 {
            return Err(format!("instance {k}: PoA {} below bound {bound}", r.poa));
        }
        tightest = tightest.min(r.poa - bound);
        count += 1;
    }
    Ok(format!("{count} instances, smallest margin {tightest:.3e}"))
}

fn estimator_consistency() -> Verdict {
    let (eps, xi) = (0.2, 0.3);
    let chain = ChannelModel::Markov { epsilon: eps, xi };
    let mut r = rng(0x3a7);
    let mut s = chain.sample_stationary(&mut r).map_err(err)?;
    let trace: Vec<bool> = (0..100_000)
        .map(|_| {
            s = chain.sample_channel_state(s, &mut r);
            s
        })
        .collect();
    let e = mle_markov(&trace).map_err(err)?;
    let errs = [
        (e.epsilon - eps).abs(),
        (e.xi - xi).abs(),
        (e.theta - eps / (eps + xi)).abs(),
    ];
    if errs.iter().any(|&d| d > 0.01) {
        return Err(format!("Markov errors {errs:?}"));
    }

    // User 0 contends with two in-neighbors on an always-idle channel.
    let graph = DirectedInterferenceGraph::new(3, [(1, 0), (2, 0)]).map_err(err)?;
    let scenario = Scenario::new(
        graph,
        vec![ChannelModel::Bernoulli { theta: 1.0 }],
        vec![vec![RateModel::Fixed { rate: 1.0 }]; 3],
        ContentionMechanism::Backoff { lambda_max: 10 },
        100_000,
    )
    .map_err(err)?;
    let mut state = SimState::new(&scenario, 0x3a8).map_err(err)?;
    let (mut idle, mut grabbed, mut rate) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..100_000 {
        state.step_channels(&scenario);
        let o = state.contend(&scenario, &[0, 0, 0])[0];
        idle.push(o.idle);
        grabbed.push(o.grabbed);
        rate.push(o.rate);
    }
    let obs = ObservationSet::new(idle, grabbed, rate).map_err(err)?;
    let g = mle_grab(&obs).map_err(err)?;
    let f2 = backoff_grab(10, 2);
    if (g - f2).abs() > 0.01 || obs.sums().0 < 100_000 {
        return Err(format!("grab estimate {g} vs f(2) = {f2}"));
    }
    Ok(format!(
        "Markov errors {:.1e}/{:.1e}/{:.1e}, grab error {:.1e}",
        errs[0],
        errs[1],
        errs[2],
        (g - f2).abs()
    ))
}

/// One four-user instance at 0.9 times its contraction bound, with the
/// fixed point from the uniform start.
struct Contracted {
    spec: GameSpec,
    gamma: f64,
    fixed: Vec<Vec<f64>>,
}

fn contraction_instances() -> Vec<GameSpec> {
    let mut r = rng(0xc0a);
    (0..20)
        .map(|k| {
            let graph = loop {
                let g = instances::random_directed(4, 0.5, &mut r).unwrap();
                if g.max_in_degree() > 0 {
                    break g;
                }
            };
            let m = r.gen_range(2..=3);
            let mech = match k % 4 {
                0 => ContentionMechanism::Backoff {
                    lambda_max: r.gen_range(2..=10),
                },
                1 => instances::random_aloha(4, &mut r),
                2 => ContentionMechanism::BackoffAsymptotic,
                _ => instances::random_weighted(4, &mut r),
            };
            instances::random_spec(graph, m, mech, &mut r).unwrap()
        })
        .collect()
}

fn random_perceptions<R: Rng>(n: usize, m: usize, top: f64, r: &mut R) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..m).map(|_| r.gen_range(0.0..=top)).collect())
        .collect()
}

fn contraction(out: &mut Vec<Contracted>) -> Verdict {
    let mut r = rng(0xc0b);
    let mut worst_lip: f64 = 0.0;
    let mut worst_res: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    for (k, spec) in contraction_instances().into_iter().enumerate() {
        let gamma = match contraction_temperature_bound(&spec) {
            GammaBound::Finite(b) => 0.9 * b,
            GammaBound::Unbounded => return Err(format!("instance {k}: no interference")),
        };
        let (n, m) = (spec.n_users(), spec.n_channels());
        let top = (0..n)
            .flat_map(|i| (0..m).map(move |c| (i, c)))
            .map(|(i, c)| spec.base_value(i, c))
            .fold(0.0, f64::max);
        for pair in 0..100 {
            let p = random_perceptions(n, m, top, &mut r);
            let q = if pair % 2 == 0 {
                random_perceptions(n, m, top, &mut r)
            } else {
                let scale = 1e-3 * top;
                p.iter()
                    .map(|row| row.iter().map(|x| x + r.gen_range(-scale..scale)).collect())
                    .collect()
            };
            let d = max_abs_diff(&p, &q);
            if d == 0.0 {
                continue;
            }
            let qp = mean_dynamics_operator(&spec, &p, gamma).map_err(err)?;
            let qq = mean_dynamics_operator(&spec, &q, gamma).map_err(err)?;
            let lip = max_abs_diff(&qp, &qq) / d;
            if lip >= 1.0 {
                return Err(format!("instance {k}: sampled Lipschitz constant {lip}"));
            }
            worst_lip = worst_lip.max(lip);
        }
        let fp = mean_dynamics_fixed_point(&spec, gamma, 1e-12, 100_000, None).map_err(err)?;
        if !fp.converged || fp.residual >= 1e-10 {
            return Err(format!("instance {k}: residual {}", fp.residual));
        }
        worst_res = worst_res.max(fp.residual);
        let mut restarts = Vec::new();
        for _ in 0..2 {
            let start = random_perceptions(n, m, top, &mut r);
            let alt = mean_dynamics_fixed_point(&spec, gamma, 1e-12, 100_000, Some(&start))
                .map_err(err)?;
            if !alt.converged {
                return Err(format!("instance {k}: restart did not converge"));
            }
            restarts.push(alt.perceptions);
        }
        let gap = max_abs_diff(&restarts[0], &restarts[1])
            .max(max_abs_diff(&restarts[0], &fp.perceptions));
        if gap > 1e-8 {
            return Err(format!("instance {k}: restarts differ by {gap}"));
        }
        worst_gap = worst_gap.max(gap);
        out.push(Contracted {
            spec,
            gamma,
            fixed: fp.perceptions,
        });
    }
    Ok(format!(
        "{} instances, Lipschitz <= {worst_lip:.3}, residual <= {worst_res:.1e}, restarts within {worst_gap:.1e}",
        out.len()
    ))
}

/// Expected payoff of `n` under `sigma` with its own row replaced by `row`,
/// summed over every pure profile.
fn enumerated_payoff(spec: &GameSpec, sigma: &MixedProfile, n: usize, row: &[f64]) -> f64 {
    all_profiles(spec.n_users(), spec.n_channels())
        .iter()
        .map(|a| {
            let p: f64 = (0..spec.n_users())
                .map(|i| {
                    if i == n {
                        row[a[i]]
                    } else {
                        sigma.row(i)[a[i]]
                    }
                })
                .product();
            p * spec.payoff(a, n)
        })
        .sum()
}

fn gap_certificate(fixed: &[Contracted]) -> Verdict {
    if fixed.is_empty() {
        return Err("no fixed points from the contraction criterion".into());
    }
    let mut worst = f64::NEG_INFINITY;
    for (k, c) in fixed.iter().enumerate() {
        let (n, m) = (c.spec.n_users(), c.spec.n_channels());
        let sigma = boltzmann_profile(&c.fixed, c.gamma).map_err(err)?;
        let report = approx_ne_gap(&c.spec, &sigma, c.gamma).map_err(err)?;
        let delta = (0..n)
            .map(|i| {
                -sigma
                    .row(i)
                    .iter()
                    .filter(|&&s| s > 0.0)
                    .map(|s| s * s.ln())
                    .sum::<f64>()
                    / c.gamma
            })
            .fold(0.0, f64::max);
        if (delta - report.delta).abs() > 1e-9 * delta.max(1.0) {
            return Err(format!(
                "instance {k}: reported delta {} vs {delta}",
                report.delta
            ));
        }
        for user in 0..n {
            let current = enumerated_payoff(&c.spec, &sigma, user, sigma.row(user));
            let best = (0..m)
                .map(|ch| {
                    let mut e = vec![0.0; m];
                    e[ch] = 1.0;
                    enumerated_payoff(&c.spec, &sigma, user, &e)
                })
                .fold(f64::NEG_INFINITY, f64::max);
            let gain = best - current;
            if gain > delta + 1e-9 {
                return Err(format!(
                    "instance {k}, user {user}: gain {gain} exceeds delta {delta}"
                ));
            }
            worst = worst.max(gain - delta);
        }
        if delta > (m as f64).ln() / c.gamma + 1e-12 {
            return Err(format!("instance {k}: delta {delta} above ln M / gamma"));
        }
    }
    Ok(format!(
        "{} fixed points certified, largest gain - delta {worst:.3e}",
        fixed.len()
    ))
}

fn tracks_mean_dynamics(fixed: &[Contracted]) -> Verdict {
    let c = fixed
        .first()
        .ok_or("no fixed points from the contraction criterion")?;
    let mut scenario = Scenario::from_game_spec(&c.spec, 100).map_err(err)?;
    scenario.idle_estimator = ssag_core::estimation::IdleEstimator::MarkovOrFrequency;
    let dists: Vec<Result<(f64, f64), String>> = (0..20u64)
        .into_par_iter()
        .map(|s| {
            let seed = 0x1ea2 + s;
            let mut oracle = SimulatedEstimates::new(&scenario, seed).map_err(err)?;
            let mut cfg = LearningConfig::new(c.gamma, 10_000, seed);
            cfg.reference = Some(c.fixed.clone());
            let out = run_learning(&c.spec, &mut oracle, &cfg).map_err(err)?;
            let d = out.distance.ok_or("no distance trace")?;
            Ok((d[99], d[9_999]))
        })
        .collect();
    let (mut early, mut late) = (0.0, 0.0);
    for d in dists {
        let (a, b) = d?;
        early += a / 20.0;
        late += b / 20.0;
    }
    if late >= early {
        return Err(format!(
            "distance {late:.4e} at T=1e4 not below {early:.4e} at T=1e2"
        ));
    }
    Ok(format!(
        "mean distance {early:.4e} at T=1e2, {late:.4e} at T=1e4"
    ))
}

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn reproduction() -> Verdict {
    let mut parts = Vec::new();
    for name in ["nine_user_backoff.json", "nine_user_aloha.json"] {
        let cfg = load_config(&configs_dir().join(name)).map_err(err)?;
        let gamma = cfg.learning.gamma;
        let runs =
            replicate(&cfg, &[Policy::Learning { gamma }, Policy::RandomAccess]).map_err(err)?;
        let (learn, random) = (mean(&runs[0]), mean(&runs[1]));
        let ratio = learn / random;
        if ratio < 1.2 {
            return Err(format!("{name}: learning/random = {ratio:.3}"));
        }
        let sweep: Vec<Policy> = cfg
            .learning
            .gamma_sweep
            .iter()
            .map(|&g| Policy::Learning { gamma: g })
            .collect();
        let curve: Vec<f64> = replicate(&cfg, &sweep)
            .map_err(err)?
            .iter()
            .map(|r| mean(r))
            .collect();
        if !has_interior_peak(&curve) {
            return Err(format!("{name}: sweep {curve:?} has no interior peak"));
        }
        let peak = cfg.learning.gamma_sweep[ssag_core::math::argmax(&curve)];
        parts.push(format!(
            "{name} +{:.1}%, peak at gamma {peak}",
            100.0 * (ratio - 1.0)
        ));
    }
    Ok(parts.join("; "))
}

fn main() -> ExitCode {
    let mut pool = Pool::default();
    let mut fixed = Vec::new();
    let mut failed = 0;
    let mut report = |id: usize, name: &str, budget: Duration, f: &mut dyn FnMut() -> Verdict| {
        let t = Instant::now();
        let mut v = f();
        let took = t.elapsed();
        if v.is_ok() && took > budget {
            v = Err(format!("took {took:.1?}, budget {budget:?}"));
        }
        match v {
            Ok(msg) => println!("PASS {id:>2} {name}: {msg} ({took:.2?})"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {id:>2} {name}: {msg} ({took:.2?})");
            }
        }
    };
    let secs = Duration::from_secs;

    report(
        1,
        "three-cycle without pure equilibrium",
        secs(1),
        &mut three_cycle,
    );
    pool.dags = dag_instances();
    report(2, "DAG existence", secs(30), &mut || dag_existence(&pool));
    pool.trees = tree_instances();
    report(3, "tree existence under congestion", secs(60), &mut || {
        tree_existence(&pool)
    });
    pool.potential = potential_instances();
    report(4, "potential sign equivalence", secs(60), &mut || {
        potential_signs(&pool)
    });
    report(5, "finite improvement", secs(60), &mut || {
        finite_improvement(&pool)
    });
    report(6, "price of anarchy bound", secs(120), &mut || {
        poa_bound(&pool)
    });
    report(
        7,
        "estimator consistency",
        secs(10),
        &mut estimator_consistency,
    );
    report(8, "contraction and fixed point", secs(30), &mut || {
        contraction(&mut fixed)
    });
    report(9, "entropy gap certificate", secs(30), &mut || {
        gap_certificate(&fixed)
    });
    report(10, "learning tracks mean dynamics", secs(300), &mut || {
        tracks_mean_dynamics(&fixed)
    });
    report(
        11,
        "nine-user qualitative reproduction",
        secs(900),
        &mut reproduction,
    );

    if failed == 0 {
        println!("all 11 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{failed} of 11 criteria failed");
        ExitCode::FAILURE
    }
}
