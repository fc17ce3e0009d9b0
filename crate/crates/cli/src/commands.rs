//! Subcommand implementations. Each returns report tables plus a short
//! human-readable summary; nothing here touches the filesystem.

use anyhow::{anyhow, bail, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use ssag_core::estimation::estimate_throughput;
use ssag_core::game::{
    better_response_dynamics, construct_ne_bipartite, construct_ne_dag, construct_ne_directed_tree,
    enumerate_pure_ne, is_pure_ne, potential_value, social_welfare_and_poa, Game, PotentialVariant,
};
use ssag_core::learning::{
    approx_ne_gap, contraction_temperature_bound, mean_dynamics_fixed_point, GammaBound,
};
use ssag_core::model::{satisfies_congestion_property, GrabModel};
use ssag_core::simulator::{
    replication_seed, run_policy, simulate_period, summarize, Policy, SimState,
};
use ssag_core::{math, Error, GameSpec};

use crate::config::{ExperimentConfig, PolicyConfig};
use crate::report::{num, Table};

/// Everything a command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub tables: Vec<(String, Table)>,
    pub summary: Vec<String>,
    /// False when a verification inside the command failed.
    pub ok: bool,
}

impl Outcome {
    fn new() -> Self {
        Self {
            ok: true,
            ..Default::default()
        }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.summary.push(s.into());
    }

    fn table(&mut self, name: &str, t: Table) {
        self.tables.push((name.to_string(), t));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Classify,
    Solve,
    PotentialCheck,
    Poa,
    Estimate,
    Learn,
    Simulate,
    Compare,
    GammaSweep,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Classify,
        Command::Solve,
        Command::PotentialCheck,
        Command::Poa,
        Command::Estimate,
        Command::Learn,
        Command::Simulate,
        Command::Compare,
        Command::GammaSweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Solve => "solve",
            Command::PotentialCheck => "potential-check",
            Command::Poa => "poa",
            Command::Estimate => "estimate",
            Command::Learn => "learn",
            Command::Simulate => "simulate",
            Command::Compare => "compare",
            Command::GammaSweep => "gamma-sweep",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| anyhow!("unknown command `{s}`"))
    }
}

pub fn run_command(cmd: Command, cfg: &ExperimentConfig) -> Result<Outcome> {
    match cmd {
        Command::Classify => classify(cfg),
        Command::Solve => solve(cfg),
        Command::PotentialCheck => potential_check(cfg),
        Command::Poa => poa(cfg),
        Command::Estimate => estimate(cfg),
        Command::Learn => learn(cfg),
        Command::Simulate => simulate(cfg),
        Command::Compare => compare(cfg),
        Command::GammaSweep => gamma_sweep(cfg),
    }
}

fn profile_string(a: &[usize]) -> String {
    a.iter()
        .map(|c| (c + 1).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn satisfies_cp(spec: &GameSpec) -> bool {
    let g = spec.graph();
    (0..spec.n_users()).all(|n| {
        satisfies_congestion_property(spec.mechanism(), n, g.in_neighbors(n).unwrap_or(&[]))
    })
}

/// Structural reasons a pure equilibrium must exist.
pub fn guarantees(spec: &GameSpec) -> Vec<String> {
    let class = spec.graph().classify();
    let mut out = Vec::new();
    if class.is_acyclic() {
        out.push("pure NE exists: acyclic interference graph".to_string());
    }
    if class.is_tree_or_forest() && satisfies_cp(spec) {
        out.push("pure NE exists: tree skeleton and congestion property".to_string());
    }
    for v in PotentialVariant::ALL {
        if v.check_hypotheses(spec).is_ok() {
            out.push(format!(
                "potential game ({}): pure NE exists, finite improvement",
                v.name()
            ));
        }
    }
    if class.bipartition().is_some() && construct_ne_bipartite(spec).is_ok() {
        out.push("pure NE constructible: bipartite graph with random backoff".to_string());
    }
    out
}

fn classify(cfg: &ExperimentConfig) -> Result<Outcome> {
    let spec = cfg.game_spec()?;
    let class = spec.graph().classify();
    let mut out = Outcome::new();
    let mut t = Table::new(&["kind", "value"]);
    let names = class.names();
    out.line(format!("classes: {}", names.join(", ")));
    for n in &names {
        t.push(["class", n]);
    }
    let g = guarantees(&spec);
    if g.is_empty() {
        out.line("no structural pure-NE guarantee");
        t.push(["guarantee", "none"]);
    }
    for s in g {
        out.line(s.clone());
        t.push(["guarantee".to_string(), s]);
    }
    out.table("classify", t);
    Ok(out)
}

fn start_profile(cfg: &ExperimentConfig) -> Vec<usize> {
    cfg.solver
        .start
        .as_deref()
        .map(ExperimentConfig::zero_based)
        .unwrap_or_else(|| vec![0; cfg.n_users()])
}

fn solve(cfg: &ExperimentConfig) -> Result<Outcome> {
    let spec = cfg.game_spec()?;
    let class = spec.graph().classify();
    let mut out = Outcome::new();
    let (method, profile) = if class.is_acyclic() {
        ("dag-construction", Some(construct_ne_dag(&spec)?.0))
    } else if class.is_tree_or_forest() && satisfies_cp(&spec) {
        let t = construct_ne_directed_tree(&spec)?;
        let m = if t.used_fallback {
            "tree-construction (enumeration fallback)"
        } else {
            "tree-construction"
        };
        (m, Some(t.profile.0))
    } else if let Ok(a) = construct_ne_bipartite(&spec) {
        ("bipartite-construction", Some(a.0))
    } else if PotentialVariant::ALL
        .iter()
        .any(|v| v.check_hypotheses(&spec).is_ok())
    {
        let b = better_response_dynamics(&spec, &start_profile(cfg), cfg.solver.brd_max_rounds)?;
        (
            "better-response (potential game)",
            b.converged.then_some(b.profile.0),
        )
    } else {
        let b = better_response_dynamics(&spec, &start_profile(cfg), cfg.solver.brd_max_rounds)?;
        if b.converged {
            ("better-response", Some(b.profile.0))
        } else {
            match enumerate_pure_ne(&spec) {
                Ok(v) => ("enumeration", v.into_iter().next().map(|p| p.0)),
                Err(Error::ResourceLimit { .. }) => ("better-response (not converged)", None),
                Err(e) => return Err(e.into()),
            }
        }
    };
    out.line(format!("method: {method}"));
    let mut t = Table::new(&["user", "channel", "payoff_bps"]);
    match profile {
        Some(a) => {
            let check = is_pure_ne(&spec, &a)?;
            out.line(format!("profile: {}", profile_string(&a)));
            out.line(format!("verification: is_pure_ne = {}", check.is_ne));
            if let Some(w) = check.witness {
                out.line(format!(
                    "user {} gains {} by moving to channel {}",
                    w.user + 1,
                    w.gain * cfg.learning.payoff_unit_bps,
                    w.channel + 1
                ));
            }
            out.ok = check.is_ne;
            for (n, &m) in a.iter().enumerate() {
                t.push([
                    (n + 1).to_string(),
                    (m + 1).to_string(),
                    num(spec.payoff(&a, n) * cfg.learning.payoff_unit_bps),
                ]);
            }
        }
        None => out.line("no pure equilibrium found"),
    }
    out.table("solve", t);
    Ok(out)
}

fn sign(x: f64, scale: f64) -> i8 {
    if x.abs() <= math::REL_TOL * scale {
        0
    } else if x > 0.0 {
        1
    } else {
        -1
    }
}

/// Counts deviations whose payoff change and potential change disagree in
/// sign; exhaustive when the profile space is small, sampled otherwise.
pub fn check_potential(
    spec: &GameSpec,
    variant: PotentialVariant,
    max_profiles: u64,
    samples: usize,
    seed: u64,
) -> Result<(u64, u64, bool)> {
    let (n, m) = (spec.n_users(), spec.n_channels());
    let mut checked = 0u64;
    let mut bad = 0u64;
    let mut one = |a: &[usize], user: usize, c: usize| -> Result<()> {
        let mut b = a.to_vec();
        b[user] = c;
        let (u0, u1) = (spec.payoff(a, user), spec.payoff(&b, user));
        let (p0, p1) = (
            potential_value(spec, a, variant)?,
            potential_value(spec, &b, variant)?,
        );
        checked += 1;
        if sign(u1 - u0, u0.abs().max(u1.abs())) != sign(p1 - p0, p0.abs().max(p1.abs())) {
            bad += 1;
        }
        Ok(())
    };
    let total = (m as u64)
        .checked_pow(n as u32)
        .filter(|&t| t <= max_profiles);
    if let Some(total) = total {
        let mut a = vec![0usize; n];
        for code in 0..total {
            let mut c = code;
            for k in (0..n).rev() {
                a[k] = (c % m as u64) as usize;
                c /= m as u64;
            }
            for user in 0..n {
                for ch in (0..m).filter(|&ch| ch != a[user]) {
                    one(&a, user, ch)?;
                }
            }
        }
        Ok((checked, bad, true))
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let a: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
            let user = rng.gen_range(0..n);
            let ch = rng.gen_range(0..m);
            one(&a, user, ch)?;
        }
        Ok((checked, bad, false))
    }
}

fn potential_check(cfg: &ExperimentConfig) -> Result<Outcome> {
    let spec = cfg.game_spec()?;
    let mut out = Outcome::new();
    let mut t = Table::new(&[
        "variant",
        "applicable",
        "mode",
        "deviations",
        "mismatches",
        "note",
    ]);
    for v in PotentialVariant::ALL {
        match v.check_hypotheses(&spec) {
            Err(e) => t.push([
                v.name().to_string(),
                "false".into(),
                "-".into(),
                "0".into(),
                "0".into(),
                e.to_string(),
            ]),
            Ok(()) => {
                let (checked, bad, exhaustive) = check_potential(
                    &spec,
                    v,
                    cfg.solver.max_profiles,
                    cfg.solver.deviation_samples,
                    cfg.seed,
                )?;
                let mode = if exhaustive { "exhaustive" } else { "sampled" };
                out.line(format!(
                    "{}: {checked} deviations ({mode}), {bad} sign mismatches",
                    v.name()
                ));
                if bad > 0 {
                    out.ok = false;
                }
                t.push([
                    v.name().to_string(),
                    "true".into(),
                    mode.into(),
                    checked.to_string(),
                    bad.to_string(),
                    String::new(),
                ]);
            }
        }
    }
    if out.summary.is_empty() {
        out.line("no potential function applies to this scenario");
    }
    out.table("potential_check", t);
    Ok(out)
}

fn poa(cfg: &ExperimentConfig) -> Result<Outcome> {
    let spec = cfg.game_spec()?;
    let unit = cfg.learning.payoff_unit_bps;
    let mut out = Outcome::new();
    let mut t = Table::new(&["metric", "value"]);
    match social_welfare_and_poa(&spec) {
        Ok(r) => {
            out.line(format!(
                "PoA = {} (lower bound {}), {} pure equilibria",
                r.poa, r.lower_bound, r.n_equilibria
            ));
            out.line(format!("bound holds: {}", r.bound_holds));
            out.ok = r.bound_holds;
            t.push([
                "optimal_welfare_bps".to_string(),
                num(r.optimal_welfare * unit),
            ]);
            t.push([
                "optimal_profile".to_string(),
                profile_string(&r.optimal_profile),
            ]);
            t.push([
                "worst_ne_welfare_bps".to_string(),
                num(r.worst_ne_welfare * unit),
            ]);
            t.push([
                "worst_ne_profile".to_string(),
                profile_string(&r.worst_ne_profile),
            ]);
            t.push(["n_equilibria".to_string(), r.n_equilibria.to_string()]);
            t.push(["poa".to_string(), num(r.poa)]);
            t.push(["lower_bound".to_string(), num(r.lower_bound)]);
            t.push(["bound_holds".to_string(), r.bound_holds.to_string()]);
        }
        Err(Error::NoPureEquilibrium { profiles }) => {
            out.line(format!(
                "no pure equilibrium among {profiles} profiles; PoA undefined"
            ));
            t.push(["n_equilibria".to_string(), "0".to_string()]);
        }
        Err(e) => return Err(e.into()),
    }
    out.table("poa", t);
    Ok(out)
}

fn estimate(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut scenario = cfg.scenario()?;
    scenario.t_max = cfg.estimate.slots;
    let spec = scenario.game_spec()?;
    let unit = scenario.payoff_unit;
    let a = cfg
        .estimate
        .profile
        .as_deref()
        .map(ExperimentConfig::zero_based)
        .unwrap_or_else(|| vec![0; cfg.n_users()]);
    let mut state = SimState::new(&scenario, cfg.seed)?;
    let traces = simulate_period(&scenario, &mut state, &a)?;
    let mut noise_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    noise_rng.set_stream(3);
    let mut out = Outcome::new();
    let mut t = Table::new(&[
        "user",
        "channel",
        "theta",
        "theta_hat",
        "grab",
        "grab_hat",
        "rate_bps",
        "rate_hat_bps",
        "throughput_bps",
        "throughput_hat_bps",
    ]);
    for (n, obs) in traces.iter().enumerate() {
        let m = a[n];
        let theta = spec.theta()[m];
        let contenders = spec.co_channel_in_neighbors(&a, n, m);
        let grab = spec.mechanism().grab(n, &contenders);
        let rate = scenario.rates[n][m].mean() * scenario.gain[n];
        let truth = spec.payoff(&a, n) * unit;
        let fmt_opt = |x: Option<f64>| x.map(num).unwrap_or_else(|| "NA".to_string());
        match estimate_throughput(obs, scenario.idle_estimator, scenario.noise, &mut noise_rng) {
            Ok(e) => {
                out.line(format!(
                    "user {}: theta {:.4} (true {:.4}), grab {:.4} (true {:.4}), throughput {:.4e} bits/s (true {:.4e})",
                    n + 1,
                    e.theta_hat,
                    theta,
                    e.grab_hat,
                    grab,
                    e.throughput_hat,
                    truth
                ));
                t.push([
                    (n + 1).to_string(),
                    (m + 1).to_string(),
                    num(theta),
                    num(e.theta_hat),
                    num(grab),
                    num(e.grab_hat),
                    num(rate),
                    fmt_opt(e.rate_hat),
                    num(truth),
                    num(e.throughput_hat),
                ]);
            }
            Err(err) => {
                out.line(format!("user {}: estimate undefined ({err})", n + 1));
                t.push([
                    (n + 1).to_string(),
                    (m + 1).to_string(),
                    num(theta),
                    "NA".into(),
                    num(grab),
                    "NA".into(),
                    num(rate),
                    "NA".into(),
                    num(truth),
                    "NA".into(),
                ]);
            }
        }
    }
    out.table("estimate", t);
    Ok(out)
}

fn learn(cfg: &ExperimentConfig) -> Result<Outcome> {
    let scenario = cfg.scenario()?;
    let spec = scenario.game_spec()?;
    let unit = scenario.payoff_unit;
    let gamma = cfg.learning.gamma;
    let run = run_policy(
        &scenario,
        &Policy::Learning { gamma },
        &cfg.run_config(cfg.seed),
    )?;
    let lo = run.learning.as_ref().expect("learning run has an outcome");
    let mut out = Outcome::new();
    match contraction_temperature_bound(&spec) {
        GammaBound::Finite(b) => out.line(format!(
            "contraction bound on gamma: {b:.6e} ({})",
            if gamma < b {
                "gamma is below it"
            } else {
                "gamma is not below it"
            }
        )),
        GammaBound::Unbounded => out.line("contraction bound on gamma: none (no interference)"),
    }
    out.line(format!(
        "mean welfare {:.6e} bits/s over {} periods",
        run.mean_welfare() * unit,
        lo.periods
    ));
    match lo.converged_at {
        Some(t) => out.line(format!("perceptions settled at period {t}")),
        None => out.line("perceptions did not settle within the run"),
    }
    match mean_dynamics_fixed_point(&spec, gamma, 1e-10, 10_000, None) {
        Ok(fp) if fp.converged => {
            let d = math::max_abs_diff(&lo.perceptions, &fp.perceptions);
            out.line(format!(
                "distance to mean-dynamics fixed point: {:.6e} bits/s",
                d * unit
            ));
            let gap = approx_ne_gap(&spec, &fp.sigma, gamma)?;
            out.line(format!(
                "fixed point gap: delta {:.6e} bits/s, largest best-response gain {:.6e} bits/s, certified {}",
                gap.delta * unit,
                gap.best_response_gain.iter().copied().fold(0.0, f64::max) * unit,
                gap.certified
            ));
        }
        Ok(_) => out.line("mean dynamics did not reach a fixed point"),
        Err(e) => out.line(format!("mean dynamics unavailable: {e}")),
    }
    let mut t = Table::new(&["user", "channel", "perception_bps", "probability"]);
    for n in 0..cfg.n_users() {
        for m in 0..cfg.n_channels() {
            t.push([
                (n + 1).to_string(),
                (m + 1).to_string(),
                num(lo.perceptions[n][m] * unit),
                num(lo.sigma.row(n)[m]),
            ]);
        }
    }
    out.table("learn_strategy", t);
    if cfg.output.traces {
        out.table("learn_trace", welfare_trace(&run.welfare, unit));
    }
    Ok(out)
}

fn welfare_trace(welfare: &[f64], unit: f64) -> Table {
    let mut t = Table::new(&["period", "welfare_bps"]);
    for (k, w) in welfare.iter().enumerate() {
        t.push([(k + 1).to_string(), num(w * unit)]);
    }
    t
}

fn simulate(cfg: &ExperimentConfig) -> Result<Outcome> {
    let scenario = cfg.scenario()?;
    let unit = scenario.payoff_unit;
    let policy = cfg.policy(&cfg.learning.policy);
    let run = run_policy(&scenario, &policy, &cfg.run_config(cfg.seed))?;
    let mut out = Outcome::new();
    out.line(format!(
        "{}: mean welfare {:.6e} bits/s over {} periods",
        policy.name(),
        run.mean_welfare() * unit,
        run.welfare.len()
    ));
    let mut t = Table::new(&["user", "throughput_bps"]);
    for (n, u) in run.per_user.iter().enumerate() {
        t.push([(n + 1).to_string(), num(u * unit)]);
    }
    out.table("simulate_users", t);
    if cfg.output.traces {
        out.table("simulate_trace", welfare_trace(&run.welfare, unit));
    }
    Ok(out)
}

/// Mean welfare (payoff units) of every (policy, replication) pair, in
/// order, computed in parallel.
pub fn replicate(cfg: &ExperimentConfig, policies: &[Policy]) -> Result<Vec<Vec<f64>>> {
    let scenario = cfg.scenario()?;
    let reps = cfg.learning.replications;
    let jobs: Vec<(usize, usize)> = (0..policies.len())
        .flat_map(|p| (0..reps).map(move |r| (p, r)))
        .collect();
    let results: Vec<Result<f64>> = jobs
        .par_iter()
        .map(|&(p, r)| {
            let rc = cfg.run_config(replication_seed(cfg.seed, r));
            Ok(run_policy(&scenario, &policies[p], &rc)?.mean_welfare())
        })
        .collect();
    let mut out = vec![Vec::with_capacity(reps); policies.len()];
    for ((p, _), res) in jobs.into_iter().zip(results) {
        out[p].push(res?);
    }
    Ok(out)
}

fn compare(cfg: &ExperimentConfig) -> Result<Outcome> {
    if cfg.learning.policies.is_empty() {
        bail!("field `learning.policies`: nothing to compare");
    }
    let unit = cfg.learning.payoff_unit_bps;
    let policies: Vec<Policy> = cfg
        .learning
        .policies
        .iter()
        .map(|p| cfg.policy(p))
        .collect();
    let results = replicate(cfg, &policies)?;
    let mut out = Outcome::new();
    let mut t = Table::new(&[
        "kind",
        "policy",
        "replication",
        "seed",
        "mean_welfare_bps",
        "std_err_bps",
    ]);
    for (p, reps) in policies.iter().zip(&results) {
        for (r, w) in reps.iter().enumerate() {
            t.push([
                "replication".to_string(),
                p.name().to_string(),
                (r + 1).to_string(),
                replication_seed(cfg.seed, r).to_string(),
                num(w * unit),
                String::new(),
            ]);
        }
    }
    let summaries: Vec<_> = policies
        .iter()
        .zip(&results)
        .map(|(p, r)| summarize(p.clone(), r.clone()))
        .collect();
    let random = cfg
        .learning
        .policies
        .iter()
        .position(|p| *p == PolicyConfig::RandomAccess)
        .map(|k| summaries[k].mean);
    for s in &summaries {
        let mut line = format!(
            "{}: {:.6e} ± {:.2e} bits/s",
            s.policy.name(),
            s.mean * unit,
            s.std_err * unit
        );
        if let Some(ra) = random.filter(|&ra| ra > 0.0) {
            line.push_str(&format!(
                " ({:+.1}% vs random access)",
                (s.mean / ra - 1.0) * 100.0
            ));
        }
        out.line(line);
        t.push([
            "summary".to_string(),
            s.policy.name().to_string(),
            String::new(),
            String::new(),
            num(s.mean * unit),
            num(s.std_err * unit),
        ]);
    }
    out.table("compare", t);
    Ok(out)
}

/// True when the sequence has a strict interior maximum, i.e. it is not
/// monotone and peaks away from both ends.
pub fn has_interior_peak(values: &[f64]) -> bool {
    if values.len() < 3 {
        return false;
    }
    let k = math::argmax(values);
    k > 0 && k + 1 < values.len() && values[k] > values[0] && values[k] > values[values.len() - 1]
}

fn gamma_sweep(cfg: &ExperimentConfig) -> Result<Outcome> {
    let unit = cfg.learning.payoff_unit_bps;
    let gammas = &cfg.learning.gamma_sweep;
    if gammas.is_empty() {
        bail!("field `learning.gamma_sweep`: no temperatures given");
    }
    let policies: Vec<Policy> = gammas
        .iter()
        .map(|&g| Policy::Learning { gamma: g })
        .collect();
    let results = replicate(cfg, &policies)?;
    let mut out = Outcome::new();
    let mut t = Table::new(&["gamma", "mean_welfare_bps", "std_err_bps"]);
    let mut means = Vec::new();
    for (g, r) in gammas.iter().zip(results) {
        let s = summarize(Policy::Learning { gamma: *g }, r);
        out.line(format!(
            "gamma {g}: {:.6e} ± {:.2e} bits/s",
            s.mean * unit,
            s.std_err * unit
        ));
        t.push([g.to_string(), num(s.mean * unit), num(s.std_err * unit)]);
        means.push(s.mean);
    }
    if has_interior_peak(&means) {
        out.line(format!(
            "interior peak at gamma {}",
            gammas[math::argmax(&means)]
        ));
    } else {
        out.line("no interior peak");
    }
    out.table("gamma_sweep", t);
    Ok(out)
}
