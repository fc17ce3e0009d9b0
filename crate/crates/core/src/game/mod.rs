//! The spatial spectrum access game: payoffs, pure equilibria, constructive
//! equilibria on special graph classes, potential functions and efficiency.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::graph::DirectedInterferenceGraph;
use crate::model::{backoff_grab, ContentionMechanism};

mod construct;
mod equilibrium;
mod payoff;
mod physical;
mod poa;
mod potential;

pub use construct::{construct_ne_bipartite, construct_ne_dag, construct_ne_directed_tree, TreeConstruction};
pub use equilibrium::{
    best_response, better_response_dynamics, enumerate_pure_ne, is_pure_ne, BrdOutcome, BrdStep,
    Deviation, NeCheck, MAX_PROFILES,
};
pub use payoff::{
    expected_payoff_matrix, neighborhood_expected_payoff, neighborhood_expected_payoff_mc,
    payoff_mixed, payoff_mixed_by_enumeration, MAX_SUBSET_NEIGHBORS,
};
pub use physical::PhysicalSpec;
pub use poa::{no_equilibrium_certificate, poa_lower_bound, social_welfare_and_poa, NoEquilibriumCertificate, PoaReport};
pub use potential::{potential_value, PotentialVariant};

/// Anything with per-user channel payoffs determined by a pure profile.
pub trait Game {
    fn n_users(&self) -> usize;
    fn n_channels(&self) -> usize;

    /// Payoff of `n` if it plays `m` while everyone else plays as in `a`.
    fn payoff_deviating(&self, a: &[usize], n: usize, m: usize) -> f64;

    fn payoff(&self, a: &[usize], n: usize) -> f64 {
        self.payoff_deviating(a, n, a[n])
    }

    fn welfare(&self, a: &[usize]) -> f64 {
        (0..self.n_users()).map(|n| self.payoff(a, n)).sum()
    }

    fn check_profile(&self, a: &[usize]) -> Result<()> {
        if a.len() != self.n_users() {
            return Err(invalid(format!(
                "profile has {} entries for {} users",
                a.len(),
                self.n_users()
            )));
        }
        if let Some((n, &m)) = a.iter().enumerate().find(|&(_, &m)| m >= self.n_channels()) {
            return Err(invalid(format!(
                "user {n} plays channel {m}, only {} channels exist",
                self.n_channels()
            )));
        }
        Ok(())
    }
}

/// Channel index chosen by each user.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StrategyProfile(pub Vec<usize>);

impl StrategyProfile {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl core::ops::Deref for StrategyProfile {
    type Target = [usize];
    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for StrategyProfile {
    fn from(v: Vec<usize>) -> Self {
        StrategyProfile(v)
    }
}

/// Per-user probability rows over channels.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedProfile {
    rows: Vec<Vec<f64>>,
}

const ROW_SUM_TOL: f64 = 1e-9;

impl MixedProfile {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        for (n, row) in rows.iter().enumerate() {
            if row.len() != width || width == 0 {
                return Err(invalid(format!("row {n} has {} entries, expected {width}", row.len())));
            }
            if row.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(invalid(format!("row {n} has a negative or non-finite entry")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > ROW_SUM_TOL {
                return Err(invalid(format!("row {n} sums to {s}")));
            }
        }
        Ok(Self { rows })
    }

    pub fn uniform(n_users: usize, n_channels: usize) -> Self {
        let p = 1.0 / n_channels as f64;
        Self {
            rows: vec![vec![p; n_channels]; n_users],
        }
    }

    /// Degenerate rows putting all mass on `a`.
    pub fn pure(a: &[usize], n_channels: usize) -> Self {
        let rows = a
            .iter()
            .map(|&m| {
                let mut r = vec![0.0; n_channels];
                r[m] = 1.0;
                r
            })
            .collect();
        Self { rows }
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.rows[n]
    }

    pub fn n_users(&self) -> usize {
        self.rows.len()
    }

    pub fn n_channels(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub(crate) fn from_rows_unchecked(rows: Vec<Vec<f64>>) -> Self {
        Self { rows }
    }
}

/// Complete description of a protocol-model game.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    graph: DirectedInterferenceGraph,
    theta: Vec<f64>,
    mean_rate: Vec<Vec<f64>>,
    gain: Vec<f64>,
    mechanism: ContentionMechanism,
    /// `g(k)` for count-only mechanisms, `k` up to the largest in-degree.
    count_table: Vec<f64>,
}

impl GameSpec {
    /// `mean_rate[n][m]` is `B_m^n`; `gain` defaults to all ones.
    pub fn new(
        graph: DirectedInterferenceGraph,
        theta: Vec<f64>,
        mean_rate: Vec<Vec<f64>>,
        gain: Option<Vec<f64>>,
        mechanism: ContentionMechanism,
    ) -> Result<Self> {
        let n = graph.n_users();
        let m = theta.len();
        if m == 0 {
            return Err(invalid("at least one channel is required"));
        }
        if let Some(t) = theta.iter().find(|t| !(t.is_finite() && (0.0..=1.0).contains(*t))) {
            return Err(invalid(format!("idle probability {t} not in [0, 1]")));
        }
        if mean_rate.len() != n {
            return Err(invalid(format!("{} rate rows for {n} users", mean_rate.len())));
        }
        for (u, row) in mean_rate.iter().enumerate() {
            if row.len() != m {
                return Err(invalid(format!("user {u} has {} rates for {m} channels", row.len())));
            }
            if let Some(b) = row.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
                return Err(invalid(format!("mean rate {b} of user {u} is not positive")));
            }
        }
        let gain = gain.unwrap_or_else(|| vec![1.0; n]);
        if gain.len() != n {
            return Err(invalid(format!("{} gains for {n} users", gain.len())));
        }
        if let Some(h) = gain.iter().find(|h| !(h.is_finite() && **h > 0.0)) {
            return Err(invalid(format!("gain {h} is not positive")));
        }
        mechanism.validate(n)?;
        let count_table = count_table(&mechanism, graph.max_in_degree());
        Ok(Self {
            graph,
            theta,
            mean_rate,
            gain,
            mechanism,
            count_table,
        })
    }

    /// Same game with the idle probabilities replaced.
    pub fn with_theta(&self, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != self.n_channels() {
            return Err(invalid("replacement theta has the wrong length"));
        }
        if theta.iter().any(|t| !(t.is_finite() && (0.0..=1.0).contains(t))) {
            return Err(invalid("replacement theta is not a probability vector"));
        }
        let mut s = self.clone();
        s.theta = theta;
        Ok(s)
    }

    pub fn graph(&self) -> &DirectedInterferenceGraph {
        &self.graph
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn mean_rate(&self) -> &[Vec<f64>] {
        &self.mean_rate
    }

    pub fn gain(&self) -> &[f64] {
        &self.gain
    }

    pub fn mechanism(&self) -> &ContentionMechanism {
        &self.mechanism
    }

    /// Interference-free payoff `h_n θ_m B_m^n`.
    pub fn base_value(&self, n: usize, m: usize) -> f64 {
        self.gain[n] * self.theta[m] * self.mean_rate[n][m]
    }

    /// `g(k)` for count-only mechanisms.
    pub(crate) fn count_grab(&self, k: usize) -> f64 {
        match self.count_table.get(k) {
            Some(&g) => g,
            None => match self.mechanism {
                ContentionMechanism::Backoff { lambda_max } => backoff_grab(lambda_max, k),
                _ => 1.0 / (1.0 + k as f64),
            },
        }
    }

    /// `g_n` of user `n` on channel `m` against the in-neighbors that play
    /// `m` in `a` (the entry `a[n]` is ignored).
    pub(crate) fn grab_on(&self, a: &[usize], n: usize, m: usize) -> f64 {
        let nbrs = self.graph.in_nbrs(n);
        match &self.mechanism {
            ContentionMechanism::Backoff { .. } | ContentionMechanism::BackoffAsymptotic => {
                let k = nbrs.iter().filter(|&&i| a[i] == m).count();
                self.count_grab(k)
            }
            ContentionMechanism::WeightedShare { weights } => {
                let others: f64 = nbrs.iter().filter(|&&i| a[i] == m).map(|&i| weights[i]).sum();
                weights[n] / (weights[n] + others)
            }
            ContentionMechanism::Aloha { p } => nbrs
                .iter()
                .filter(|&&i| a[i] == m)
                .fold(p[n], |acc, &i| acc * (1.0 - p[i])),
        }
    }

    /// Checked pure payoff.
    pub fn payoff_pure(&self, a: &[usize], n: usize) -> Result<f64> {
        self.check_profile(a)?;
        if n >= self.n_users() {
            return Err(invalid(format!("user {n} out of range")));
        }
        Ok(self.payoff(a, n))
    }

    /// Co-channel in-neighbors of `n` on channel `m`.
    pub fn co_channel_in_neighbors(&self, a: &[usize], n: usize, m: usize) -> Vec<usize> {
        self.graph.in_nbrs(n).iter().copied().filter(|&i| a[i] == m).collect()
    }
}

fn count_table(mechanism: &ContentionMechanism, max_k: usize) -> Vec<f64> {
    match mechanism {
        ContentionMechanism::Backoff { lambda_max } => {
            (0..=max_k).map(|k| backoff_grab(*lambda_max, k)).collect()
        }
        ContentionMechanism::BackoffAsymptotic => (0..=max_k).map(|k| 1.0 / (1.0 + k as f64)).collect(),
        _ => Vec::new(),
    }
}

impl Game for GameSpec {
    fn n_users(&self) -> usize {
        self.graph.n_users()
    }

    fn n_channels(&self) -> usize {
        self.theta.len()
    }

    fn payoff_deviating(&self, a: &[usize], n: usize, m: usize) -> f64 {
        let base = self.base_value(n, m);
        if base == 0.0 {
            return 0.0;
        }
        base * self.grab_on(a, n, m)
    }
}

/// Iterates all profiles of `n` users over `m` channels in lexicographic
/// order (user 0 most significant).
pub(crate) struct ProfileOdometer {
    current: Vec<usize>,
    m: usize,
    started: bool,
    done: bool,
}

impl ProfileOdometer {
    pub(crate) fn new(n: usize, m: usize) -> Self {
        Self {
            current: vec![0; n],
            m,
            started: false,
            done: m == 0,
        }
    }

    /// Advances and returns the next profile.
    pub(crate) fn advance(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.current);
        }
        for k in (0..self.current.len()).rev() {
            self.current[k] += 1;
            if self.current[k] < self.m {
                return Some(&self.current);
            }
            self.current[k] = 0;
        }
        self.done = true;
        None
    }
}

/// `m^n` if it does not exceed `cap`.
pub(crate) fn profile_count(n: usize, m: usize, cap: u64) -> Result<u64> {
    let mut total: u64 = 1;
    for _ in 0..n {
        total = total.saturating_mul(m as u64);
        if total > cap {
            return Err(crate::Error::ResourceLimit {
                what: "pure profiles",
                required: total,
                limit: cap,
            });
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(theta: f64, b: f64) -> GameSpec {
        GameSpec::new(
            DirectedInterferenceGraph::empty(1).unwrap(),
            vec![theta],
            vec![vec![b]],
            None,
            ContentionMechanism::Backoff { lambda_max: 10 },
        )
        .unwrap()
    }

    #[test]
    fn lone_user_payoff() {
        assert_eq!(single(0.5, 10e6).payoff_pure(&[0], 0).unwrap(), 5e6);
        assert_eq!(single(0.0, 10e6).payoff_pure(&[0], 0).unwrap(), 0.0);
    }

    #[test]
    fn three_cycle_all_on_one_channel() {
        let g = DirectedInterferenceGraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let p = 0.4;
        let spec = GameSpec::new(
            g,
            vec![1.0, 1.0],
            vec![vec![1.0, 1.0]; 3],
            None,
            ContentionMechanism::Aloha { p: vec![p; 3] },
        )
        .unwrap();
        for n in 0..3 {
            let u = spec.payoff_pure(&[0, 0, 0], n).unwrap();
            assert!((u - p * (1.0 - p)).abs() < 1e-15);
        }
    }

    #[test]
    fn spec_validation() {
        let g = DirectedInterferenceGraph::empty(2).unwrap();
        let mech = ContentionMechanism::BackoffAsymptotic;
        assert!(GameSpec::new(g.clone(), vec![-0.1], vec![vec![1.0]; 2], None, mech.clone()).is_err());
        assert!(GameSpec::new(g.clone(), vec![0.5], vec![vec![1.0]], None, mech.clone()).is_err());
        assert!(GameSpec::new(g.clone(), vec![0.5], vec![vec![0.0]; 2], None, mech.clone()).is_err());
        assert!(GameSpec::new(g.clone(), vec![0.5], vec![vec![1.0]; 2], Some(vec![1.0]), mech).is_err());
        let aloha = ContentionMechanism::Aloha { p: vec![0.5] };
        assert!(GameSpec::new(g, vec![0.5], vec![vec![1.0]; 2], None, aloha).is_err());
    }

    #[test]
    fn profile_checks() {
        let s = single(0.5, 1.0);
        assert!(s.payoff_pure(&[1], 0).is_err());
        assert!(s.payoff_pure(&[0, 0], 0).is_err());
    }

    #[test]
    fn odometer_is_lexicographic() {
        let mut od = ProfileOdometer::new(2, 3);
        let mut seen = Vec::new();
        while let Some(p) = od.advance() {
            seen.push(p.to_vec());
        }
        assert_eq!(seen.len(), 9);
        assert_eq!(seen[1], vec![0, 1]);
        assert_eq!(seen[3], vec![1, 0]);
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn mixed_profile_validation() {
        assert!(MixedProfile::new(vec![vec![0.5, 0.5]]).is_ok());
        assert!(MixedProfile::new(vec![vec![0.5, 0.6]]).is_err());
        assert!(MixedProfile::new(vec![vec![1.5, -0.5]]).is_err());
        assert!(MixedProfile::new(vec![vec![1.0], vec![0.5, 0.5]]).is_err());
    }
}
