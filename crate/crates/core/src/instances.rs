//! Random instance generators for experiments and tests.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::game::{GameSpec, PhysicalSpec, PotentialVariant};
use crate::graph::DirectedInterferenceGraph;
use crate::model::ContentionMechanism;

/// Random DAG: edges only go forward in a random ordering of the users.
pub fn random_dag<R: Rng + ?Sized>(n: usize, edge_prob: f64, rng: &mut R) -> Result<DirectedInterferenceGraph> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(edge_prob) {
                edges.push((order[i], order[j]));
            }
        }
    }
    DirectedInterferenceGraph::new(n, edges)
}

/// Random graph whose skeleton is a tree or forest; each skeleton edge is
/// oriented one way, the other way, or both.
pub fn random_forest<R: Rng + ?Sized>(n: usize, attach_prob: f64, rng: &mut R) -> Result<DirectedInterferenceGraph> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 1..n {
        if !rng.gen_bool(attach_prob) {
            continue;
        }
        let (u, v) = (order[rng.gen_range(0..i)], order[i]);
        match rng.gen_range(0..3) {
            0 => edges.push((u, v)),
            1 => edges.push((v, u)),
            _ => edges.extend([(u, v), (v, u)]),
        }
    }
    DirectedInterferenceGraph::new(n, edges)
}

/// Erdős–Rényi undirected graph.
pub fn random_undirected<R: Rng + ?Sized>(n: usize, edge_prob: f64, rng: &mut R) -> Result<DirectedInterferenceGraph> {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(edge_prob) {
                pairs.push((i, j));
            }
        }
    }
    DirectedInterferenceGraph::undirected(n, pairs)
}

/// Random directed graph; each ordered pair is an edge independently.
pub fn random_directed<R: Rng + ?Sized>(n: usize, edge_prob: f64, rng: &mut R) -> Result<DirectedInterferenceGraph> {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(edge_prob) {
                edges.push((i, j));
            }
        }
    }
    DirectedInterferenceGraph::new(n, edges)
}

pub fn complete_undirected(n: usize) -> Result<DirectedInterferenceGraph> {
    let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
    DirectedInterferenceGraph::undirected(n, pairs)
}

/// Idle probabilities uniform on `[0.1, 1]`.
pub fn random_theta<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<f64> {
    (0..m).map(|_| rng.gen_range(0.1..=1.0)).collect()
}

/// Heterogeneous mean rates uniform on `[1, 10]`.
pub fn random_rates<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..m).map(|_| rng.gen_range(1.0..=10.0)).collect()).collect()
}

/// Rates `c_n B_m` with `B_m` on `[1, 10]` and `c_n` on `[0.5, 2]`.
pub fn proportional_rates<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let base: Vec<f64> = (0..m).map(|_| rng.gen_range(1.0..=10.0)).collect();
    (0..n)
        .map(|_| {
            let c = rng.gen_range(0.5..=2.0);
            base.iter().map(|b| c * b).collect()
        })
        .collect()
}

/// Rates that depend on the user only.
pub fn user_only_rates<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Vec<Vec<f64>> {
    (0..n).map(|_| vec![rng.gen_range(1.0..=10.0); m]).collect()
}

pub fn random_aloha<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ContentionMechanism {
    ContentionMechanism::Aloha {
        p: (0..n).map(|_| rng.gen_range(0.1..=0.9)).collect(),
    }
}

pub fn random_weighted<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ContentionMechanism {
    ContentionMechanism::WeightedShare {
        weights: (0..n).map(|_| rng.gen_range(0.5..=5.0)).collect(),
    }
}

/// Spec with random idle probabilities and heterogeneous rates.
pub fn random_spec<R: Rng + ?Sized>(
    graph: DirectedInterferenceGraph,
    m: usize,
    mechanism: ContentionMechanism,
    rng: &mut R,
) -> Result<GameSpec> {
    let n = graph.n_users();
    let theta = random_theta(m, rng);
    let rates = random_rates(n, m, rng);
    GameSpec::new(graph, theta, rates, None, mechanism)
}

/// Physical-interference instance with users placed in a 100 m square and
/// one idle probability shared by all channels.
pub fn random_physical<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> PhysicalSpec {
    let pos: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)))
        .collect();
    let distance = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| libm::hypot(pos[i].0 - pos[j].0, pos[i].1 - pos[j].1).max(1.0))
                .collect()
        })
        .collect();
    let theta = rng.gen_range(0.1..=1.0);
    PhysicalSpec {
        power: (0..n).map(|_| rng.gen_range(0.05..=0.2)).collect(),
        link_distance: (0..n).map(|_| rng.gen_range(5.0..=20.0)).collect(),
        distance,
        path_loss: 4.0,
        noise: 1e-13,
        primary: (0..n).map(|_| (0..m).map(|_| rng.gen_range(0.0..1e-9)).collect()).collect(),
        bandwidth: 1e6,
        theta: vec![theta; m],
    }
}

/// Random instance satisfying the hypotheses of `variant`: 2 to 5 users,
/// 2 or 3 channels.
pub fn random_potential_instance<R: Rng + ?Sized>(variant: PotentialVariant, rng: &mut R) -> Result<GameSpec> {
    let n = rng.gen_range(2..=5);
    let m = rng.gen_range(2..=3);
    let graph = match variant {
        PotentialVariant::CompleteBackoff => complete_undirected(n)?,
        _ => random_undirected(n, 0.6, rng)?,
    };
    let theta = random_theta(m, rng);
    let (theta, rates, mech) = match variant {
        PotentialVariant::CompleteBackoff => {
            let rates = random_rates(n, m, rng);
            (theta, rates, ContentionMechanism::Backoff { lambda_max: rng.gen_range(2..=10) })
        }
        PotentialVariant::AsymptoticBackoff => (theta, proportional_rates(n, m, rng), ContentionMechanism::BackoffAsymptotic),
        PotentialVariant::WeightedShare => {
            let mech = random_weighted(n, rng);
            (theta, proportional_rates(n, m, rng), mech)
        }
        PotentialVariant::HomogeneousChannels => {
            let rates = user_only_rates(n, m, rng);
            (vec![theta[0]; m], rates, ContentionMechanism::Backoff { lambda_max: rng.gen_range(2..=10) })
        }
        PotentialVariant::Aloha => {
            let mech = random_aloha(n, rng);
            (theta, random_rates(n, m, rng), mech)
        }
    };
    GameSpec::new(graph, theta, rates, None, mech)
}
