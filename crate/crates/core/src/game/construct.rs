//! Direct constructions of pure equilibria on acyclic, tree-like and
//! bipartite interference graphs.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{enumerate_pure_ne, Game, GameSpec, StrategyProfile};
use crate::error::{precondition, Result};
use crate::math::strictly_greater;
use crate::model::{satisfies_congestion_property, ContentionMechanism, GrabModel};

/// Places users in topological order, each best-responding to the
/// in-neighbors already placed.
pub fn construct_ne_dag(spec: &GameSpec) -> Result<StrategyProfile> {
    let order = spec
        .graph()
        .topological_order()
        .ok_or_else(|| precondition("interference graph has a directed cycle"))?;
    let mut a = vec![0usize; spec.n_users()];
    for &u in &order {
        // All in-neighbors of `u` precede it, so `a` is final for them.
        a[u] = super::best_response(spec, &a, u).0;
    }
    Ok(StrategyProfile(a))
}

/// Result of the tree/forest construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeConstruction {
    pub profile: StrategyProfile,
    /// The recursion budget ran out and the profile came from enumeration.
    pub used_fallback: bool,
}

/// Subgame solves allowed before falling back to enumeration.
pub const TREE_SOLVE_BUDGET: usize = 10_000;

/// A contender added to `user`'s grab set whenever it plays `channel`.
#[derive(Debug, Clone, Copy)]
struct Phantom {
    user: usize,
    channel: usize,
    who: usize,
}

struct TreeSolver<'a> {
    spec: &'a GameSpec,
    order: Vec<usize>,
    parent: Vec<Option<usize>>,
    solves: usize,
    buf: Vec<usize>,
}

impl TreeSolver<'_> {
    /// Payoff of `v` on channel `m` against the placed co-channel
    /// in-neighbors plus its phantoms on `m`.
    fn value(&mut self, a: &[Option<usize>], v: usize, m: usize, phantoms: &[Phantom]) -> f64 {
        self.buf.clear();
        let nbrs = self.spec.graph().in_nbrs(v);
        self.buf.extend(nbrs.iter().copied().filter(|&i| a[i] == Some(m)));
        for p in phantoms.iter().filter(|p| p.user == v && p.channel == m) {
            if !self.buf.contains(&p.who) {
                self.buf.push(p.who);
            }
        }
        self.spec.base_value(v, m) * self.spec.mechanism().grab(v, &self.buf)
    }

    /// Equilibrium of the subgame on the first `k` users in `order` with
    /// modified utilities `phantoms`; `None` once the budget is gone.
    fn solve(&mut self, k: usize, phantoms: &mut Vec<Phantom>) -> Option<Vec<Option<usize>>> {
        self.solves += 1;
        if self.solves > TREE_SOLVE_BUDGET {
            return None;
        }
        if k == 0 {
            return Some(vec![None; self.spec.n_users()]);
        }
        let v = self.order[k - 1];
        let mut a = self.solve(k - 1, phantoms)?;
        let mut best = (0, self.value(&a, v, 0, phantoms));
        for m in 1..self.spec.n_channels() {
            let val = self.value(&a, v, m, phantoms);
            if strictly_greater(val, best.1) {
                best = (m, val);
            }
        }
        let br = best.0;
        if let Some(u) = self.parent[v] {
            if self.spec.graph().has_edge(v, u) && a[u] == Some(br) {
                // `v` crowds its parent on `br`: re-solve with `u` treating
                // `v` as present whenever it plays `br`.
                phantoms.push(Phantom {
                    user: u,
                    channel: br,
                    who: v,
                });
                let resolved = self.solve(k - 1, phantoms);
                phantoms.pop();
                a = resolved?;
            }
        }
        a[v] = Some(br);
        Some(a)
    }
}

/// Adds users one at a time in breadth-first order so that each new user
/// touches at most one placed user, resolving conflicts with its parent by
/// re-solving the smaller game with a modified utility for the parent.
pub fn construct_ne_directed_tree(spec: &GameSpec) -> Result<TreeConstruction> {
    let g = spec.graph();
    let class = g.classify();
    if !class.is_tree_or_forest() {
        return Err(precondition("interference graph skeleton is not a tree or forest"));
    }
    for n in 0..spec.n_users() {
        if !satisfies_congestion_property(spec.mechanism(), n, g.in_nbrs(n)) {
            return Err(precondition(format!(
                "contention mechanism violates the congestion property for user {n}"
            )));
        }
    }

    let mut order = Vec::with_capacity(spec.n_users());
    let mut parent = vec![None; spec.n_users()];
    let mut seen = vec![false; spec.n_users()];
    for root in 0..spec.n_users() {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for w in g.skeleton_neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(u);
                    queue.push_back(w);
                }
            }
        }
    }

    let mut solver = TreeSolver {
        spec,
        order,
        parent,
        solves: 0,
        buf: Vec::new(),
    };
    let n = spec.n_users();
    match solver.solve(n, &mut Vec::new()) {
        Some(a) => Ok(TreeConstruction {
            profile: StrategyProfile(a.into_iter().map(|m| m.unwrap_or(0)).collect()),
            used_fallback: false,
        }),
        None => {
            log::warn!("tree construction exceeded {TREE_SOLVE_BUDGET} solves, enumerating");
            let all = enumerate_pure_ne(spec)?;
            let profile = all
                .into_iter()
                .next()
                .ok_or_else(|| precondition("enumeration found no pure equilibrium"))?;
            Ok(TreeConstruction {
                profile,
                used_fallback: true,
            })
        }
    }
}

/// Checks that `B_m^n = c_n B_m` for some positive `c_n`; returns the
/// per-channel base taken from user 0.
pub(crate) fn proportional_rates(spec: &GameSpec) -> Option<Vec<f64>> {
    let base = spec.mean_rate()[0].clone();
    let ok = spec.mean_rate().iter().all(|row| {
        let c = row[0] / base[0];
        row.iter()
            .zip(&base)
            .all(|(b, b0)| (b / b0 - c).abs() <= 1e-9 * c)
    });
    ok.then_some(base)
}

/// Two-channel construction for complete or regular bipartite graphs under
/// random backoff.
pub fn construct_ne_bipartite(spec: &GameSpec) -> Result<StrategyProfile> {
    let lambda_max = match spec.mechanism() {
        ContentionMechanism::Backoff { lambda_max } => *lambda_max,
        _ => return Err(precondition("bipartite construction requires random backoff")),
    };
    let class = spec.graph().classify();
    let (left, right) = class
        .bipartition()
        .ok_or_else(|| precondition("graph is neither complete nor regular bipartite"))?;
    let base = proportional_rates(spec)
        .ok_or_else(|| precondition("rates are not proportional across users"))?;

    let n = spec.n_users();
    let m_count = spec.n_channels();
    if m_count == 1 {
        return Ok(StrategyProfile(vec![0; n]));
    }
    let f = |k: usize| crate::model::backoff_grab(lambda_max, k);
    let value: Vec<f64> = (0..m_count).map(|m| spec.theta()[m] * base[m]).collect();
    let mut ranked: Vec<usize> = (0..m_count).collect();
    // Stable sort keeps the lowest index first among equal channels.
    ranked.sort_by(|&x, &y| value[y].total_cmp(&value[x]));
    let (c1, c2) = (ranked[0], ranked[1]);

    let d1 = spec.graph().max_in_degree();
    let (big, small) = if left.len() >= right.len() { (left, right) } else { (right, left) };
    let mut a = vec![c1; n];
    if value[c1] * f(d1) < value[c2] * f(0) {
        for &u in small {
            a[u] = c2;
        }
        for &u in big {
            a[u] = c1;
        }
    }
    Ok(StrategyProfile(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::is_pure_ne;
    use crate::graph::DirectedInterferenceGraph;

    fn two_user_edge(lambda_max: u32) -> GameSpec {
        GameSpec::new(
            DirectedInterferenceGraph::new(2, [(0, 1)]).unwrap(),
            vec![1.0, 1.0],
            vec![vec![10.0, 9.0]; 2],
            None,
            ContentionMechanism::Backoff { lambda_max },
        )
        .unwrap()
    }

    #[test]
    fn dag_second_user_avoids_crowding() {
        for lambda_max in [2, 10, 100] {
            let spec = two_user_edge(lambda_max);
            let a = construct_ne_dag(&spec).unwrap();
            assert_eq!(a[0], 0);
            let g = crate::model::backoff_grab(lambda_max, 1);
            let expect = if 9.0 > 10.0 * g { 1 } else { 0 };
            assert_eq!(a[1], expect);
            assert!(is_pure_ne(&spec, &a).unwrap().is_ne);
        }
    }

    #[test]
    fn dag_rejects_cycles() {
        let spec = GameSpec::new(
            DirectedInterferenceGraph::new(2, [(0, 1), (1, 0)]).unwrap(),
            vec![1.0],
            vec![vec![1.0]; 2],
            None,
            ContentionMechanism::BackoffAsymptotic,
        )
        .unwrap();
        assert!(matches!(construct_ne_dag(&spec), Err(crate::Error::Precondition(_))));
    }

    #[test]
    fn tree_path_and_mutual_edges() {
        let edges = [(0, 1), (1, 0), (1, 2), (3, 2), (2, 3)];
        let spec = GameSpec::new(
            DirectedInterferenceGraph::new(4, edges).unwrap(),
            vec![1.0, 0.9],
            vec![vec![10.0, 9.0]; 4],
            None,
            ContentionMechanism::Backoff { lambda_max: 3 },
        )
        .unwrap();
        let out = construct_ne_directed_tree(&spec).unwrap();
        assert!(!out.used_fallback);
        assert!(is_pure_ne(&spec, &out.profile).unwrap().is_ne);
    }

    #[test]
    fn bipartite_branches() {
        let k22 = DirectedInterferenceGraph::undirected(4, [(0, 1), (0, 3), (2, 1), (2, 3)]).unwrap();
        // f(2) for lambda_max = 10 is 0.285.
        let strong = GameSpec::new(
            k22.clone(),
            vec![1.0, 1.0],
            vec![vec![10.0, 1.0]; 4],
            None,
            ContentionMechanism::Backoff { lambda_max: 10 },
        )
        .unwrap();
        let a = construct_ne_bipartite(&strong).unwrap();
        assert_eq!(a.0, vec![0; 4]);
        assert!(is_pure_ne(&strong, &a).unwrap().is_ne);

        let close = GameSpec::new(
            k22,
            vec![1.0, 1.0],
            vec![vec![10.0, 9.0]; 4],
            None,
            ContentionMechanism::Backoff { lambda_max: 10 },
        )
        .unwrap();
        let a = construct_ne_bipartite(&close).unwrap();
        assert_ne!(a[0], a[1]);
        assert_eq!(a[0], a[2]);
        assert!(is_pure_ne(&close, &a).unwrap().is_ne);
    }
}
