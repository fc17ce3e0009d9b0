//! Directed interference graphs.
//!
//! An edge `(i, j)` means that user `i`'s transmission interferes with user
//! `j`'s reception on a shared channel. An undirected interference
//! relationship is stored as the pair of edges `(i, j)` and `(j, i)`.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedInterferenceGraph {
    n_users: usize,
    edges: BTreeSet<(usize, usize)>,
    in_nbrs: Vec<Vec<usize>>,
    out_nbrs: Vec<Vec<usize>>,
}

/// Transmitter/receiver geometry of one user, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserPlacement {
    pub tx: [f64; 2],
    pub rx: [f64; 2],
    /// Interference range of the transmitter.
    pub range: f64,
}

/// One structural class satisfied by a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphClass {
    /// No directed cycle; carries a topological order (ties broken by
    /// ascending index).
    DirectedAcyclic { order: Vec<usize> },
    /// The undirected skeleton is a tree.
    DirectedTree,
    /// The undirected skeleton is a forest with at least two components.
    DirectedForest,
    /// Every edge is present in both directions.
    Undirected,
    /// Undirected complete bipartite graph; `left` contains user 0.
    CompleteBipartite { left: Vec<usize>, right: Vec<usize> },
    /// Undirected bipartite graph in which every node has `degree` neighbors.
    RegularBipartite {
        left: Vec<usize>,
        right: Vec<usize>,
        degree: usize,
    },
    /// Undirected graph with an edge between every pair of users.
    CompleteUndirected,
    /// At least one edge is one-directional.
    GeneralDirected,
}

/// Every class a graph satisfies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub classes: Vec<GraphClass>,
}

impl Classification {
    pub fn topological_order(&self) -> Option<&[usize]> {
        self.classes.iter().find_map(|c| match c {
            GraphClass::DirectedAcyclic { order } => Some(order.as_slice()),
            _ => None,
        })
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    pub fn is_tree_or_forest(&self) -> bool {
        self.classes
            .iter()
            .any(|c| matches!(c, GraphClass::DirectedTree | GraphClass::DirectedForest))
    }

    pub fn is_undirected(&self) -> bool {
        self.classes.contains(&GraphClass::Undirected)
    }

    pub fn is_complete_undirected(&self) -> bool {
        self.classes.contains(&GraphClass::CompleteUndirected)
    }

    /// Bipartition witness from the complete or regular bipartite class.
    pub fn bipartition(&self) -> Option<(&[usize], &[usize])> {
        self.classes.iter().find_map(|c| match c {
            GraphClass::CompleteBipartite { left, right }
            | GraphClass::RegularBipartite { left, right, .. } => {
                Some((left.as_slice(), right.as_slice()))
            }
            _ => None,
        })
    }

    /// Short names of the reported classes, in report order.
    pub fn names(&self) -> Vec<&'static str> {
        self.classes.iter().map(GraphClass::name).collect()
    }
}

impl GraphClass {
    pub fn name(&self) -> &'static str {
        match self {
            GraphClass::DirectedAcyclic { .. } => "DirectedAcyclic",
            GraphClass::DirectedTree => "DirectedTree",
            GraphClass::DirectedForest => "DirectedForest",
            GraphClass::Undirected => "Undirected",
            GraphClass::CompleteBipartite { .. } => "CompleteBipartite",
            GraphClass::RegularBipartite { .. } => "RegularBipartite",
            GraphClass::CompleteUndirected => "CompleteUndirected",
            GraphClass::GeneralDirected => "GeneralDirected",
        }
    }
}

impl DirectedInterferenceGraph {
    /// Builds a graph on users `0..n_users`. Duplicate edges are merged.
    pub fn new(n_users: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n_users == 0 {
            return Err(invalid("graph needs at least one user"));
        }
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            if i >= n_users || j >= n_users {
                return Err(invalid(format!(
                    "edge ({i}, {j}) has an endpoint outside 0..{n_users}"
                )));
            }
            if i == j {
                return Err(invalid(format!("self-edge on user {i}")));
            }
            set.insert((i, j));
        }
        let mut in_nbrs = vec![Vec::new(); n_users];
        let mut out_nbrs = vec![Vec::new(); n_users];
        for &(i, j) in &set {
            out_nbrs[i].push(j);
            in_nbrs[j].push(i);
        }
        for l in in_nbrs.iter_mut() {
            l.sort_unstable();
        }
        Ok(Self {
            n_users,
            edges: set,
            in_nbrs,
            out_nbrs,
        })
    }

    /// Graph with no interference at all.
    pub fn empty(n_users: usize) -> Result<Self> {
        Self::new(n_users, core::iter::empty())
    }

    /// Builds a graph with both directions of every listed pair.
    pub fn undirected(n_users: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut both = Vec::new();
        for (i, j) in pairs {
            both.push((i, j));
            both.push((j, i));
        }
        Self::new(n_users, both)
    }

    /// Edge `(i, j)` iff the distance from `Tx_i` to `Rx_j` is at most the
    /// range of `i`. Self-edges are never created.
    pub fn from_placements(placements: &[UserPlacement]) -> Result<Self> {
        if placements.is_empty() {
            return Err(invalid("at least one placement is required"));
        }
        for (n, p) in placements.iter().enumerate() {
            let finite = p.tx.iter().chain(p.rx.iter()).all(|c| c.is_finite());
            if !finite {
                return Err(invalid(format!("placement of user {n} has a non-finite coordinate")));
            }
            if !(p.range.is_finite() && p.range > 0.0) {
                return Err(invalid(format!("interference range of user {n} must be positive")));
            }
        }
        let mut edges = Vec::new();
        for (i, pi) in placements.iter().enumerate() {
            for (j, pj) in placements.iter().enumerate() {
                if i == j {
                    continue;
                }
                let dx = pi.tx[0] - pj.rx[0];
                let dy = pi.tx[1] - pj.rx[1];
                if libm::hypot(dx, dy) <= pi.range {
                    edges.push((i, j));
                }
            }
        }
        Self::new(placements.len(), edges)
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i, j))
    }

    /// Users whose transmissions interfere with `n`'s reception, ascending.
    pub fn in_neighbors(&self, n: usize) -> Result<&[usize]> {
        self.in_nbrs
            .get(n)
            .map(Vec::as_slice)
            .ok_or_else(|| invalid(format!("user {n} out of range 0..{}", self.n_users)))
    }

    /// Unchecked variant for internal hot paths.
    pub(crate) fn in_nbrs(&self, n: usize) -> &[usize] {
        &self.in_nbrs[n]
    }

    pub fn out_neighbors(&self, n: usize) -> Result<&[usize]> {
        self.out_nbrs
            .get(n)
            .map(Vec::as_slice)
            .ok_or_else(|| invalid(format!("user {n} out of range 0..{}", self.n_users)))
    }

    pub fn max_in_degree(&self) -> usize {
        self.in_nbrs.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_undirected(&self) -> bool {
        self.edges.iter().all(|&(i, j)| self.edges.contains(&(j, i)))
    }

    /// Neighbors in the undirected skeleton (edge in either direction).
    pub fn skeleton_neighbors(&self, n: usize) -> Vec<usize> {
        let mut s: BTreeSet<usize> = self.in_nbrs[n].iter().copied().collect();
        s.extend(self.out_nbrs[n].iter().copied());
        s.into_iter().collect()
    }

    fn skeleton_edge_count(&self) -> usize {
        self.edges
            .iter()
            .filter(|&&(i, j)| i < j || !self.edges.contains(&(j, i)))
            .count()
    }

    /// Connected components of the skeleton, each sorted, ordered by their
    /// smallest member.
    pub fn skeleton_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n_users];
        let mut comps = Vec::new();
        for root in 0..self.n_users {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut comp = vec![root];
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                for v in self.skeleton_neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// Kahn's algorithm with the smallest available index first; `None` if
    /// the graph has a directed cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg: Vec<usize> = self.in_nbrs.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..self.n_users).filter(|&n| indeg[n] == 0).collect();
        let mut order = Vec::with_capacity(self.n_users);
        while let Some(u) = ready.pop_first() {
            order.push(u);
            for &v in &self.out_nbrs[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    ready.insert(v);
                }
            }
        }
        (order.len() == self.n_users).then_some(order)
    }

    /// Two-coloring of the skeleton, the smallest node of each component on
    /// the left. `None` if some component has an odd cycle.
    fn two_coloring(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        let mut color: Vec<Option<bool>> = vec![None; self.n_users];
        for root in 0..self.n_users {
            if color[root].is_some() {
                continue;
            }
            color[root] = Some(false);
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                let cu = color[u].unwrap_or(false);
                for v in self.skeleton_neighbors(u) {
                    match color[v] {
                        None => {
                            color[v] = Some(!cu);
                            queue.push_back(v);
                        }
                        Some(cv) if cv == cu => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        let left = (0..self.n_users).filter(|&n| color[n] == Some(false)).collect();
        let right = (0..self.n_users).filter(|&n| color[n] == Some(true)).collect();
        Some((left, right))
    }

    /// Reports every class the graph satisfies.
    pub fn classify(&self) -> Classification {
        let mut classes = Vec::new();
        if let Some(order) = self.topological_order() {
            classes.push(GraphClass::DirectedAcyclic { order });
        }

        let n = self.n_users;
        let skel_edges = self.skeleton_edge_count();
        let n_comps = self.skeleton_components().len();
        if skel_edges + n_comps == n {
            if n_comps == 1 {
                classes.push(GraphClass::DirectedTree);
            } else {
                classes.push(GraphClass::DirectedForest);
            }
        }

        if self.is_undirected() {
            classes.push(GraphClass::Undirected);
            if skel_edges > 0 {
                if let Some((left, right)) = self.two_coloring() {
                    if n_comps == 1 && skel_edges == left.len() * right.len() {
                        classes.push(GraphClass::CompleteBipartite {
                            left: left.clone(),
                            right: right.clone(),
                        });
                    }
                    let degree = self.in_nbrs[0].len();
                    if self.in_nbrs.iter().all(|l| l.len() == degree) {
                        classes.push(GraphClass::RegularBipartite { left, right, degree });
                    }
                }
            }
            if skel_edges == n * (n - 1) / 2 {
                classes.push(GraphClass::CompleteUndirected);
            }
        } else {
            classes.push(GraphClass::GeneralDirected);
        }
        Classification { classes }
    }
}
