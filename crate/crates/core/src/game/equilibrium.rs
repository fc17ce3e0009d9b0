//! Pure Nash equilibrium checks, enumeration and better-response dynamics.

use alloc::vec::Vec;

use super::{profile_count, Game, ProfileOdometer, StrategyProfile};
use crate::error::Result;
use crate::math::strictly_greater;

/// Profiles visited by exhaustive searches.
pub const MAX_PROFILES: u64 = 10_000_000;

/// A strictly improving unilateral move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation {
    pub user: usize,
    pub channel: usize,
    pub gain: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeCheck {
    pub is_ne: bool,
    /// Lowest-indexed user with an improving move, and its best response.
    pub witness: Option<Deviation>,
}

/// Best response of `n` to `a`, lowest channel index on ties.
pub fn best_response<G: Game + ?Sized>(game: &G, a: &[usize], n: usize) -> (usize, f64) {
    let mut best = (0, game.payoff_deviating(a, n, 0));
    for m in 1..game.n_channels() {
        let v = game.payoff_deviating(a, n, m);
        if strictly_greater(v, best.1) {
            best = (m, v);
        }
    }
    best
}

fn improving_move<G: Game + ?Sized>(game: &G, a: &[usize], n: usize) -> Option<Deviation> {
    let current = game.payoff(a, n);
    let (m, v) = best_response(game, a, n);
    strictly_greater(v, current).then_some(Deviation {
        user: n,
        channel: m,
        gain: v - current,
    })
}

pub fn is_pure_ne<G: Game + ?Sized>(game: &G, a: &[usize]) -> Result<NeCheck> {
    game.check_profile(a)?;
    let witness = (0..game.n_users()).find_map(|n| improving_move(game, a, n));
    Ok(NeCheck {
        is_ne: witness.is_none(),
        witness,
    })
}

/// Every pure equilibrium, in lexicographic order.
pub fn enumerate_pure_ne<G: Game + ?Sized>(game: &G) -> Result<Vec<StrategyProfile>> {
    profile_count(game.n_users(), game.n_channels(), MAX_PROFILES)?;
    let mut od = ProfileOdometer::new(game.n_users(), game.n_channels());
    let mut found = Vec::new();
    while let Some(a) = od.advance() {
        if (0..game.n_users()).all(|n| improving_move(game, a, n).is_none()) {
            found.push(StrategyProfile(a.to_vec()));
        }
    }
    Ok(found)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrdStep {
    pub user: usize,
    pub from: usize,
    pub to: usize,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrdOutcome {
    pub profile: StrategyProfile,
    pub steps: Vec<BrdStep>,
    /// A full round passed without any update.
    pub converged: bool,
    pub rounds: usize,
}

/// Asynchronous better-response updates: users take turns in index order
/// and each switches to its lowest-indexed strictly improving channel.
/// Stops after a round with no update or after `max_rounds` rounds.
pub fn better_response_dynamics<G: Game + ?Sized>(
    game: &G,
    start: &[usize],
    max_rounds: usize,
) -> Result<BrdOutcome> {
    game.check_profile(start)?;
    let mut a = start.to_vec();
    let mut steps = Vec::new();
    let mut rounds = 0;
    let mut converged = false;
    while rounds < max_rounds {
        rounds += 1;
        let mut moved = false;
        for n in 0..game.n_users() {
            let current = game.payoff(&a, n);
            let better = (0..game.n_channels())
                .filter(|&m| m != a[n])
                .map(|m| (m, game.payoff_deviating(&a, n, m)))
                .find(|&(_, v)| strictly_greater(v, current));
            if let Some((m, v)) = better {
                steps.push(BrdStep {
                    user: n,
                    from: a[n],
                    to: m,
                    gain: v - current,
                });
                a[n] = m;
                moved = true;
            }
        }
        if !moved {
            converged = true;
            break;
        }
    }
    if !converged {
        log::debug!("better-response dynamics stopped after {max_rounds} rounds without converging");
    }
    Ok(BrdOutcome {
        profile: StrategyProfile(a),
        steps,
        converged,
        rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameSpec;
    use crate::graph::DirectedInterferenceGraph;
    use crate::model::ContentionMechanism;
    use alloc::vec;

    fn three_cycle() -> GameSpec {
        let g = DirectedInterferenceGraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        GameSpec::new(
            g,
            vec![1.0, 1.0],
            vec![vec![1.0, 1.0]; 3],
            None,
            ContentionMechanism::Aloha { p: vec![0.5; 3] },
        )
        .unwrap()
    }

    #[test]
    fn three_cycle_has_no_equilibrium() {
        let spec = three_cycle();
        assert!(enumerate_pure_ne(&spec).unwrap().is_empty());
        let check = is_pure_ne(&spec, &[0, 0, 0]).unwrap();
        assert!(!check.is_ne);
        let w = check.witness.unwrap();
        assert_eq!(w.channel, 1);
        let brd = better_response_dynamics(&spec, &[0, 0, 0], 50).unwrap();
        assert!(!brd.converged);
        assert_eq!(brd.rounds, 50);
    }

    #[test]
    fn lone_user_picks_argmax() {
        let spec = GameSpec::new(
            DirectedInterferenceGraph::empty(1).unwrap(),
            vec![0.5, 0.9, 0.9],
            vec![vec![1.0, 1.0, 1.0]],
            None,
            ContentionMechanism::Backoff { lambda_max: 10 },
        )
        .unwrap();
        assert!(is_pure_ne(&spec, &[1]).unwrap().is_ne);
        assert!(!is_pure_ne(&spec, &[0]).unwrap().is_ne);
        let all: Vec<_> = enumerate_pure_ne(&spec).unwrap().into_iter().map(|p| p.0).collect();
        assert_eq!(all, vec![vec![1], vec![2]]);
        assert_eq!(best_response(&spec, &[0], 0).0, 1);
    }

    #[test]
    fn brd_from_equilibrium_makes_no_move() {
        let spec = three_cycle();
        let und = GameSpec::new(
            DirectedInterferenceGraph::undirected(3, [(0, 1), (1, 2)]).unwrap(),
            spec.theta().to_vec(),
            spec.mean_rate().to_vec(),
            None,
            spec.mechanism().clone(),
        )
        .unwrap();
        let out = better_response_dynamics(&und, &[0, 0, 0], 100).unwrap();
        assert!(out.converged);
        assert!(is_pure_ne(&und, &out.profile).unwrap().is_ne);
        let again = better_response_dynamics(&und, &out.profile, 100).unwrap();
        assert!(again.steps.is_empty());
        assert_eq!(again.rounds, 1);
    }
}
