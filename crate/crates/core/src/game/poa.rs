//! Centralized welfare, worst equilibrium and price of anarchy.

use alloc::vec::Vec;

use super::equilibrium::{is_pure_ne, Deviation, MAX_PROFILES};
use super::{profile_count, Game, GameSpec, ProfileOdometer, StrategyProfile};
use crate::error::{Error, Result};
use crate::model::GrabModel;

#[derive(Debug, Clone, PartialEq)]
pub struct PoaReport {
    pub optimal_welfare: f64,
    pub optimal_profile: StrategyProfile,
    pub worst_ne_welfare: f64,
    pub worst_ne_profile: StrategyProfile,
    pub n_equilibria: usize,
    pub poa: f64,
    /// `min_n V_n g_n(N_n) / max_n V_n` with `V_n = h_n max_m θ_m B_m^n`.
    pub lower_bound: f64,
    pub bound_holds: bool,
}

const BOUND_SLACK: f64 = 1e-9;

/// Guaranteed efficiency of any pure equilibrium.
pub fn poa_lower_bound(spec: &GameSpec) -> f64 {
    let v: Vec<f64> = (0..spec.n_users())
        .map(|n| {
            (0..spec.n_channels())
                .map(|m| spec.base_value(n, m))
                .fold(0.0, f64::max)
        })
        .collect();
    let top = v.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0.0;
    }
    let worst = (0..spec.n_users())
        .map(|n| v[n] * spec.mechanism().grab(n, spec.graph().in_nbrs(n)))
        .fold(f64::INFINITY, f64::min);
    worst / top
}

/// Enumerates every profile for the optimum and every equilibrium for the
/// worst one.
pub fn social_welfare_and_poa(spec: &GameSpec) -> Result<PoaReport> {
    let total = profile_count(spec.n_users(), spec.n_channels(), MAX_PROFILES)?;
    let mut od = ProfileOdometer::new(spec.n_users(), spec.n_channels());
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut worst_ne: Option<(f64, Vec<usize>)> = None;
    let mut n_equilibria = 0;
    while let Some(a) = od.advance() {
        let w = spec.welfare(a);
        if best.as_ref().map_or(true, |(b, _)| w > *b) {
            best = Some((w, a.to_vec()));
        }
        if is_pure_ne(spec, a)?.is_ne {
            n_equilibria += 1;
            if worst_ne.as_ref().map_or(true, |(b, _)| w < *b) {
                worst_ne = Some((w, a.to_vec()));
            }
        }
    }
    let (optimal_welfare, optimal_profile) = best.unwrap_or_default();
    let (worst_ne_welfare, worst_ne_profile) =
        worst_ne.ok_or(Error::NoPureEquilibrium { profiles: total })?;
    let poa = if optimal_welfare > 0.0 {
        worst_ne_welfare / optimal_welfare
    } else {
        1.0
    };
    let lower_bound = poa_lower_bound(spec);
    Ok(PoaReport {
        optimal_welfare,
        optimal_profile: StrategyProfile(optimal_profile),
        worst_ne_welfare,
        worst_ne_profile: StrategyProfile(worst_ne_profile),
        n_equilibria,
        poa,
        lower_bound,
        bound_holds: poa >= lower_bound - BOUND_SLACK,
    })
}

/// An improving move from every pure profile, proving that none is an
/// equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct NoEquilibriumCertificate {
    pub moves: Vec<(StrategyProfile, Deviation)>,
}

/// `None` if some profile is an equilibrium.
pub fn no_equilibrium_certificate<G: Game + ?Sized>(game: &G) -> Result<Option<NoEquilibriumCertificate>> {
    profile_count(game.n_users(), game.n_channels(), MAX_PROFILES)?;
    let mut od = ProfileOdometer::new(game.n_users(), game.n_channels());
    let mut moves = Vec::new();
    while let Some(a) = od.advance() {
        match is_pure_ne(game, a)?.witness {
            Some(d) => moves.push((StrategyProfile(a.to_vec()), d)),
            None => return Ok(None),
        }
    }
    Ok(Some(NoEquilibriumCertificate { moves }))
}
