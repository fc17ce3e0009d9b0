//! Expected payoffs under mixed strategies.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::{profile_count, Game, GameSpec, MixedProfile, ProfileOdometer};
use crate::error::{invalid, Error, Result};
use crate::math;
use crate::model::ContentionMechanism;

/// Largest in-neighborhood handled by exact subset enumeration.
pub const MAX_SUBSET_NEIGHBORS: usize = 20;

fn check_mixed(spec: &GameSpec, sigma: &MixedProfile, n: usize, m: Option<usize>) -> Result<()> {
    if sigma.n_users() != spec.n_users() || sigma.n_channels() != spec.n_channels() {
        return Err(invalid(format!(
            "mixed profile is {}x{}, game is {}x{}",
            sigma.n_users(),
            sigma.n_channels(),
            spec.n_users(),
            spec.n_channels()
        )));
    }
    if n >= spec.n_users() {
        return Err(invalid(format!("user {n} out of range")));
    }
    if let Some(m) = m {
        if m >= spec.n_channels() {
            return Err(invalid(format!("channel {m} out of range")));
        }
    }
    Ok(())
}

/// `E[g_n(S)]` where each in-neighbor `i` joins `S` independently with
/// probability `sigma_m^i`.
fn expected_grab(spec: &GameSpec, sigma: &MixedProfile, n: usize, m: usize) -> Result<f64> {
    let nbrs = spec.graph().in_nbrs(n);
    match spec.mechanism() {
        ContentionMechanism::Backoff { .. } | ContentionMechanism::BackoffAsymptotic => {
            // Distribution of the number of contenders.
            let mut dist = vec![0.0; nbrs.len() + 1];
            dist[0] = 1.0;
            for (k, &i) in nbrs.iter().enumerate() {
                let q = sigma.row(i)[m];
                for c in (0..=k).rev() {
                    let v = dist[c];
                    dist[c + 1] += v * q;
                    dist[c] = v * (1.0 - q);
                }
            }
            Ok(dist.iter().enumerate().map(|(k, &d)| d * spec.count_grab(k)).sum())
        }
        ContentionMechanism::Aloha { p } => Ok(nbrs
            .iter()
            .fold(p[n], |acc, &i| acc * (1.0 - sigma.row(i)[m] * p[i]))),
        ContentionMechanism::WeightedShare { weights } => {
            if nbrs.len() > MAX_SUBSET_NEIGHBORS {
                return Err(Error::ResourceLimit {
                    what: "in-neighbors for subset enumeration",
                    required: nbrs.len() as u64,
                    limit: MAX_SUBSET_NEIGHBORS as u64,
                });
            }
            let probs: Vec<f64> = nbrs.iter().map(|&i| sigma.row(i)[m]).collect();
            let ws: Vec<f64> = nbrs.iter().map(|&i| weights[i]).collect();
            Ok(subset_sum(&probs, &ws, 0, 1.0, weights[n], weights[n]))
        }
    }
}

fn subset_sum(probs: &[f64], ws: &[f64], k: usize, mass: f64, total: f64, own: f64) -> f64 {
    if mass == 0.0 {
        return 0.0;
    }
    if k == probs.len() {
        return mass * own / total;
    }
    subset_sum(probs, ws, k + 1, mass * probs[k], total + ws[k], own)
        + subset_sum(probs, ws, k + 1, mass * (1.0 - probs[k]), total, own)
}

/// `Q_m^n(σ)`: expected payoff of `n` when it plays `m` and every
/// in-neighbor mixes independently according to `sigma`.
///
/// Backoff and Aloha use closed forms; weighted sharing enumerates the
/// subsets of the in-neighborhood and refuses neighborhoods above
/// [`MAX_SUBSET_NEIGHBORS`] (see [`neighborhood_expected_payoff_mc`]).
pub fn neighborhood_expected_payoff(spec: &GameSpec, sigma: &MixedProfile, n: usize, m: usize) -> Result<f64> {
    check_mixed(spec, sigma, n, Some(m))?;
    let base = spec.base_value(n, m);
    if base == 0.0 {
        return Ok(0.0);
    }
    Ok(base * expected_grab(spec, sigma, n, m)?)
}

/// Monte Carlo estimate of `Q_m^n(σ)`, returned with its standard error.
pub fn neighborhood_expected_payoff_mc<R: Rng + ?Sized>(
    spec: &GameSpec,
    sigma: &MixedProfile,
    n: usize,
    m: usize,
    samples: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    check_mixed(spec, sigma, n, Some(m))?;
    if samples < 2 {
        return Err(invalid("Monte Carlo needs at least two samples"));
    }
    let nbrs = spec.graph().in_nbrs(n);
    let mut set = Vec::with_capacity(nbrs.len());
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        set.clear();
        set.extend(nbrs.iter().copied().filter(|&i| rng.gen::<f64>() < sigma.row(i)[m]));
        let v = spec.base_value(n, m) * crate::model::GrabModel::grab(spec.mechanism(), n, &set);
        sum += v;
        sum_sq += v * v;
    }
    let k = samples as f64;
    let mean = sum / k;
    let var = ((sum_sq / k - mean * mean) * k / (k - 1.0)).max(0.0);
    Ok((mean, math::sqrt(var / k)))
}

/// Expected payoff of `n` under `sigma`, via `Σ_m σ_m^n Q_m^n(σ)`.
pub fn payoff_mixed(spec: &GameSpec, sigma: &MixedProfile, n: usize) -> Result<f64> {
    check_mixed(spec, sigma, n, None)?;
    let mut total = 0.0;
    for (m, &s) in sigma.row(n).iter().enumerate() {
        if s > 0.0 {
            total += s * neighborhood_expected_payoff(spec, sigma, n, m)?;
        }
    }
    Ok(total)
}

/// Expected payoff of `n` by summing over every pure outcome; `cap` bounds
/// the number of outcomes visited.
pub fn payoff_mixed_by_enumeration(spec: &GameSpec, sigma: &MixedProfile, n: usize, cap: u64) -> Result<f64> {
    check_mixed(spec, sigma, n, None)?;
    profile_count(spec.n_users(), spec.n_channels(), cap)?;
    let mut od = ProfileOdometer::new(spec.n_users(), spec.n_channels());
    let mut total = 0.0;
    while let Some(a) = od.advance() {
        let prob: f64 = a.iter().enumerate().map(|(i, &m)| sigma.row(i)[m]).product();
        if prob > 0.0 {
            total += prob * spec.payoff(a, n);
        }
    }
    Ok(total)
}

/// `Q_m^n(σ)` for every user and channel.
pub fn expected_payoff_matrix(spec: &GameSpec, sigma: &MixedProfile) -> Result<Vec<Vec<f64>>> {
    (0..spec.n_users())
        .map(|n| {
            (0..spec.n_channels())
                .map(|m| neighborhood_expected_payoff(spec, sigma, n, m))
                .collect()
        })
        .collect()
}
