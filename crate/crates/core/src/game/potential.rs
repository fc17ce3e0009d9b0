//! Potential functions for the undirected game families that admit one.
//!
//! Every variant checks its hypotheses before evaluating, since each formula
//! is only a potential within a narrow class of games.

use alloc::format;

use super::construct::proportional_rates;
use super::{Game, GameSpec};
use crate::error::{precondition, Result};
use crate::math;
use crate::model::{backoff_grab, ContentionMechanism};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PotentialVariant {
    /// Complete undirected graph with random backoff: product of base
    /// values times the product of `f(c)` over `c < K_m` for each channel.
    CompleteBackoff,
    /// Equal sharing `1/(1+K)` on any undirected graph.
    AsymptoticBackoff,
    /// Weighted sharing on any undirected graph.
    WeightedShare,
    /// Identical channels for every user, count-based contention.
    HomogeneousChannels,
    /// Aloha on any undirected graph.
    Aloha,
}

impl PotentialVariant {
    pub const ALL: [PotentialVariant; 5] = [
        PotentialVariant::CompleteBackoff,
        PotentialVariant::AsymptoticBackoff,
        PotentialVariant::WeightedShare,
        PotentialVariant::HomogeneousChannels,
        PotentialVariant::Aloha,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PotentialVariant::CompleteBackoff => "complete-backoff",
            PotentialVariant::AsymptoticBackoff => "asymptotic-backoff",
            PotentialVariant::WeightedShare => "weighted-share",
            PotentialVariant::HomogeneousChannels => "homogeneous-channels",
            PotentialVariant::Aloha => "aloha",
        }
    }

    /// Returns the reason `spec` falls outside this variant, if any.
    pub fn check_hypotheses(self, spec: &GameSpec) -> Result<()> {
        let g = spec.graph();
        if !g.is_undirected() {
            return Err(precondition("interference graph is not undirected"));
        }
        let all_idle = || spec.theta().iter().all(|&t| t > 0.0);
        match self {
            PotentialVariant::CompleteBackoff => {
                if !g.classify().is_complete_undirected() {
                    return Err(precondition("interference graph is not complete"));
                }
                match spec.mechanism() {
                    ContentionMechanism::Backoff { lambda_max } if *lambda_max >= 2 => {}
                    _ => return Err(precondition("mechanism is not random backoff with lambda_max >= 2")),
                }
                if !all_idle() {
                    return Err(precondition("some channel has zero idle probability"));
                }
            }
            PotentialVariant::AsymptoticBackoff | PotentialVariant::WeightedShare => {
                let mech_ok = match self {
                    PotentialVariant::AsymptoticBackoff => {
                        matches!(spec.mechanism(), ContentionMechanism::BackoffAsymptotic)
                    }
                    _ => matches!(spec.mechanism(), ContentionMechanism::WeightedShare { .. }),
                };
                if !mech_ok {
                    return Err(precondition(format!(
                        "mechanism {} does not match the {} potential",
                        spec.mechanism().name(),
                        self.name()
                    )));
                }
                if proportional_rates(spec).is_none() {
                    return Err(precondition("rates are not proportional across users"));
                }
                if !all_idle() {
                    return Err(precondition("some channel has zero idle probability"));
                }
            }
            PotentialVariant::HomogeneousChannels => {
                match spec.mechanism() {
                    ContentionMechanism::Backoff { lambda_max } if *lambda_max >= 2 => {}
                    ContentionMechanism::BackoffAsymptotic => {}
                    _ => {
                        return Err(precondition(
                            "mechanism is not random backoff (lambda_max >= 2 or asymptotic)",
                        ))
                    }
                }
                let t0 = spec.theta()[0];
                if t0 <= 0.0 || spec.theta().iter().any(|&t| t != t0) {
                    return Err(precondition("channels do not share one positive idle probability"));
                }
                if spec.mean_rate().iter().any(|row| row.iter().any(|&b| b != row[0])) {
                    return Err(precondition("some user's mean rate differs across channels"));
                }
            }
            PotentialVariant::Aloha => {
                if !matches!(spec.mechanism(), ContentionMechanism::Aloha { .. }) {
                    return Err(precondition("mechanism is not Aloha"));
                }
                if !all_idle() {
                    return Err(precondition("some channel has zero idle probability"));
                }
            }
        }
        Ok(())
    }
}

fn co_channel<'a>(spec: &'a GameSpec, a: &'a [usize], n: usize) -> impl Iterator<Item = usize> + 'a {
    let m = a[n];
    spec.graph().in_nbrs(n).iter().copied().filter(move |&i| a[i] == m)
}

/// Value of the potential `variant` at profile `a`.
pub fn potential_value(spec: &GameSpec, a: &[usize], variant: PotentialVariant) -> Result<f64> {
    spec.check_profile(a)?;
    variant.check_hypotheses(spec)?;
    let n_users = spec.n_users();
    let theta = spec.theta();
    Ok(match variant {
        PotentialVariant::CompleteBackoff => {
            let lambda_max = match spec.mechanism() {
                ContentionMechanism::Backoff { lambda_max } => *lambda_max,
                _ => unreachable!("checked above"),
            };
            let mut phi: f64 = (0..n_users)
                .map(|n| theta[a[n]] * spec.mean_rate()[n][a[n]])
                .product();
            for m in 0..spec.n_channels() {
                let k = a.iter().filter(|&&x| x == m).count();
                for c in 0..k {
                    phi *= backoff_grab(lambda_max, c);
                }
            }
            phi
        }
        PotentialVariant::AsymptoticBackoff => {
            let base = proportional_rates(spec).unwrap_or_default();
            -(0..n_users)
                .map(|n| {
                    let k = co_channel(spec, a, n).count() as f64;
                    (1.0 + 0.5 * k) / (theta[a[n]] * base[a[n]])
                })
                .sum::<f64>()
        }
        PotentialVariant::WeightedShare => {
            let base = proportional_rates(spec).unwrap_or_default();
            let w = match spec.mechanism() {
                ContentionMechanism::WeightedShare { weights } => weights,
                _ => unreachable!("checked above"),
            };
            -(0..n_users)
                .map(|n| {
                    let shared: f64 = co_channel(spec, a, n).map(|i| w[n] * w[i]).sum();
                    (w[n] * w[n] + 0.5 * shared) / (theta[a[n]] * base[a[n]])
                })
                .sum::<f64>()
        }
        PotentialVariant::HomogeneousChannels => {
            // Any positive normalizer works; user 0's base value is used.
            let scale = theta[0] * spec.mean_rate()[0][0];
            -(0..n_users)
                .map(|n| (1.0 + co_channel(spec, a, n).count() as f64) / scale)
                .sum::<f64>()
        }
        PotentialVariant::Aloha => {
            let p = match spec.mechanism() {
                ContentionMechanism::Aloha { p } => p,
                _ => unreachable!("checked above"),
            };
            let rho = |i: usize| math::ln_1p(-p[i]);
            (0..n_users)
                .map(|i| {
                    let shared: f64 = co_channel(spec, a, i).map(rho).sum();
                    let own = math::ln(theta[a[i]] * spec.mean_rate()[i][a[i]] * p[i]);
                    -rho(i) * (0.5 * shared + own)
                })
                .sum()
        }
    })
}
