//! Channel state processes, data-rate models and channel-grabbing
//! probabilities.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::math;

/// Largest backoff window evaluated by direct summation.
pub const MAX_LAMBDA: u32 = 1_000_000;

/// Primary-user activity on one channel. State `true` means idle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelModel {
    /// Two-state chain; `epsilon` is the busy-to-idle probability and `xi`
    /// the idle-to-busy probability.
    Markov { epsilon: f64, xi: f64 },
    /// Independent idle draw with probability `theta` in every slot.
    Bernoulli { theta: f64 },
    /// Database-driven availability, `theta` is 0 or 1.
    WhiteSpace { theta: f64 },
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if p.is_finite() && (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(invalid(format!("{name} = {p} is not a probability")))
    }
}

impl ChannelModel {
    /// Markov chain with stationary idle probability `theta` whose state
    /// changes with total rate `epsilon + xi = switching`.
    pub fn markov_with_idle(theta: f64, switching: f64) -> Result<Self> {
        check_prob("theta", theta)?;
        let c = Self::Markov {
            epsilon: switching * theta,
            xi: switching * (1.0 - theta),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ChannelModel::Markov { epsilon, xi } => {
                check_prob("epsilon", epsilon)?;
                check_prob("xi", xi)?;
                if epsilon + xi <= 0.0 {
                    return Err(Error::DegenerateModel(
                        "Markov channel with epsilon = xi = 0 has no unique stationary distribution"
                            .into(),
                    ));
                }
                Ok(())
            }
            ChannelModel::Bernoulli { theta } => check_prob("theta", theta),
            ChannelModel::WhiteSpace { theta } => {
                if theta == 0.0 || theta == 1.0 {
                    Ok(())
                } else {
                    Err(invalid(format!("white-space theta must be 0 or 1, got {theta}")))
                }
            }
        }
    }

    pub fn stationary_idle_probability(&self) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            ChannelModel::Markov { epsilon, xi } => epsilon / (epsilon + xi),
            ChannelModel::Bernoulli { theta } | ChannelModel::WhiteSpace { theta } => theta,
        })
    }

    /// One step of the state process from `previous`.
    pub fn sample_channel_state<R: Rng + ?Sized>(&self, previous: bool, rng: &mut R) -> bool {
        match *self {
            ChannelModel::Markov { epsilon, xi } => {
                if previous {
                    !rng.gen_bool(xi)
                } else {
                    rng.gen_bool(epsilon)
                }
            }
            ChannelModel::Bernoulli { theta } => rng.gen_bool(theta),
            ChannelModel::WhiteSpace { theta } => theta == 1.0,
        }
    }

    /// Draw from the stationary distribution; used for the first slot.
    pub fn sample_stationary<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<bool> {
        let theta = self.stationary_idle_probability()?;
        Ok(rng.gen_bool(theta))
    }
}

/// Small-scale fading applied to the Shannon rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fading {
    /// Channel gain is exponential with the given mean.
    Rayleigh,
    /// Channel gain is pinned to its mean.
    None,
}

/// Per-slot data rate of a user on an idle channel, in bits/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateModel {
    Fixed { rate: f64 },
    Shannon {
        bandwidth: f64,
        power: f64,
        noise: f64,
        mean_gain: f64,
        fading: Fading,
    },
}

impl RateModel {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        match *self {
            RateModel::Fixed { rate } if ok(rate) => Ok(()),
            RateModel::Shannon {
                bandwidth,
                power,
                noise,
                mean_gain,
                ..
            } if ok(bandwidth) && ok(power) && ok(noise) && ok(mean_gain) => Ok(()),
            _ => Err(invalid(format!("rate model parameters must be positive: {self:?}"))),
        }
    }

    /// Rayleigh-faded Shannon rate whose mean equals `target_mean`.
    pub fn rayleigh_with_mean(bandwidth: f64, power: f64, noise: f64, target_mean: f64) -> Result<Self> {
        let probe = RateModel::Shannon {
            bandwidth,
            power,
            noise,
            mean_gain: 1.0,
            fading: Fading::Rayleigh,
        };
        probe.validate()?;
        if !(target_mean.is_finite() && target_mean > 0.0) {
            return Err(invalid("target mean rate must be positive"));
        }
        let spectral = target_mean / bandwidth;
        if spectral > 60.0 {
            return Err(invalid(format!(
                "target mean {target_mean} needs more than 60 bit/s/Hz on bandwidth {bandwidth}"
            )));
        }
        // The mean is increasing in the mean SNR; bisect on its logarithm.
        let (mut lo, mut hi) = (-80.0f64, 60.0 * core::f64::consts::LN_2 + 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if math::rayleigh_mean_log2(math::exp(mid)) < spectral {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let snr = math::exp(0.5 * (lo + hi));
        Ok(RateModel::Shannon {
            bandwidth,
            power,
            noise,
            mean_gain: snr * noise / power,
            fading: Fading::Rayleigh,
        })
    }

    /// Expected rate `B`.
    pub fn mean(&self) -> f64 {
        match *self {
            RateModel::Fixed { rate } => rate,
            RateModel::Shannon {
                bandwidth,
                power,
                noise,
                mean_gain,
                fading,
            } => {
                let snr = power * mean_gain / noise;
                match fading {
                    Fading::Rayleigh => bandwidth * math::rayleigh_mean_log2(snr),
                    Fading::None => bandwidth * math::log2(1.0 + snr),
                }
            }
        }
    }

    pub fn sample_rate<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            RateModel::Fixed { rate } => rate,
            RateModel::Shannon {
                bandwidth,
                power,
                noise,
                mean_gain,
                fading,
            } => {
                let z = match fading {
                    Fading::Rayleigh => {
                        let u: f64 = rng.gen();
                        -mean_gain * math::ln(1.0 - u)
                    }
                    Fading::None => mean_gain,
                };
                bandwidth * math::log2(1.0 + power * z / noise)
            }
        }
    }
}

/// Converts dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    math::powf(10.0, dbm / 10.0) * 1e-3
}

/// How users on the same idle channel share it.
#[derive(Debug, Clone, PartialEq)]
pub enum ContentionMechanism {
    /// Uniform integer backoff counters on `1..=lambda_max`; the strict
    /// minimum wins and ties collide.
    Backoff { lambda_max: u32 },
    /// Limit of `Backoff` as the window grows: equal sharing.
    BackoffAsymptotic,
    /// Opportunity shared in proportion to per-user weights.
    WeightedShare { weights: Vec<f64> },
    /// Each user transmits with its own probability.
    Aloha { p: Vec<f64> },
}

/// Grab probability of `lambda_max`-window backoff against `k` contenders.
pub fn backoff_grab(lambda_max: u32, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let l = f64::from(lambda_max);
    let k = u32::try_from(k).unwrap_or(u32::MAX);
    let mut sum = 0.0;
    for lambda in 1..lambda_max {
        sum += math::powi(f64::from(lambda_max - lambda) / l, k);
    }
    sum / l
}

impl ContentionMechanism {
    pub fn name(&self) -> &'static str {
        match self {
            ContentionMechanism::Backoff { .. } => "backoff",
            ContentionMechanism::BackoffAsymptotic => "backoff-asymptotic",
            ContentionMechanism::WeightedShare { .. } => "weighted-share",
            ContentionMechanism::Aloha { .. } => "aloha",
        }
    }

    /// Checks parameter ranges and that per-user vectors cover `n_users`.
    pub fn validate(&self, n_users: usize) -> Result<()> {
        match self {
            ContentionMechanism::Backoff { lambda_max } => {
                if *lambda_max == 0 {
                    return Err(invalid("lambda_max must be at least 1"));
                }
                if *lambda_max > MAX_LAMBDA {
                    return Err(Error::ResourceLimit {
                        what: "backoff window",
                        required: u64::from(*lambda_max),
                        limit: u64::from(MAX_LAMBDA),
                    });
                }
                Ok(())
            }
            ContentionMechanism::BackoffAsymptotic => Ok(()),
            ContentionMechanism::WeightedShare { weights } => {
                if weights.len() != n_users {
                    return Err(invalid(format!(
                        "{} weights given for {n_users} users",
                        weights.len()
                    )));
                }
                if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
                    return Err(invalid(format!("weight {w} is not positive")));
                }
                Ok(())
            }
            ContentionMechanism::Aloha { p } => {
                if p.len() != n_users {
                    return Err(invalid(format!(
                        "{} contention probabilities given for {n_users} users",
                        p.len()
                    )));
                }
                if let Some(x) = p.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
                    return Err(invalid(format!("contention probability {x} not in (0, 1)")));
                }
                Ok(())
            }
        }
    }

    /// Checked grab probability of user `n` against `contenders`.
    pub fn grab_probability(&self, n: usize, contenders: &[usize]) -> Result<f64> {
        if contenders.contains(&n) {
            return Err(invalid(format!("user {n} listed among its own contenders")));
        }
        let limit = match self {
            ContentionMechanism::WeightedShare { weights } => Some(weights.len()),
            ContentionMechanism::Aloha { p } => Some(p.len()),
            _ => None,
        };
        if let Some(len) = limit {
            if let Some(bad) = core::iter::once(&n).chain(contenders).find(|&&i| i >= len) {
                return Err(invalid(format!("user {bad} has no mechanism parameter")));
            }
        }
        Ok(self.grab(n, contenders))
    }
}

/// Channel-grabbing probability `g_n(S)` as a function of the set of
/// co-channel contenders.
pub trait GrabModel {
    /// Probability that `n` wins against `contenders` (which must not
    /// contain `n`).
    fn grab(&self, n: usize, contenders: &[usize]) -> f64;

    /// Whether `g_n` depends on the contender set only through its size.
    fn depends_on_count_only(&self) -> bool {
        false
    }
}

impl GrabModel for ContentionMechanism {
    fn grab(&self, n: usize, contenders: &[usize]) -> f64 {
        match self {
            ContentionMechanism::Backoff { lambda_max } => backoff_grab(*lambda_max, contenders.len()),
            ContentionMechanism::BackoffAsymptotic => 1.0 / (1.0 + contenders.len() as f64),
            ContentionMechanism::WeightedShare { weights } => {
                let total: f64 = contenders.iter().map(|&i| weights[i]).sum();
                weights[n] / (weights[n] + total)
            }
            ContentionMechanism::Aloha { p } => {
                contenders.iter().fold(p[n], |acc, &i| acc * (1.0 - p[i]))
            }
        }
    }

    fn depends_on_count_only(&self) -> bool {
        matches!(
            self,
            ContentionMechanism::Backoff { .. } | ContentionMechanism::BackoffAsymptotic
        )
    }
}

const EXHAUSTIVE_LIMIT: usize = 12;
const SAMPLED_CHECKS: usize = 20_000;

fn antitone_at<G: GrabModel + ?Sized>(g: &G, n: usize, set: &[usize], buf: &mut Vec<usize>) -> bool {
    let full = g.grab(n, set);
    for skip in 0..set.len() {
        buf.clear();
        buf.extend(set.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &i)| i));
        let smaller = g.grab(n, buf);
        if smaller < full - math::REL_TOL * full.abs() {
            return false;
        }
    }
    true
}

/// True iff `g_n(T) >= g_n(S)` for all `T ⊆ S ⊆ universe`.
///
/// Removing one element at a time is enough: any chain `T ⊆ S` is a
/// sequence of single removals. Universes above twelve users are checked on
/// seeded random subsets.
pub fn satisfies_congestion_property<G: GrabModel + ?Sized>(g: &G, n: usize, universe: &[usize]) -> bool {
    let universe: Vec<usize> = universe.iter().copied().filter(|&i| i != n).collect();
    let mut set = Vec::with_capacity(universe.len());
    let mut buf = Vec::with_capacity(universe.len());
    if universe.len() <= EXHAUSTIVE_LIMIT {
        for mask in 0u32..(1u32 << universe.len()) {
            set.clear();
            set.extend((0..universe.len()).filter(|&k| mask >> k & 1 == 1).map(|k| universe[k]));
            if !antitone_at(g, n, &set, &mut buf) {
                return false;
            }
        }
        return true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0de ^ n as u64);
    for _ in 0..SAMPLED_CHECKS {
        set.clear();
        set.extend(universe.iter().copied().filter(|_| rng.gen_bool(0.5)));
        if !antitone_at(g, n, &set, &mut buf) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn stationary_values() {
        let m = ChannelModel::Markov { epsilon: 0.3, xi: 0.1 };
        assert!((m.stationary_idle_probability().unwrap() - 0.75).abs() < 1e-15);
        let m = ChannelModel::Markov { epsilon: 0.2, xi: 0.2 };
        assert_eq!(m.stationary_idle_probability().unwrap(), 0.5);
        let b = ChannelModel::Bernoulli { theta: 0.5 };
        assert_eq!(b.stationary_idle_probability().unwrap(), 0.5);
        let d = ChannelModel::Markov { epsilon: 0.0, xi: 0.0 };
        assert!(matches!(d.stationary_idle_probability(), Err(Error::DegenerateModel(_))));
    }

    #[test]
    fn forced_transitions() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = ChannelModel::Markov { epsilon: 1.0, xi: 1.0 };
        assert!(m.sample_channel_state(false, &mut rng));
        assert!(!m.sample_channel_state(true, &mut rng));
        let w = ChannelModel::WhiteSpace { theta: 0.0 };
        assert!((0..100).all(|_| !w.sample_channel_state(true, &mut rng)));
    }

    #[test]
    fn markov_with_idle_hits_target() {
        let m = ChannelModel::markov_with_idle(0.5, 0.6).unwrap();
        assert_eq!(m, ChannelModel::Markov { epsilon: 0.3, xi: 0.3 });
        assert!(ChannelModel::markov_with_idle(0.5, 2.5).is_err());
    }

    #[test]
    fn pinned_gain_gives_bandwidth() {
        let r = RateModel::Shannon {
            bandwidth: 1e7,
            power: 1.0,
            noise: 1.0,
            mean_gain: 1.0,
            fading: Fading::None,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(r.sample_rate(&mut rng), 1e7);
        assert_eq!(RateModel::Fixed { rate: 2e6 }.sample_rate(&mut rng), 2e6);
    }

    #[test]
    fn rate_fit_matches_target() {
        let noise = dbm_to_watts(-100.0);
        for target in [2e6, 30e6, 150e6] {
            let r = RateModel::rayleigh_with_mean(1e7, 0.1, noise, target).unwrap();
            assert!((r.mean() / target - 1.0).abs() < 1e-9, "{target}");
        }
    }

    #[test]
    fn grab_examples() {
        let b2 = ContentionMechanism::Backoff { lambda_max: 2 };
        assert_eq!(b2.grab_probability(0, &[1]).unwrap(), 0.25);
        let b7 = ContentionMechanism::Backoff { lambda_max: 7 };
        assert_eq!(b7.grab_probability(0, &[]).unwrap(), 1.0);
        let al = ContentionMechanism::Aloha { p: vec![0.5, 0.5] };
        assert_eq!(al.grab_probability(0, &[1]).unwrap(), 0.25);
        let asy = ContentionMechanism::BackoffAsymptotic;
        assert_eq!(asy.grab_probability(0, &[1, 2, 3]).unwrap(), 0.25);
        let w = ContentionMechanism::WeightedShare { weights: vec![2.0, 1.0, 1.0] };
        assert_eq!(w.grab_probability(0, &[1, 2]).unwrap(), 0.5);
        assert!(b2.grab_probability(1, &[1]).is_err());
        assert!(al.grab_probability(0, &[5]).is_err());
    }

    #[test]
    fn mechanism_validation() {
        assert!(ContentionMechanism::Backoff { lambda_max: 0 }.validate(1).is_err());
        assert!(matches!(
            ContentionMechanism::Backoff { lambda_max: MAX_LAMBDA + 1 }.validate(1),
            Err(Error::ResourceLimit { .. })
        ));
        assert!(ContentionMechanism::Aloha { p: vec![0.5] }.validate(2).is_err());
        assert!(ContentionMechanism::Aloha { p: vec![1.0] }.validate(1).is_err());
        assert!(ContentionMechanism::WeightedShare { weights: vec![0.0] }.validate(1).is_err());
    }

    struct Growing;
    impl GrabModel for Growing {
        fn grab(&self, _n: usize, contenders: &[usize]) -> f64 {
            0.5 + 0.1 * contenders.len() as f64
        }
    }

    #[test]
    fn congestion_property_cases() {
        let b = ContentionMechanism::Backoff { lambda_max: 10 };
        assert!(satisfies_congestion_property(&b, 0, &[1, 2, 3, 4]));
        let al = ContentionMechanism::Aloha { p: vec![0.3, 0.5, 0.7, 0.9, 0.1] };
        assert!(satisfies_congestion_property(&al, 0, &[1, 2, 3, 4]));
        assert!(!satisfies_congestion_property(&Growing, 0, &[1, 2]));
        let big: Vec<usize> = (1..30).collect();
        assert!(!satisfies_congestion_property(&Growing, 0, &big));
        assert!(satisfies_congestion_property(&b, 0, &big));
    }
}
