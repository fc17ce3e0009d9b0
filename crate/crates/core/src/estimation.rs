//! Maximum-likelihood estimates of idle probability, grab probability and
//! mean rate from one decision period of local observations.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{invalid, Error, Result};

/// Per-slot observations of one user on its chosen channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSet {
    idle: Vec<bool>,
    grabbed: Vec<bool>,
    rate: Vec<f64>,
}

impl ObservationSet {
    /// Enforces `I <= S` and `b > 0 => I = 1`.
    pub fn new(idle: Vec<bool>, grabbed: Vec<bool>, rate: Vec<f64>) -> Result<Self> {
        if idle.is_empty() || idle.len() != grabbed.len() || idle.len() != rate.len() {
            return Err(invalid("observation sequences must be non-empty and of equal length"));
        }
        for t in 0..idle.len() {
            if grabbed[t] && !idle[t] {
                return Err(invalid(format!("slot {t}: channel grabbed while busy")));
            }
            let b = rate[t];
            if !(b.is_finite() && b >= 0.0) {
                return Err(invalid(format!("slot {t}: rate {b} is not a nonnegative number")));
            }
            if b > 0.0 && !grabbed[t] {
                return Err(invalid(format!("slot {t}: positive rate without a grab")));
            }
        }
        Ok(Self { idle, grabbed, rate })
    }

    pub fn len(&self) -> usize {
        self.idle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idle.is_empty()
    }

    pub fn idle(&self) -> &[bool] {
        &self.idle
    }

    pub fn grabbed(&self) -> &[bool] {
        &self.grabbed
    }

    pub fn rate(&self) -> &[f64] {
        &self.rate
    }

    /// `(ΣS, ΣI, Σb)`.
    pub fn sums(&self) -> (usize, usize, f64) {
        (
            self.idle.iter().filter(|&&s| s).count(),
            self.grabbed.iter().filter(|&&i| i).count(),
            self.rate.iter().sum(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovEstimate {
    pub epsilon: f64,
    pub xi: f64,
    pub theta: f64,
}

/// Transition-count estimates of a two-state chain; the initial-state
/// factor of the likelihood is dropped.
pub fn mle_markov(states: &[bool]) -> Result<MarkovEstimate> {
    if states.len() < 2 {
        return Err(invalid("at least two states are needed"));
    }
    let mut c = [[0u64; 2]; 2];
    for w in states.windows(2) {
        c[usize::from(w[0])][usize::from(w[1])] += 1;
    }
    let from_busy = c[0][0] + c[0][1];
    let from_idle = c[1][1] + c[1][0];
    if from_busy == 0 {
        return Err(Error::UndefinedEstimate("no transition out of the busy state"));
    }
    if from_idle == 0 {
        return Err(Error::UndefinedEstimate("no transition out of the idle state"));
    }
    let epsilon = c[0][1] as f64 / from_busy as f64;
    let xi = c[1][0] as f64 / from_idle as f64;
    if epsilon + xi == 0.0 {
        return Err(Error::UndefinedEstimate("no state change observed"));
    }
    Ok(MarkovEstimate {
        epsilon,
        xi,
        theta: epsilon / (epsilon + xi),
    })
}

/// `ΣI / ΣS`.
pub fn mle_grab(obs: &ObservationSet) -> Result<f64> {
    let (s, i, _) = obs.sums();
    if s == 0 {
        return Err(Error::UndefinedEstimate("channel never idle"));
    }
    Ok(i as f64 / s as f64)
}

/// `Σb / ΣI`.
pub fn mle_rate(obs: &ObservationSet) -> Result<f64> {
    let (_, i, b) = obs.sums();
    if i == 0 {
        return Err(Error::UndefinedEstimate("channel never grabbed"));
    }
    Ok(b / i as f64)
}

/// Bounded zero-mean perturbation added to throughput estimates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum EstimationNoise {
    #[default]
    None,
    /// Uniform on `(-half_width, half_width)`.
    Uniform { half_width: f64 },
}

impl EstimationNoise {
    pub fn validate(&self) -> Result<()> {
        match *self {
            EstimationNoise::Uniform { half_width } if !(half_width.is_finite() && half_width >= 0.0) => {
                Err(invalid("noise half width must be nonnegative"))
            }
            _ => Ok(()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            EstimationNoise::None => 0.0,
            EstimationNoise::Uniform { half_width } if half_width > 0.0 => {
                rng.gen_range(-half_width..half_width)
            }
            EstimationNoise::Uniform { .. } => 0.0,
        }
    }
}

/// How the idle probability is estimated from the period's channel states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IdleEstimator {
    /// Markov transition counts.
    #[default]
    Markov,
    /// Markov counts, or the idle fraction when the trace has no excursion.
    MarkovOrFrequency,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputEstimate {
    pub theta_hat: f64,
    pub grab_hat: f64,
    /// Undefined when the user never grabbed the channel.
    pub rate_hat: Option<f64>,
    pub noiseless: f64,
    pub throughput_hat: f64,
    /// The idle fraction replaced an undefined Markov estimate.
    pub theta_from_frequency: bool,
}

/// `θ̃ B̃ g̃` plus one noise draw. A period with idle slots but no grab has
/// `g̃ = 0`, so the product is zero even though `B̃` is undefined.
pub fn estimate_throughput<R: Rng + ?Sized>(
    obs: &ObservationSet,
    idle_estimator: IdleEstimator,
    noise: EstimationNoise,
    rng: &mut R,
) -> Result<ThroughputEstimate> {
    let (theta_hat, theta_from_frequency) = match (mle_markov(obs.idle()), idle_estimator) {
        (Ok(e), _) => (e.theta, false),
        (Err(_), IdleEstimator::MarkovOrFrequency) => {
            let (s, _, _) = obs.sums();
            (s as f64 / obs.len() as f64, true)
        }
        (Err(e), IdleEstimator::Markov) => return Err(e),
    };
    let grab_hat = mle_grab(obs)?;
    let rate_hat = mle_rate(obs).ok();
    let noiseless = theta_hat * grab_hat * rate_hat.unwrap_or(0.0);
    Ok(ThroughputEstimate {
        theta_hat,
        grab_hat,
        rate_hat,
        noiseless,
        throughput_hat: noiseless + noise.sample(rng),
        theta_from_frequency,
    })
}
