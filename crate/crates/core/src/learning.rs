//! Distributed Boltzmann learning: perceptions, the logit map, the mean
//! dynamics operator `Q` and its fixed point, and the entropy gap of the
//! resulting approximate equilibrium.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::estimation::EstimationNoise;
use crate::game::{
    neighborhood_expected_payoff, neighborhood_expected_payoff_mc, payoff_mixed, Game, GameSpec, MixedProfile,
};
use crate::math;

/// `σ_m ∝ exp(γ P_m)`, evaluated after subtracting the row maximum.
pub fn boltzmann_strategy(row: &[f64], gamma: f64) -> Result<Vec<f64>> {
    if row.is_empty() {
        return Err(invalid("perception row is empty"));
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(invalid(format!("temperature {gamma} must be positive")));
    }
    if row.iter().any(|x| !x.is_finite()) {
        return Err(invalid("perception row has a non-finite entry"));
    }
    Ok(boltzmann_unchecked(row, gamma))
}

fn boltzmann_unchecked(row: &[f64], gamma: f64) -> Vec<f64> {
    let top = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = row.iter().map(|&x| math::exp(gamma * (x - top))).collect();
    let z: f64 = out.iter().sum();
    for x in out.iter_mut() {
        *x /= z;
    }
    out
}

/// Logit image of a whole perception matrix.
pub fn boltzmann_profile(p: &[Vec<f64>], gamma: f64) -> Result<MixedProfile> {
    let rows = p
        .iter()
        .map(|row| boltzmann_strategy(row, gamma))
        .collect::<Result<Vec<_>>>()?;
    MixedProfile::new(rows)
}

/// Step sizes `μ_T` of the perception update.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SmoothingSchedule {
    /// `μ_T = 1/T`.
    #[default]
    Harmonic,
    /// `μ_T = T^(-exponent)`; needs `exponent` in `(1/2, 1]`.
    Power { exponent: f64 },
}

impl SmoothingSchedule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SmoothingSchedule::Power { exponent } if !(exponent > 0.5 && exponent <= 1.0) => Err(invalid(
                format!("smoothing exponent {exponent} must lie in (0.5, 1]"),
            )),
            _ => Ok(()),
        }
    }

    /// Step size of period `t >= 1`.
    pub fn mu(&self, t: u64) -> f64 {
        let t = t.max(1) as f64;
        match *self {
            SmoothingSchedule::Harmonic => 1.0 / t,
            SmoothingSchedule::Power { exponent } => math::powf(t, -exponent),
        }
    }
}

/// Per-user per-channel perceptions.
#[derive(Debug, Clone, PartialEq)]
pub struct PerceptionState {
    p: Vec<Vec<f64>>,
    gamma: f64,
    /// Index of the current period, starting at 1.
    period: u64,
    schedule: SmoothingSchedule,
}

impl PerceptionState {
    /// Every perception starts at `initial`, or `1/M` if not given.
    pub fn new(
        n_users: usize,
        n_channels: usize,
        gamma: f64,
        schedule: SmoothingSchedule,
        initial: Option<f64>,
    ) -> Result<Self> {
        if n_users == 0 || n_channels == 0 {
            return Err(invalid("perception matrix needs users and channels"));
        }
        let init = initial.unwrap_or(1.0 / n_channels as f64);
        Self::from_matrix(vec![vec![init; n_channels]; n_users], gamma, schedule)
    }

    pub fn from_matrix(p: Vec<Vec<f64>>, gamma: f64, schedule: SmoothingSchedule) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(invalid(format!("temperature {gamma} must be positive")));
        }
        schedule.validate()?;
        let width = p.first().map_or(0, Vec::len);
        if width == 0 || p.iter().any(|r| r.len() != width || r.iter().any(|x| !x.is_finite())) {
            return Err(invalid("perception matrix must be rectangular and finite"));
        }
        Ok(Self {
            p,
            gamma,
            period: 1,
            schedule,
        })
    }

    pub fn perceptions(&self) -> &[Vec<f64>] {
        &self.p
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn mu(&self) -> f64 {
        self.schedule.mu(self.period)
    }

    pub fn strategy(&self) -> MixedProfile {
        MixedProfile::from_rows_unchecked(self.p.iter().map(|r| boltzmann_unchecked(r, self.gamma)).collect())
    }

    /// `P_m^n ← (1 − μ_T) P_m^n + μ_T Ũ` for the chosen channel only.
    pub fn perception_update(&mut self, n: usize, m: usize, estimate: f64) -> Result<()> {
        let mu = self.mu();
        self.update_with_step(n, m, estimate, mu)
    }

    /// Same update with an explicit step size.
    pub fn update_with_step(&mut self, n: usize, m: usize, estimate: f64, mu: f64) -> Result<()> {
        if n >= self.p.len() || m >= self.p[0].len() {
            return Err(invalid(format!("entry ({n}, {m}) out of range")));
        }
        if !estimate.is_finite() || !(0.0..=1.0).contains(&mu) {
            return Err(invalid("estimate must be finite and the step size in [0, 1]"));
        }
        let old = self.p[n][m];
        self.p[n][m] = (1.0 - mu) * old + mu * estimate;
        Ok(())
    }

    /// Moves to the next period.
    pub fn advance_period(&mut self) {
        self.period += 1;
    }
}

/// Largest temperature for which `Q` is a max-norm contraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaBound {
    Finite(f64),
    /// No interference at all: `Q` does not depend on `P`.
    Unbounded,
}

impl GammaBound {
    /// Strict test `gamma < bound`.
    pub fn admits(&self, gamma: f64) -> bool {
        match *self {
            GammaBound::Finite(b) => gamma < b,
            GammaBound::Unbounded => true,
        }
    }
}

/// `1 / (2 · max_{n,m} h_n θ_m B_m^n · max_n |N_n|)`.
pub fn contraction_temperature_bound(spec: &GameSpec) -> GammaBound {
    let degree = spec.graph().max_in_degree();
    if degree == 0 {
        return GammaBound::Unbounded;
    }
    let top = (0..spec.n_users())
        .flat_map(|n| (0..spec.n_channels()).map(move |m| (n, m)))
        .map(|(n, m)| spec.base_value(n, m))
        .fold(0.0, f64::max);
    if top == 0.0 {
        return GammaBound::Unbounded;
    }
    GammaBound::Finite(1.0 / (2.0 * top * degree as f64))
}

/// Samples per entry when `Q` falls back to Monte Carlo.
const MC_SAMPLES: usize = 20_000;

/// `Q(P)`: conditional expected payoffs under the logit image of `P`.
pub fn mean_dynamics_operator(spec: &GameSpec, p: &[Vec<f64>], gamma: f64) -> Result<Vec<Vec<f64>>> {
    check_shape(spec, p)?;
    let sigma = boltzmann_profile(p, gamma)?;
    q_of_sigma(spec, &sigma)
}

fn q_of_sigma(spec: &GameSpec, sigma: &MixedProfile) -> Result<Vec<Vec<f64>>> {
    let mut q = vec![vec![0.0; spec.n_channels()]; spec.n_users()];
    for (n, row) in q.iter_mut().enumerate() {
        for (m, entry) in row.iter_mut().enumerate() {
            *entry = match neighborhood_expected_payoff(spec, sigma, n, m) {
                Ok(v) => v,
                Err(Error::ResourceLimit { .. }) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(0x51_6d_a7 + (n * 1024 + m) as u64);
                    neighborhood_expected_payoff_mc(spec, sigma, n, m, MC_SAMPLES, &mut rng)?.0
                }
                Err(e) => return Err(e),
            };
        }
    }
    Ok(q)
}

fn check_shape(spec: &GameSpec, p: &[Vec<f64>]) -> Result<()> {
    if p.len() != spec.n_users() || p.iter().any(|r| r.len() != spec.n_channels()) {
        return Err(invalid("perception matrix does not match the game dimensions"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub perceptions: Vec<Vec<f64>>,
    pub sigma: MixedProfile,
    /// Number of applications of `Q` before the residual fell below `tol`.
    pub iterations: usize,
    /// `‖Q(P) − P‖∞` at the returned `P`.
    pub residual: f64,
    pub converged: bool,
    /// The temperature was at or above the contraction bound.
    pub above_bound: bool,
}

/// Iterates `P ← Q(P)` from `start` (all entries `1/M` if `None`) until
/// `‖Q(P) − P‖∞ < tol`. Returns a non-converged result after `max_iter`.
pub fn mean_dynamics_fixed_point(
    spec: &GameSpec,
    gamma: f64,
    tol: f64,
    max_iter: usize,
    start: Option<&[Vec<f64>]>,
) -> Result<FixedPoint> {
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let above_bound = !contraction_temperature_bound(spec).admits(gamma);
    if above_bound {
        log::warn!("temperature {gamma} is not below the contraction bound; the fixed point may not be unique");
    }
    let mut p = match start {
        Some(s) => s.to_vec(),
        None => vec![vec![1.0 / spec.n_channels() as f64; spec.n_channels()]; spec.n_users()],
    };
    check_shape(spec, &p)?;
    let mut iterations = 0;
    loop {
        let q = mean_dynamics_operator(spec, &p, gamma)?;
        let residual = math::max_abs_diff(&q, &p);
        if residual < tol || iterations >= max_iter {
            let converged = residual < tol;
            if !converged {
                log::warn!("mean dynamics did not reach tolerance {tol} in {max_iter} iterations, residual {residual}");
            }
            let sigma = boltzmann_profile(&p, gamma)?;
            return Ok(FixedPoint {
                perceptions: p,
                sigma,
                iterations,
                residual,
                converged,
                above_bound,
            });
        }
        p = q;
        iterations += 1;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    /// `max_n −(1/γ) Σ_m σ_m^n ln σ_m^n`.
    pub delta: f64,
    /// `(1/γ) ln M`.
    pub entropy_bound: f64,
    /// Best pure-response gain of each user against `σ_{−n}`.
    pub best_response_gain: Vec<f64>,
    /// Every gain is at most `delta + 1e-9`.
    pub certified: bool,
}

/// Entropy gap of `sigma` and the exact best-response gains it bounds.
pub fn approx_ne_gap(spec: &GameSpec, sigma: &MixedProfile, gamma: f64) -> Result<GapReport> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(invalid("temperature must be positive"));
    }
    let entropy = |row: &[f64]| -> f64 {
        -row.iter().filter(|&&s| s > 0.0).map(|&s| s * math::ln(s)).sum::<f64>()
    };
    let delta = sigma.rows().iter().map(|r| entropy(r) / gamma).fold(0.0, f64::max);
    let q = q_of_sigma(spec, sigma)?;
    let mut gains = Vec::with_capacity(spec.n_users());
    for (n, row) in q.iter().enumerate() {
        let current = payoff_mixed(spec, sigma, n)?;
        let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        gains.push((best - current).max(0.0));
    }
    let certified = gains.iter().all(|&g| g <= delta + 1e-9);
    Ok(GapReport {
        delta,
        entropy_bound: math::ln(spec.n_channels() as f64) / gamma,
        best_response_gain: gains,
        certified,
    })
}

/// What users learn at the end of a decision period.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodObservation {
    /// Throughput estimate per user; `None` skips that user's update.
    pub estimates: Vec<Option<f64>>,
    /// Realized total throughput of the period, if the oracle measures it.
    pub welfare: Option<f64>,
}

/// Source of per-period throughput estimates for the learning loop.
pub trait ThroughputOracle {
    fn observe(&mut self, choices: &[usize]) -> Result<PeriodObservation>;
}

/// Exact expected payoffs `U_n(a)` plus optional bounded noise.
pub struct ExactPayoffs<'a> {
    spec: &'a GameSpec,
    noise: EstimationNoise,
    rng: ChaCha8Rng,
}

impl<'a> ExactPayoffs<'a> {
    pub fn new(spec: &'a GameSpec, noise: EstimationNoise, seed: u64) -> Result<Self> {
        noise.validate()?;
        Ok(Self {
            spec,
            noise,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }
}

impl ThroughputOracle for ExactPayoffs<'_> {
    fn observe(&mut self, choices: &[usize]) -> Result<PeriodObservation> {
        let estimates = (0..self.spec.n_users())
            .map(|n| Some(self.spec.payoff(choices, n) + self.noise.sample(&mut self.rng)))
            .collect();
        Ok(PeriodObservation {
            estimates,
            welfare: Some(self.spec.welfare(choices)),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearningConfig {
    pub gamma: f64,
    pub periods: u64,
    pub schedule: SmoothingSchedule,
    /// Initial perception value; `1/M` if `None`.
    pub initial: Option<f64>,
    /// Sliding window for the convergence test.
    pub window: usize,
    /// Convergence threshold on the largest perception change in the window.
    pub zeta: f64,
    /// Perceptions to measure `‖P(T) − P*‖∞` against.
    pub reference: Option<Vec<Vec<f64>>>,
    /// Keep per-period choices and estimates.
    pub record_periods: bool,
    /// Seeds the per-user channel-selection streams.
    pub seed: u64,
}

impl LearningConfig {
    pub fn new(gamma: f64, periods: u64, seed: u64) -> Self {
        Self {
            gamma,
            periods,
            schedule: SmoothingSchedule::Harmonic,
            initial: None,
            window: 50,
            zeta: 1e-3,
            reference: None,
            record_periods: false,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodRecord {
    pub period: u64,
    pub choices: Vec<usize>,
    pub estimates: Vec<Option<f64>>,
    pub welfare: f64,
    pub max_change: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearningOutcome {
    pub perceptions: Vec<Vec<f64>>,
    pub sigma: MixedProfile,
    /// Welfare of each period: realized if the oracle reports it, else the
    /// expected welfare of the chosen profile.
    pub welfare: Vec<f64>,
    /// `‖P(T) − P*‖∞` per period when a reference was given.
    pub distance: Option<Vec<f64>>,
    pub converged: bool,
    /// First period closing a window with all changes below `zeta`.
    pub converged_at: Option<u64>,
    pub periods: u64,
    pub skipped_updates: u64,
    pub delta: f64,
    pub records: Vec<PeriodRecord>,
}

/// Stream id reserved for user `n`'s channel selection.
pub fn selection_stream(n: usize) -> u64 {
    0x5e1e_c700_0000 + n as u64
}

/// Runs the learning loop: sample channels from the Boltzmann rows,
/// observe the period, update the chosen entries.
pub fn run_learning<O: ThroughputOracle + ?Sized>(
    spec: &GameSpec,
    oracle: &mut O,
    cfg: &LearningConfig,
) -> Result<LearningOutcome> {
    if cfg.periods == 0 {
        return Err(invalid("at least one period is required"));
    }
    if cfg.window == 0 {
        return Err(invalid("convergence window must be positive"));
    }
    if let Some(r) = &cfg.reference {
        check_shape(spec, r)?;
    }
    let (n_users, n_channels) = (spec.n_users(), spec.n_channels());
    let mut state = PerceptionState::new(n_users, n_channels, cfg.gamma, cfg.schedule, cfg.initial)?;
    let mut rngs: Vec<ChaCha8Rng> = (0..n_users)
        .map(|n| {
            let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
            r.set_stream(selection_stream(n));
            r
        })
        .collect();

    let mut welfare = Vec::with_capacity(cfg.periods as usize);
    let mut distance = cfg.reference.as_ref().map(|_| Vec::with_capacity(cfg.periods as usize));
    let mut records = Vec::new();
    let mut quiet_run = 0usize;
    let mut converged_at = None;
    let mut skipped = 0u64;
    let mut choices = vec![0usize; n_users];

    for t in 1..=cfg.periods {
        let sigma = state.strategy();
        for n in 0..n_users {
            choices[n] = sample_row(sigma.row(n), &mut rngs[n]);
        }
        let obs = oracle.observe(&choices)?;
        if obs.estimates.len() != n_users {
            return Err(invalid("oracle returned the wrong number of estimates"));
        }
        let mut max_change: f64 = 0.0;
        for n in 0..n_users {
            match obs.estimates[n] {
                Some(u) => {
                    let before = state.p[n][choices[n]];
                    state.perception_update(n, choices[n], u)?;
                    max_change = max_change.max((state.p[n][choices[n]] - before).abs());
                }
                None => {
                    skipped += 1;
                    log::trace!("period {t}: no estimate for user {n}, update skipped");
                }
            }
        }
        state.advance_period();

        let w = obs.welfare.unwrap_or_else(|| spec.welfare(&choices));
        welfare.push(w);
        if let (Some(d), Some(r)) = (distance.as_mut(), cfg.reference.as_ref()) {
            d.push(math::max_abs_diff(&state.p, r));
        }
        if max_change < cfg.zeta {
            quiet_run += 1;
        } else {
            quiet_run = 0;
        }
        if converged_at.is_none() && quiet_run >= cfg.window {
            converged_at = Some(t);
        }
        if cfg.record_periods {
            records.push(PeriodRecord {
                period: t,
                choices: choices.clone(),
                estimates: obs.estimates,
                welfare: w,
                max_change,
            });
        }
    }

    let sigma = state.strategy();
    let delta = approx_entropy_gap(&sigma, cfg.gamma);
    Ok(LearningOutcome {
        perceptions: state.p,
        sigma,
        welfare,
        distance,
        converged: quiet_run >= cfg.window,
        converged_at,
        periods: cfg.periods,
        skipped_updates: skipped,
        delta,
        records,
    })
}

fn approx_entropy_gap(sigma: &MixedProfile, gamma: f64) -> f64 {
    sigma
        .rows()
        .iter()
        .map(|r| -r.iter().filter(|&&s| s > 0.0).map(|&s| s * math::ln(s)).sum::<f64>() / gamma)
        .fold(0.0, f64::max)
}

/// Draws an index from a probability row.
pub fn sample_row<R: Rng + ?Sized>(row: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (m, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return m;
        }
    }
    // Rounding left `u` above the cumulative sum: take the last positive entry.
    row.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}
