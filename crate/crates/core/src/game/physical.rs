//! SINR-based payoffs with accumulated co-channel interference.

use alloc::format;
use alloc::vec::Vec;

use super::Game;
use crate::error::{invalid, precondition, Result};
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalSpec {
    /// Transmit power `η_n`, watts.
    pub power: Vec<f64>,
    /// Own-link distance `d_n`.
    pub link_distance: Vec<f64>,
    /// Symmetric pairwise distances `d_ij`; the diagonal is ignored.
    pub distance: Vec<Vec<f64>>,
    pub path_loss: f64,
    /// Background noise `ω_0`, watts.
    pub noise: f64,
    /// Primary-user interference `ω_m^n`, indexed `[n][m]`.
    pub primary: Vec<Vec<f64>>,
    pub bandwidth: f64,
    pub theta: Vec<f64>,
}

impl PhysicalSpec {
    pub fn validate(&self) -> Result<()> {
        let n = self.power.len();
        let m = self.theta.len();
        if n == 0 || m == 0 {
            return Err(invalid("physical spec needs at least one user and one channel"));
        }
        let pos = |x: f64| x.is_finite() && x > 0.0;
        if self.link_distance.len() != n || self.distance.len() != n || self.primary.len() != n {
            return Err(invalid("physical spec per-user vectors have inconsistent lengths"));
        }
        if !self.power.iter().chain(&self.link_distance).all(|&x| pos(x)) {
            return Err(invalid("powers and link distances must be positive"));
        }
        if !(pos(self.path_loss) && pos(self.bandwidth)) || !(self.noise.is_finite() && self.noise >= 0.0) {
            return Err(invalid("path loss and bandwidth must be positive, noise nonnegative"));
        }
        if self.theta.iter().any(|t| !(t.is_finite() && (0.0..=1.0).contains(t))) {
            return Err(invalid("idle probabilities must lie in [0, 1]"));
        }
        for i in 0..n {
            if self.distance[i].len() != n || self.primary[i].len() != m {
                return Err(invalid(format!("row {i} of the distance or primary matrix has the wrong length")));
            }
            if self.primary[i].iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
                return Err(invalid("primary interference must be nonnegative"));
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = self.distance[i][j];
                if !pos(d) {
                    return Err(invalid(format!("distance {i}-{j} must be positive")));
                }
                if d != self.distance[j][i] {
                    return Err(invalid(format!("distance matrix is not symmetric at {i}-{j}")));
                }
            }
        }
        if self.link_distance.iter().chain(self.distance.iter().flatten()).any(|d| !d.is_finite()) {
            return Err(invalid("distances must be finite"));
        }
        Ok(())
    }

    fn attenuation(&self, d: f64) -> f64 {
        math::powf(d, -self.path_loss)
    }

    /// Interference plus noise seen by `n` on channel `m`.
    fn disturbance(&self, a: &[usize], n: usize, m: usize) -> f64 {
        let others: f64 = (0..self.power.len())
            .filter(|&i| i != n && a[i] == m)
            .map(|i| self.power[i] * self.attenuation(self.distance[i][n]))
            .sum();
        self.noise + self.primary[n][m] + others
    }

    /// Potential for channels sharing one idle probability: minus the
    /// pairwise co-channel coupling minus twice the power-weighted
    /// background disturbance.
    pub fn potential_value(&self, a: &[usize]) -> Result<f64> {
        self.validate()?;
        self.check_profile(a)?;
        let t0 = self.theta[0];
        if self.theta.iter().any(|&t| t != t0) {
            return Err(precondition("channels do not share one idle probability"));
        }
        let n = self.power.len();
        let mut pairs = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j && a[i] == a[j] {
                    pairs += self.power[i] * self.power[j] * self.attenuation(self.distance[i][j]);
                }
            }
        }
        let own: f64 = (0..n)
            .map(|k| self.power[k] * (self.primary[k][a[k]] + self.noise))
            .sum();
        Ok(-pairs - 2.0 * own)
    }

    pub fn payoff_physical(&self, a: &[usize], n: usize) -> Result<f64> {
        self.validate()?;
        self.check_profile(a)?;
        if n >= self.power.len() {
            return Err(invalid(format!("user {n} out of range")));
        }
        Ok(self.payoff(a, n))
    }
}

impl Game for PhysicalSpec {
    fn n_users(&self) -> usize {
        self.power.len()
    }

    fn n_channels(&self) -> usize {
        self.theta.len()
    }

    fn payoff_deviating(&self, a: &[usize], n: usize, m: usize) -> f64 {
        let signal = self.power[n] * self.attenuation(self.link_distance[n]);
        let sinr = signal / self.disturbance(a, n, m);
        self.theta[m] * self.bandwidth * math::log2(1.0 + sinr)
    }
}
