//! Floating-point helpers shared by the game, learning and simulation code.
//!
//! Transcendental functions go through `libm` so results do not depend on the
//! platform's `std` math library.

use core::cmp::Ordering;

/// Relative threshold below which two payoffs are treated as equal.
pub const REL_TOL: f64 = 1e-12;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

/// `x^k` by repeated squaring; exact for the small integer exponents used by
/// the backoff sum.
pub fn powi(mut x: f64, mut k: u32) -> f64 {
    let mut acc = 1.0;
    while k > 0 {
        if k & 1 == 1 {
            acc *= x;
        }
        x *= x;
        k >>= 1;
    }
    acc
}

/// `true` iff `new` exceeds `old` by more than [`REL_TOL`] relative to the
/// larger magnitude.
#[inline]
pub fn strictly_greater(new: f64, old: f64) -> bool {
    new - old > REL_TOL * new.abs().max(old.abs())
}

/// Sign of `a - b` with a relative zero band of width `band`.
pub fn sign_of_difference(a: f64, b: f64, band: f64) -> Ordering {
    let diff = a - b;
    if diff.abs() <= band * a.abs().max(b.abs()) {
        Ordering::Equal
    } else if diff > 0.0 {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

/// Index of the largest entry; the lowest index wins ties. `values` must be
/// nonempty.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if strictly_greater(v, values[best]) {
            best = i;
        }
    }
    best
}

/// Maximum absolute entry-wise difference of two equally shaped matrices.
pub fn max_abs_diff(a: &[alloc::vec::Vec<f64>], b: &[alloc::vec::Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

/// `e^x * E1(x)` for `x > 0`, where `E1` is the exponential integral.
pub fn exp_e1(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x <= 1.0 {
        // power series for E1
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        exp(x) * (-EULER_GAMMA - ln(x) - sum)
    } else {
        // modified Lentz evaluation of the continued fraction
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h
    }
}

/// `E[log2(1 + snr * X)]` for `X ~ Exponential(1)`.
pub fn rayleigh_mean_log2(mean_snr: f64) -> f64 {
    if mean_snr <= 0.0 {
        return 0.0;
    }
    exp_e1(1.0 / mean_snr) / core::f64::consts::LN_2
}
