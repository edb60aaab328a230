//! Classical and Bayesian inference for the log-Lindley distribution.
//!
//! The log-Lindley distribution is a two-parameter family on the open unit
//! interval with density
//!
//! ```text
//! f(x | sigma, pi) = sigma * [pi + sigma (pi - 1) ln x] * x^(sigma - 1),   0 < x < 1,
//! ```
//!
//! for a shape parameter `sigma > 0` and a mixing weight `pi` in `[0, 1]`.
//! Unlike the beta distribution it has closed-form moments and distribution
//! function, which makes it attractive for modelling rates and proportions
//! (insurance cost ratios, loss fractions, and similar bounded data).
//!
//! This crate provides:
//!
//! * [`distribution`] — density, distribution function, quantiles (via the
//!   negative branch of the Lambert W function), moments, and random variates;
//! * [`special`] — the scalar special functions the rest of the crate needs
//!   (Lambert W, generalized exponential integrals, log-gamma/log-beta);
//! * [`mle`] — maximum-likelihood fitting with observed and expected (Fisher)
//!   information and Wald confidence intervals;
//! * [`bayes`] — the exact finite-mixture posterior under independent
//!   Gamma/Beta priors, posterior sampling, credible intervals, and a
//!   random-walk Metropolis cross-check;
//! * [`reliability`] — the stress-strength probability `R = P(Y < X)` for two
//!   independent log-Lindley samples, with delta-method and posterior
//!   inference, plus the discrepancy transform `D = 1 - 2R`;
//! * [`simulation`] — a deterministic Monte Carlo harness that reproduces
//!   bias/MSE/interval tables for the estimators above.

pub mod bayes;
pub mod distribution;
mod error;
pub mod mle;
pub mod reliability;
pub mod simulation;
pub mod special;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// A closed interval `[lo, hi]`, used for confidence and credible intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    /// Width `hi - lo`.
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Whether `x` lies inside the interval (inclusive).
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// The interval intersected with `[lo, hi]`.
    pub fn clamped(&self, lo: f64, hi: f64) -> Self {
        Interval { lo: self.lo.clamp(lo, hi), hi: self.hi.clamp(lo, hi) }
    }
}

pub(crate) mod numeric {
    /// Numerically careful sum: pairwise (cascade) summation.
    ///
    /// Used wherever an aggregate must not depend on how work was scheduled:
    /// the result is a pure function of the slice contents and order, and the
    /// O(log n) error growth keeps long Monte Carlo aggregations accurate.
    pub fn pairwise_sum(xs: &[f64]) -> f64 {
        if xs.len() <= 8 {
            let mut s = 0.0;
            for &x in xs {
                s += x;
            }
            return s;
        }
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }

    /// Mean via pairwise summation.
    pub fn pairwise_mean(xs: &[f64]) -> f64 {
        pairwise_sum(xs) / xs.len() as f64
    }

    /// log(sum(exp(xs))) guarded against overflow; -inf entries are ignored.
    pub fn log_sum_exp(xs: &[f64]) -> f64 {
        let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return max;
        }
        let sum: f64 = xs.iter().map(|&x| (x - max).exp()).sum();
        max + sum.ln()
    }

    /// log(exp(a) + exp(b)) without overflow.
    pub fn log_add_exp(a: f64, b: f64) -> f64 {
        if a == f64::NEG_INFINITY {
            return b;
        }
        if b == f64::NEG_INFINITY {
            return a;
        }
        let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
        hi + (lo - hi).exp().ln_1p()
    }

    /// ln(1 + e^x), the softplus function, stable for large |x|.
    pub fn softplus(x: f64) -> f64 {
        if x > 35.0 {
            x
        } else if x < -35.0 {
            x.exp()
        } else {
            x.exp().ln_1p()
        }
    }

    /// Empirical quantile with linear interpolation between order statistics
    /// (the common "type 7" definition). `sorted` must be ascending.
    pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
        debug_assert!(!sorted.is_empty());
        let n = sorted.len();
        if n == 1 {
            return sorted[0];
        }
        let h = q.clamp(0.0, 1.0) * (n - 1) as f64;
        let i = h.floor() as usize;
        if i + 1 >= n {
            return sorted[n - 1];
        }
        let frac = h - i as f64;
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    }

    /// Bisection for a monotone increasing function `f` with a sign change on
    /// `[lo, hi]`; returns the abscissa where `f` crosses zero.
    pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, iters: u32) -> f64 {
        for _ in 0..iters {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

#[cfg(test)]
mod tests {
    use super::numeric::*;
    use super::Interval;

    #[test]
    fn pairwise_sum_matches_naive_on_small_slices() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-9);
    }

    #[test]
    fn log_sum_exp_handles_extremes() {
        assert!((log_sum_exp(&[0.0, 0.0]) - std::f64::consts::LN_2).abs() < 1e-15);
        let shifted = log_sum_exp(&[1000.0, 1000.0]);
        assert!((shifted - (1000.0 + std::f64::consts::LN_2)).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY; 3]), f64::NEG_INFINITY);
    }

    #[test]
    fn quantile_sorted_interpolates() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&xs, 0.0), 1.0);
        assert_eq!(quantile_sorted(&xs, 1.0), 4.0);
        assert!((quantile_sorted(&xs, 0.5) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn interval_basics() {
        let iv = Interval::new(-0.25, 0.5);
        assert!(iv.contains(0.0) && !iv.contains(0.75));
        let cl = iv.clamped(0.0, 1.0);
        assert_eq!((cl.lo, cl.hi), (0.0, 0.5));
        assert!((iv.width() - 0.75).abs() < 1e-15);
    }
}
