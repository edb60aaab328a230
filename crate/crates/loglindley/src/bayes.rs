//! Bayesian inference for the log-Lindley distribution.
//!
//! Under independent Gamma (shape `delta`, rate `tau`) and Beta
//! (`alpha`, `beta`) priors on `sigma` and `pi`, the posterior is available
//! in closed form as a finite mixture.  Writing `y_j = -ln x_j > 0`, the
//! likelihood factors through the elementary symmetric polynomials
//! `V_i = e_i(y_1, ..., y_m)`:
//!
//! ```text
//! prod_j [pi + sigma (1 - pi) y_j] = sum_{i=0}^m V_i sigma^i (1-pi)^i pi^(m-i),
//! ```
//!
//! so the posterior density is proportional to
//!
//! ```text
//! sum_{i=0}^m V_i sigma^(m+delta+i-1) e^{-(tau+V_1) sigma}
//!                 pi^(alpha+m-i-1) (1-pi)^(beta+i-1),
//! ```
//!
//! a mixture of products Gamma(`m+delta+i`, rate `tau+V_1`) x
//! Beta(`alpha+m-i`, `beta+i`) with unnormalized weights
//!
//! ```text
//! W_i = V_i Gamma(m+delta+i) B(alpha+m-i, beta+i) / (tau+V_1)^(m+delta+i).
//! ```
//!
//! Everything downstream — posterior means, equal-tailed credible intervals,
//! exact ancestral sampling — works directly on this mixture.  All weight
//! arithmetic happens in log space; the `V_i` themselves are also tracked in
//! linear space purely to report when they overflow `f64` (they do for large
//! samples, without affecting any result).
//!
//! The [`mcmc`] submodule provides an independent random-walk Metropolis
//! sampler over the same posterior, used to cross-check the closed form.

pub mod mcmc;

use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::distribution::Sample;
use crate::numeric::{log_add_exp, log_sum_exp};
use crate::{Error, Interval, Result};

/// Mixture components whose normalized log-weight falls this far below the
/// largest one are skipped in quadrature-style sums (CDFs, quantiles); their
/// total mass is below 1e-16 even for the largest supported samples.
const LOG_WEIGHT_CUTOFF: f64 = 46.0;

/// Hyper-parameters: Gamma(shape `delta`, rate `tau`) on `sigma`,
/// Beta(`alpha`, `beta`) on `pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    /// Rate of the Gamma prior on `sigma`.
    pub tau: f64,
    /// Shape of the Gamma prior on `sigma`.
    pub delta: f64,
    /// First Beta parameter for `pi`.
    pub alpha: f64,
    /// Second Beta parameter for `pi`.
    pub beta: f64,
}

impl PriorSpec {
    /// Validates and constructs a prior specification (all four
    /// hyper-parameters must be positive and finite).
    pub fn new(tau: f64, delta: f64, alpha: f64, beta: f64) -> Result<Self> {
        for (name, v) in [("tau", tau), ("delta", delta), ("alpha", alpha), ("beta", beta)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameters(format!(
                    "prior {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(PriorSpec { tau, delta, alpha, beta })
    }

    /// The flat-ish reference prior used when nothing else is specified:
    /// Gamma(1, 1) x Beta(1, 1) (unit-mean exponential on `sigma`, uniform
    /// on `pi`).
    pub fn reference() -> Self {
        PriorSpec { tau: 1.0, delta: 1.0, alpha: 1.0, beta: 1.0 }
    }

    /// The informative presets used throughout the simulation studies: each
    /// anchors the prior mean at the generating value (`delta/tau = sigma`,
    /// `alpha/(alpha+beta) = pi`) with mild concentration.  Only the study
    /// grid values are mapped; anything else returns `None`.
    pub fn informative_for(sigma: f64, pi: f64) -> Option<Self> {
        let close = |a: f64, b: f64| (a - b).abs() < 1e-9;
        let (tau, delta) = if close(sigma, 1.0) {
            (1.0, 1.0)
        } else if close(sigma, 2.5) {
            (2.0, 5.0)
        } else if close(sigma, 3.5) {
            (2.0, 7.0)
        } else {
            return None;
        };
        let (alpha, beta) = if close(pi, 0.2) {
            (1.0, 4.0)
        } else if close(pi, 0.5) {
            (1.0, 1.0)
        } else if close(pi, 0.7) {
            (3.5, 1.5)
        } else {
            return None;
        };
        Some(PriorSpec { tau, delta, alpha, beta })
    }
}

/// Elementary symmetric polynomials `V_i = e_i(y_1, ..., y_m)` of the
/// transformed observations `y_j = -ln x_j`.
///
/// The classical O(m^2) recurrence is run twice: once in linear space (whose
/// values overflow to infinity for large samples — recorded, not fatal) and
/// once in log space, where every term is positive so the log-sum-exp update
/// is cancellation-free.
#[derive(Debug, Clone)]
pub struct SymmetricStats {
    log_v: Vec<f64>,
    v_linear: Vec<f64>,
    overflowed: bool,
}

impl SymmetricStats {
    pub fn from_sample(sample: &Sample) -> Self {
        Self::from_neg_logs(&sample.neg_log_values())
    }

    pub(crate) fn from_neg_logs(y: &[f64]) -> Self {
        let m = y.len();
        let mut v = vec![0.0; m + 1];
        v[0] = 1.0;
        let mut log_v = vec![f64::NEG_INFINITY; m + 1];
        log_v[0] = 0.0;
        for (j, &yj) in y.iter().enumerate() {
            let ly = yj.ln();
            for i in (1..=j + 1).rev() {
                v[i] += yj * v[i - 1];
                log_v[i] = log_add_exp(log_v[i], ly + log_v[i - 1]);
            }
        }
        let overflowed = v.iter().any(|x| !x.is_finite());
        SymmetricStats { log_v, v_linear: v, overflowed }
    }

    /// Number of observations `m`.
    pub fn len(&self) -> usize {
        self.log_v.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `ln V_i` for `i = 0..=m`; always finite (`V_i > 0`).
    pub fn log_v(&self) -> &[f64] {
        &self.log_v
    }

    /// `V_i` in plain arithmetic; entries may be `inf` when
    /// [`overflowed`](Self::overflowed) reports true.
    pub fn v_linear(&self) -> &[f64] {
        &self.v_linear
    }

    /// Whether any linear-space `V_i` exceeded the `f64` range.
    pub fn overflowed(&self) -> bool {
        self.overflowed
    }

    /// `V_1 = sum_j y_j`, the negative log of the sample product.
    pub fn v1(&self) -> f64 {
        self.v_linear[1]
    }
}

/// The closed-form posterior: a finite mixture of independent
/// Gamma x Beta products (see the module docs).
#[derive(Debug, Clone)]
pub struct PosteriorMixture {
    m: usize,
    rate: f64,
    delta: f64,
    alpha: f64,
    beta: f64,
    /// Normalized log-weights (`log_sum_exp == 0`).
    log_w: Vec<f64>,
    weights: Vec<f64>,
    /// Indices of components with non-negligible weight.
    active: Vec<usize>,
    /// Whether the linear-space symmetric polynomials overflowed.
    linear_overflow: bool,
}

/// Builds the posterior mixture for `sample` under `prior`.
pub fn posterior(sample: &Sample, prior: &PriorSpec) -> Result<PosteriorMixture> {
    PriorSpec::new(prior.tau, prior.delta, prior.alpha, prior.beta)?;
    let stats = SymmetricStats::from_sample(sample);
    posterior_from_stats(&stats, prior)
}

fn posterior_from_stats(stats: &SymmetricStats, prior: &PriorSpec) -> Result<PosteriorMixture> {
    let m = stats.len();
    let mf = m as f64;
    let rate = prior.tau + stats.v1();
    if !rate.is_finite() {
        return Err(Error::DegenerateSample(
            "sum of -ln x overflows; observations are indistinguishable from 0".into(),
        ));
    }
    let ln_rate = rate.ln();
    let lg_ab_m = ln_gamma(prior.alpha + prior.beta + mf);
    let mut log_w: Vec<f64> = Vec::with_capacity(m + 1);
    for i in 0..=m {
        let fi = i as f64;
        let shape = mf + prior.delta + fi;
        let lw = stats.log_v()[i] + ln_gamma(prior.alpha + mf - fi) + ln_gamma(prior.beta + fi)
            - lg_ab_m
            + ln_gamma(shape)
            - shape * ln_rate;
        log_w.push(lw);
    }
    let norm = log_sum_exp(&log_w);
    if !norm.is_finite() {
        return Err(Error::Convergence(
            "posterior mixture weights are numerically degenerate".into(),
        ));
    }
    for lw in &mut log_w {
        *lw -= norm;
    }
    let weights: Vec<f64> = log_w.iter().map(|&lw| lw.exp()).collect();
    let max_lw = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let active: Vec<usize> = (0..=m).filter(|&i| log_w[i] >= max_lw - LOG_WEIGHT_CUTOFF).collect();
    Ok(PosteriorMixture {
        m,
        rate,
        delta: prior.delta,
        alpha: prior.alpha,
        beta: prior.beta,
        log_w,
        weights,
        active,
        linear_overflow: stats.overflowed(),
    })
}

impl PosteriorMixture {
    /// Number of observations behind the posterior.
    pub fn sample_size(&self) -> usize {
        self.m
    }

    /// Rate `tau + V_1` shared by every Gamma component.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Normalized mixture weights `w_0, ..., w_m`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Normalized log-weights (`log_sum_exp == 0`), exact even when the
    /// plain weights underflow.
    pub fn log_weights(&self) -> &[f64] {
        &self.log_w
    }

    /// Whether the linear-space symmetric polynomials overflowed while
    /// assembling this posterior (log-space values are exact either way).
    pub fn linear_overflow(&self) -> bool {
        self.linear_overflow
    }

    fn gamma_shape(&self, i: usize) -> f64 {
        self.m as f64 + self.delta + i as f64
    }

    fn beta_params(&self, i: usize) -> (f64, f64) {
        (self.alpha + (self.m - i) as f64, self.beta + i as f64)
    }

    /// Posterior mean of `sigma`: `sum_i w_i (m + delta + i) / (tau + V_1)`.
    pub fn sigma_mean(&self) -> f64 {
        let s: f64 = (0..=self.m).map(|i| self.weights[i] * self.gamma_shape(i)).sum();
        s / self.rate
    }

    /// Posterior mean of `pi`: `sum_i w_i (alpha + m - i) / (alpha + beta + m)`.
    pub fn pi_mean(&self) -> f64 {
        let denom = self.alpha + self.beta + self.m as f64;
        (0..=self.m).map(|i| self.weights[i] * (self.alpha + (self.m - i) as f64)).sum::<f64>()
            / denom
    }

    /// Posterior variance of `sigma`.
    pub fn sigma_variance(&self) -> f64 {
        let mean = self.sigma_mean();
        let second: f64 = (0..=self.m)
            .map(|i| {
                let k = self.gamma_shape(i);
                self.weights[i] * k * (k + 1.0)
            })
            .sum::<f64>()
            / (self.rate * self.rate);
        second - mean * mean
    }

    /// Posterior variance of `pi`.
    pub fn pi_variance(&self) -> f64 {
        let mean = self.pi_mean();
        let denom = self.alpha + self.beta + self.m as f64;
        let second: f64 = (0..=self.m)
            .map(|i| {
                let (a, _b) = self.beta_params(i);
                self.weights[i] * a * (a + 1.0)
            })
            .sum::<f64>()
            / (denom * (denom + 1.0));
        second - mean * mean
    }

    /// Posterior CDF of `sigma` at `s`.
    pub fn sigma_cdf(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        self.active
            .iter()
            .map(|&i| self.weights[i] * gamma_lr(self.gamma_shape(i), self.rate * s))
            .sum()
    }

    /// Posterior CDF of `pi` at `p`.
    pub fn pi_cdf(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return 0.0;
        }
        if p >= 1.0 {
            return 1.0;
        }
        self.active
            .iter()
            .map(|&i| {
                let (a, b) = self.beta_params(i);
                self.weights[i] * beta_reg(a, b, p)
            })
            .sum()
    }

    /// Posterior quantile of `sigma` (bisection on the mixture CDF).
    pub fn sigma_quantile(&self, q: f64) -> Result<f64> {
        check_prob(q)?;
        // Bracket from the widest active component.
        let mut hi = self
            .active
            .iter()
            .map(|&i| {
                let k = self.gamma_shape(i);
                (k + 12.0 * k.sqrt()) / self.rate
            })
            .fold(0.0f64, f64::max)
            .max(1e-12);
        let mut tries = 0;
        while self.sigma_cdf(hi) < q {
            hi *= 2.0;
            tries += 1;
            if tries > 200 {
                return Err(Error::Convergence(
                    "failed to bracket posterior sigma quantile".into(),
                ));
            }
        }
        Ok(crate::numeric::bisect(|s| self.sigma_cdf(s) - q, 0.0, hi, 120))
    }

    /// Posterior quantile of `pi` (bisection on the mixture CDF).
    pub fn pi_quantile(&self, q: f64) -> Result<f64> {
        check_prob(q)?;
        Ok(crate::numeric::bisect(|p| self.pi_cdf(p) - q, 0.0, 1.0, 120))
    }

    /// Equal-tailed credible interval for `sigma`.
    pub fn credible_interval_sigma(&self, level: f64) -> Result<Interval> {
        check_level(level)?;
        let tail = 0.5 * (1.0 - level);
        Ok(Interval::new(self.sigma_quantile(tail)?, self.sigma_quantile(1.0 - tail)?))
    }

    /// Equal-tailed credible interval for `pi`.
    pub fn credible_interval_pi(&self, level: f64) -> Result<Interval> {
        check_level(level)?;
        let tail = 0.5 * (1.0 - level);
        Ok(Interval::new(self.pi_quantile(tail)?, self.pi_quantile(1.0 - tail)?))
    }

    /// One exact ancestral draw `(sigma, pi)`: choose a component by weight,
    /// then draw its Gamma and Beta coordinates.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut idx = self.m;
        for i in 0..=self.m {
            acc += self.weights[i];
            if u <= acc {
                idx = i;
                break;
            }
        }
        let shape = self.gamma_shape(idx);
        let gamma =
            rand_distr::Gamma::new(shape, 1.0 / self.rate).expect("positive Gamma parameters");
        let (a, b) = self.beta_params(idx);
        let beta = rand_distr::Beta::new(a, b).expect("positive Beta parameters");
        (gamma.sample(rng), beta.sample(rng))
    }
}

fn check_prob(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("quantile probability must lie in (0, 1), got {q}")))
    }
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameters(format!("credibility level must lie in (0, 1), got {level}")))
    }
}

/// A Bayesian fit: posterior means and equal-tailed credible intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesFit {
    /// Posterior mean of `sigma`.
    pub sigma: f64,
    /// Posterior mean of `pi`.
    pub pi: f64,
    /// Posterior variances.
    pub var_sigma: f64,
    pub var_pi: f64,
    /// Equal-tailed credible intervals at `level`.
    pub cri_sigma: Interval,
    pub cri_pi: Interval,
    pub level: f64,
    /// Whether linear-space symmetric polynomials overflowed (informational;
    /// all reported numbers come from the log-space path).
    pub linear_overflow: bool,
}

/// Posterior means and equal-tailed credible intervals under `prior`.
pub fn fit_bayes(sample: &Sample, prior: &PriorSpec, level: f64) -> Result<BayesFit> {
    check_level(level)?;
    let post = posterior(sample, prior)?;
    Ok(BayesFit {
        sigma: post.sigma_mean(),
        pi: post.pi_mean(),
        var_sigma: post.sigma_variance(),
        var_pi: post.pi_variance(),
        cri_sigma: post.credible_interval_sigma(level)?,
        cri_pi: post.credible_interval_pi(level)?,
        level,
        linear_overflow: post.linear_overflow(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prior_spec_validates() {
        assert!(PriorSpec::new(1.0, 1.0, 1.0, 1.0).is_ok());
        assert!(PriorSpec::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(PriorSpec::new(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(PriorSpec::new(1.0, 1.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn informative_presets_center_on_the_generating_values() {
        for &(sg, pi) in &[(1.0, 0.2), (2.5, 0.5), (3.5, 0.7), (1.0, 0.5), (2.5, 0.2)] {
            let p = PriorSpec::informative_for(sg, pi).unwrap();
            assert!((p.delta / p.tau - sg).abs() < 1e-12, "sigma mean for {sg}");
            assert!((p.alpha / (p.alpha + p.beta) - pi).abs() < 1e-12, "pi mean for {pi}");
        }
        assert!(PriorSpec::informative_for(1.7, 0.2).is_none());
        assert!(PriorSpec::informative_for(1.0, 0.33).is_none());
    }

    #[test]
    fn symmetric_stats_match_hand_expansion() {
        // y = (2, 3, 5): V_1 = 10, V_2 = 31, V_3 = 30.
        let s = SymmetricStats::from_neg_logs(&[2.0, 3.0, 5.0]);
        assert_eq!(s.len(), 3);
        let v = s.v_linear();
        assert!((v[0] - 1.0).abs() < 1e-15);
        assert!((v[1] - 10.0).abs() < 1e-12);
        assert!((v[2] - 31.0).abs() < 1e-12);
        assert!((v[3] - 30.0).abs() < 1e-12);
        #[allow(clippy::needless_range_loop)]
        for i in 0..=3 {
            assert!((s.log_v()[i].exp() - v[i]).abs() < 1e-12 * v[i], "log-space V_{i}");
        }
        assert!(!s.overflowed());
        assert!((s.v1() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_stats_survive_linear_overflow() {
        // 120 observations with y = 500 each: V_120 = 500^120 ~ 1e324
        // overflows f64, but ln V_120 = 120 ln 500 is exact and finite.
        let y = vec![500.0; 120];
        let s = SymmetricStats::from_neg_logs(&y);
        assert!(s.overflowed());
        assert!(s.log_v().iter().all(|lv| lv.is_finite()));
        let expect = 120.0 * 500.0f64.ln();
        assert!((s.log_v()[120] - expect).abs() < 1e-9 * expect);
    }

    fn unit_mean_sample() -> Sample {
        // Single observation x = e^{-1}, so y = 1 and the mixture has two
        // equally weighted components under the reference prior.
        Sample::new(vec![(-1.0f64).exp()]).unwrap()
    }

    #[test]
    fn single_observation_reference_posterior_is_exact() {
        let post = posterior(&unit_mean_sample(), &PriorSpec::reference()).unwrap();
        let w = post.weights();
        assert!((w[0] - 0.5).abs() < 1e-12, "w0 = {}", w[0]);
        assert!((w[1] - 0.5).abs() < 1e-12, "w1 = {}", w[1]);
        // E[sigma] = (2/2 + 3/2)/2 = 5/4; E[pi] = (2/3 + 1/3)/2 = 1/2.
        assert!((post.sigma_mean() - 1.25).abs() < 1e-12);
        assert!((post.pi_mean() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn weights_normalize_and_cdfs_are_monotone() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let d = crate::distribution::LogLindley::new(2.5, 0.7).unwrap();
        let sample = d.sample(40, &mut rng).unwrap();
        let post = posterior(&sample, &PriorSpec::reference()).unwrap();
        let total: f64 = post.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-12, "sum w = {total}");
        let mut prev = 0.0;
        for k in 1..20 {
            let s = 0.3 * k as f64;
            let c = post.sigma_cdf(s);
            assert!(c >= prev - 1e-13, "sigma cdf not monotone at {s}");
            prev = c;
        }
        let mut prev = 0.0;
        for k in 1..20 {
            let p = 0.05 * k as f64;
            let c = post.pi_cdf(p);
            assert!(c >= prev - 1e-13, "pi cdf not monotone at {p}");
            prev = c;
        }
    }

    #[test]
    fn credible_interval_brackets_the_quantiles() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let d = crate::distribution::LogLindley::new(1.0, 0.2).unwrap();
        let sample = d.sample(60, &mut rng).unwrap();
        let post = posterior(&sample, &PriorSpec::reference()).unwrap();
        let ci = post.credible_interval_sigma(0.95).unwrap();
        assert!((self::cdf_diff(&post, ci)).abs() < 1e-9);
        let cpi = post.credible_interval_pi(0.95).unwrap();
        assert!((post.pi_cdf(cpi.hi) - post.pi_cdf(cpi.lo) - 0.95).abs() < 1e-9);
        assert!(cpi.lo >= 0.0 && cpi.hi <= 1.0);
    }

    fn cdf_diff(post: &PosteriorMixture, ci: Interval) -> f64 {
        post.sigma_cdf(ci.hi) - post.sigma_cdf(ci.lo) - 0.95
    }

    #[test]
    fn fit_reports_finite_summaries() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let d = crate::distribution::LogLindley::new(3.5, 0.5).unwrap();
        let sample = d.sample(80, &mut rng).unwrap();
        let prior = PriorSpec::informative_for(3.5, 0.5).unwrap();
        let fit = fit_bayes(&sample, &prior, 0.95).unwrap();
        assert!(fit.sigma > 0.0 && fit.sigma.is_finite());
        assert!(fit.pi > 0.0 && fit.pi < 1.0);
        assert!(fit.var_sigma > 0.0 && fit.var_pi > 0.0);
        assert!(fit.cri_sigma.lo < fit.sigma && fit.sigma < fit.cri_sigma.hi);
        assert!(fit.cri_pi.lo < fit.pi && fit.pi < fit.cri_pi.hi);
    }
}
