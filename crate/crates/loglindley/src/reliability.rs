//! Stress-strength reliability for two independent log-Lindley variables.
//!
//! With strength `X ~ LL(sigma_1, pi_1)` and stress `Y ~ LL(sigma_2, pi_2)`,
//! the reliability `R = P(Y < X) = ∫_0^1 f_X(x) F_Y(x) dx` reduces to the
//! rational closed form
//!
//! ```text
//! R = sigma_1 N / (sigma_1 + sigma_2)^3,
//! N = sigma_1^2 + 3 sigma_1 sigma_2 + 2 pi_1 sigma_2^2 - 2 pi_2 sigma_1 sigma_2
//!     + pi_1 pi_2 sigma_2 (sigma_1 - sigma_2),
//! ```
//!
//! symmetric in the sense that identical marginals give exactly 1/2.  The
//! discrepancy `D = 1 - 2R` recenters this on 0, so `D = 0` is the
//! indifference point, `D < 0` favors strength.
//!
//! Two interval procedures are provided.  The maximum-likelihood route
//! propagates the per-sample observed-information covariances through the
//! analytic gradient of `R` (delta method); since `R` is bounded, the raw
//! Wald interval can spill outside `[0, 1]`, so both the raw and the clamped
//! versions are reported.  The Bayesian route pushes exact posterior draws
//! through `R` and reads off empirical quantiles, which respect the bounds
//! by construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bayes::{posterior, PriorSpec};
use crate::distribution::{LogLindley, Sample};
use crate::mle::{fit, normal_z, MlFit};
use crate::numeric::{pairwise_mean, quantile_sorted};
use crate::{Error, Interval, Result};

/// Domain-separation tag for the posterior-draw RNG key.
const RELIABILITY_RNG_TAG: u64 = 0x4c4c_5245_4c49_0001;

/// `R = P(stress < strength)` in closed form.
pub fn reliability(strength: &LogLindley, stress: &LogLindley) -> f64 {
    let (s1, p1) = (strength.sigma(), strength.pi());
    let (s2, p2) = (stress.sigma(), stress.pi());
    let n = s1 * s1 + 3.0 * s1 * s2 + 2.0 * p1 * s2 * s2 - 2.0 * p2 * s1 * s2
        + p1 * p2 * s2 * (s1 - s2);
    let d = (s1 + s2).powi(3);
    s1 * n / d
}

/// Gradient of [`reliability`] in the order
/// `(sigma_1, pi_1, sigma_2, pi_2)` = (strength shape, strength weight,
/// stress shape, stress weight).
pub fn reliability_gradient(strength: &LogLindley, stress: &LogLindley) -> [f64; 4] {
    let (s1, p1) = (strength.sigma(), strength.pi());
    let (s2, p2) = (stress.sigma(), stress.pi());
    let n = s1 * s1 + 3.0 * s1 * s2 + 2.0 * p1 * s2 * s2 - 2.0 * p2 * s1 * s2
        + p1 * p2 * s2 * (s1 - s2);
    let sum = s1 + s2;
    let d = sum.powi(3);
    let tail = 3.0 * s1 * n / (sum * sum * sum * sum);

    let dn_ds1 = 2.0 * s1 + 3.0 * s2 - 2.0 * p2 * s2 + p1 * p2 * s2;
    let dn_dp1 = 2.0 * s2 * s2 + p2 * s2 * (s1 - s2);
    let dn_ds2 = 3.0 * s1 + 4.0 * p1 * s2 - 2.0 * p2 * s1 + p1 * p2 * (s1 - 2.0 * s2);
    let dn_dp2 = s2 * ((p1 - 2.0) * s1 - p1 * s2);

    [(n + s1 * dn_ds1) / d - tail, s1 * dn_dp1 / d, s1 * dn_ds2 / d - tail, s1 * dn_dp2 / d]
}

/// The centered discrepancy `D = 1 - 2R ∈ [-1, 1]`.
pub fn discrepancy(r: f64) -> f64 {
    1.0 - 2.0 * r
}

/// A reliability analysis summary, serializable as the machine-readable
/// report emitted by the command-line tools.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityReport {
    /// `"ml"` or `"bayes"`.
    pub method: String,
    /// Point estimate of `R`.
    pub r_hat: f64,
    /// Delta-method variance (maximum-likelihood route) or posterior
    /// variance of `R` (Bayesian route).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variance: Option<f64>,
    /// Interval before clamping; the Wald interval can leave `[0, 1]`.
    pub interval_raw: Interval,
    /// The same interval clamped to `[0, 1]`.
    pub interval_clamped: Interval,
    /// Point estimate of the discrepancy `D = 1 - 2R`.
    pub d_hat: f64,
    /// Interval for `D`, transformed from the clamped `R` interval.
    pub d_interval: Interval,
    /// Strength sample size.
    pub m: usize,
    /// Stress sample size.
    pub n: usize,
    /// Seed used for posterior draws (Bayesian route only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Confidence / credibility level of the intervals.
    pub level: f64,
}

impl ReliabilityReport {
    #[allow(clippy::too_many_arguments)]
    fn from_r(
        method: &str,
        r: f64,
        variance: Option<f64>,
        interval_raw: Interval,
        m: usize,
        n: usize,
        seed: Option<u64>,
        level: f64,
    ) -> Self {
        let interval_clamped = interval_raw.clamped(0.0, 1.0);
        let d_interval =
            Interval::new(discrepancy(interval_clamped.hi), discrepancy(interval_clamped.lo));
        ReliabilityReport {
            method: method.to_string(),
            r_hat: r,
            variance,
            interval_raw,
            interval_clamped,
            d_hat: discrepancy(r),
            d_interval,
            m,
            n,
            seed,
            level,
        }
    }
}

/// Maximum-likelihood reliability analysis: fits both samples, then applies
/// the delta method with the analytic gradient.
pub fn reliability_ml(strength: &Sample, stress: &Sample, level: f64) -> Result<ReliabilityReport> {
    let fit_x = fit(strength, level)?;
    let fit_y = fit(stress, level)?;
    reliability_ml_from_fits(&fit_x, &fit_y, strength.len(), stress.len(), level)
}

/// Delta-method reliability from two already-computed fits (the simulation
/// harness reuses per-replicate fits this way).
pub fn reliability_ml_from_fits(
    fit_x: &MlFit,
    fit_y: &MlFit,
    m: usize,
    n: usize,
    level: f64,
) -> Result<ReliabilityReport> {
    let z = normal_z(level)?;
    let strength = LogLindley::new(fit_x.sigma, fit_x.pi)?;
    let stress = LogLindley::new(fit_y.sigma, fit_y.pi)?;
    let r = reliability(&strength, &stress);
    let g = reliability_gradient(&strength, &stress);
    // Independent samples: the joint covariance is block diagonal.
    let qx = quad_form(&fit_x.covariance, g[0], g[1]);
    let qy = quad_form(&fit_y.covariance, g[2], g[3]);
    let var = qx + qy;
    if !(var.is_finite() && var >= 0.0) {
        return Err(Error::Convergence(format!("delta-method variance is not finite ({var})")));
    }
    let half = z * var.sqrt();
    let raw = Interval::new(r - half, r + half);
    Ok(ReliabilityReport::from_r("ml", r, Some(var), raw, m, n, None, level))
}

fn quad_form(cov: &[[f64; 2]; 2], a: f64, b: f64) -> f64 {
    a * a * cov[0][0] + 2.0 * a * b * cov[0][1] + b * b * cov[1][1]
}

/// Bayesian reliability analysis: exact posterior draws for both marginals
/// pushed through the closed form, summarized by their mean, variance, and
/// equal-tailed quantiles.
pub fn reliability_bayes(
    strength: &Sample,
    stress: &Sample,
    prior_strength: &PriorSpec,
    prior_stress: &PriorSpec,
    level: f64,
    draws: usize,
    seed: u64,
) -> Result<ReliabilityReport> {
    let mut rng = reliability_rng(seed);
    let mut report = reliability_bayes_with_rng(
        strength,
        stress,
        prior_strength,
        prior_stress,
        level,
        draws,
        &mut rng,
    )?;
    report.seed = Some(seed);
    Ok(report)
}

/// Same as [`reliability_bayes`], drawing randomness from a caller-supplied
/// generator (no seed is recorded in the report).
pub fn reliability_bayes_with_rng<R: Rng + ?Sized>(
    strength: &Sample,
    stress: &Sample,
    prior_strength: &PriorSpec,
    prior_stress: &PriorSpec,
    level: f64,
    draws: usize,
    rng: &mut R,
) -> Result<ReliabilityReport> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameters(format!(
            "credibility level must lie in (0, 1), got {level}"
        )));
    }
    if draws < 1000 {
        return Err(Error::InvalidParameters(format!(
            "need at least 1000 posterior draws, got {draws}"
        )));
    }
    let post_x = posterior(strength, prior_strength)?;
    let post_y = posterior(stress, prior_stress)?;
    let mut rs = Vec::with_capacity(draws);
    for _ in 0..draws {
        let (s1, p1) = post_x.draw(rng);
        let (s2, p2) = post_y.draw(rng);
        let x = LogLindley::new(s1, p1)?;
        let y = LogLindley::new(s2, p2)?;
        rs.push(reliability(&x, &y));
    }
    let mean = pairwise_mean(&rs);
    let var = rs.iter().map(|&r| (r - mean) * (r - mean)).sum::<f64>() / (draws as f64 - 1.0);
    rs.sort_by(|a, b| a.total_cmp(b));
    let tail = 0.5 * (1.0 - level);
    let raw = Interval::new(quantile_sorted(&rs, tail), quantile_sorted(&rs, 1.0 - tail));
    Ok(ReliabilityReport::from_r(
        "bayes",
        mean,
        Some(var),
        raw,
        strength.len(),
        stress.len(),
        None,
        level,
    ))
}

fn reliability_rng(seed: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[24..32].copy_from_slice(&RELIABILITY_RNG_TAG.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ll(s: f64, p: f64) -> LogLindley {
        LogLindley::new(s, p).unwrap()
    }

    #[test]
    fn identical_marginals_give_one_half() {
        for &(s, p) in &[(1.0, 0.2), (2.5, 0.7), (0.3, 0.0), (4.0, 1.0)] {
            let d = ll(s, p);
            let r = reliability(&d, &d);
            assert!((r - 0.5).abs() < 1e-14, "({s}, {p}): {r}");
        }
    }

    #[test]
    fn reliability_and_complement_sum_to_one() {
        let x = ll(3.5, 0.5);
        let y = ll(1.0, 0.7);
        let r = reliability(&x, &y);
        let rc = reliability(&y, &x);
        assert!((r + rc - 1.0).abs() < 1e-14, "r = {r}, complement = {rc}");
    }

    #[test]
    fn closed_form_matches_rational_value() {
        // sigma_1 = 1, pi_1 = 0.2, sigma_2 = 2.5, pi_2 = 0.2 gives
        // R = 9.85 / 42.875 = 394/1715 exactly.
        let r = reliability(&ll(1.0, 0.2), &ll(2.5, 0.2));
        assert!((r - 394.0 / 1715.0).abs() < 1e-15);
    }

    #[test]
    fn discrepancy_is_shifted_reliability() {
        assert_eq!(discrepancy(0.5), 0.0);
        assert_eq!(discrepancy(1.0), -1.0);
        assert_eq!(discrepancy(0.0), 1.0);
        let r = reliability(&ll(2.0, 0.3), &ll(1.0, 0.8));
        assert!((discrepancy(r) - (1.0 - 2.0 * r)).abs() < 1e-16);
    }

    #[test]
    fn gradient_is_antisymmetric_at_equal_marginals() {
        // R(theta, theta) = 1/2 identically, so moving both marginals the
        // same way keeps R fixed: the strength and stress partials must
        // cancel pairwise.
        let d = ll(1.7, 0.4);
        let g = reliability_gradient(&d, &d);
        assert!((g[0] + g[2]).abs() < 1e-14, "sigma partials: {g:?}");
        assert!((g[1] + g[3]).abs() < 1e-14, "pi partials: {g:?}");
    }

    #[test]
    fn ml_report_clamps_and_transforms_consistently() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let x = ll(2.5, 0.7).sample(80, &mut rng).unwrap();
        let y = ll(1.0, 0.2).sample(60, &mut rng).unwrap();
        let rep = reliability_ml(&x, &y, 0.95).unwrap();
        assert_eq!(rep.method, "ml");
        assert_eq!(rep.m, 80);
        assert_eq!(rep.n, 60);
        assert!(rep.interval_clamped.lo >= 0.0 && rep.interval_clamped.hi <= 1.0);
        assert!((rep.d_hat - (1.0 - 2.0 * rep.r_hat)).abs() < 1e-15);
        assert!((rep.d_interval.lo - (1.0 - 2.0 * rep.interval_clamped.hi)).abs() < 1e-15);
        assert!((rep.d_interval.hi - (1.0 - 2.0 * rep.interval_clamped.lo)).abs() < 1e-15);
        assert!(rep.variance.unwrap() > 0.0);
    }

    #[test]
    fn bayes_report_stays_inside_the_unit_interval() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(100);
        let x = ll(2.5, 0.7).sample(50, &mut rng).unwrap();
        let y = ll(1.0, 0.2).sample(50, &mut rng).unwrap();
        let rep = reliability_bayes(
            &x,
            &y,
            &PriorSpec::reference(),
            &PriorSpec::reference(),
            0.95,
            1500,
            7,
        )
        .unwrap();
        assert_eq!(rep.method, "bayes");
        assert_eq!(rep.seed, Some(7));
        assert!(rep.r_hat > 0.0 && rep.r_hat < 1.0);
        assert!(rep.interval_raw.lo >= 0.0 && rep.interval_raw.hi <= 1.0);
        assert_eq!(rep.interval_raw, rep.interval_clamped);
    }

    #[test]
    fn bayes_route_is_deterministic_in_the_seed() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let x = ll(1.0, 0.5).sample(30, &mut rng).unwrap();
        let y = ll(1.0, 0.5).sample(30, &mut rng).unwrap();
        let p = PriorSpec::reference();
        let a = reliability_bayes(&x, &y, &p, &p, 0.9, 1200, 123).unwrap();
        let b = reliability_bayes(&x, &y, &p, &p, 0.9, 1200, 123).unwrap();
        assert_eq!(a, b);
    }
}
