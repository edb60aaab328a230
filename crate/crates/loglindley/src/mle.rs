//! Maximum-likelihood estimation for the log-Lindley distribution.
//!
//! For a sample `x_1, ..., x_m` the log-likelihood is
//!
//! ```text
//! l(sigma, pi) = m ln sigma + (sigma - 1) sum ln x_i + sum ln b_i,
//! b_i = pi + sigma (pi - 1) ln x_i,
//! ```
//!
//! where each bracket `b_i` is strictly positive for `pi > 0` (and equals
//! `-sigma ln x_i > 0` at `pi = 0`), so the likelihood is finite on the whole
//! closed parameter strip.  The score and Hessian are available in closed
//! form and drive both the optimizer diagnostics and the observed-information
//! covariance reported with each fit.
//!
//! # Expected information
//!
//! With `t = -ln X` (so `t > 0`) the expected information per the full sample
//! reduces to weighted integrals of the form
//!
//! ```text
//! g_k(sigma, pi) = ∫_0^1 x^(sigma-1) (-ln x)^k / (pi + sigma (pi - 1) ln x) dx,
//! ```
//!
//! because the density contributes one factor of the bracket that cancels one
//! of the two in each squared score term.  Substituting `s = sigma t / z`
//! with the odds `z = pi / (1 - pi)` turns these into Stieltjes-type
//! transforms `H_k(z) = ∫_0^∞ s^k e^{-z s} / (1 + s) ds`:
//!
//! ```text
//! sigma^(k+1) g_k = z^k (1 + z) H_k(z) =: G_k(z).
//! ```
//!
//! The resulting entries of the expected information matrix are
//!
//! ```text
//! I_11 = m [1 + (1 - pi)^2 G_2] / sigma^2,
//! I_12 = m G_1 / sigma,
//! I_22 = m [G_0 - 2 G_1 + G_2],
//! ```
//!
//! which the test suite validates against both direct quadrature of the
//! defining integrals and Monte Carlo averages of the outer product of the
//! score.  `G_0` diverges (logarithmically) as `pi -> 0` and the matrix
//! becomes singular at `pi = 1`, so interval procedures clip `pi` away from
//! the boundary before evaluating curvature there.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::distribution::Sample;
use crate::special;
use crate::{Error, Interval, Result};

/// Boundary clip applied to `pi` before evaluating curvature-based
/// covariances; information diverges at 0 and degenerates at 1.
const PI_CURVATURE_CLIP: f64 = 1e-4;

/// Log-likelihood of the sample at `(sigma, pi)`.
///
/// Finite for every `sigma > 0`, `pi ∈ [0, 1]`; returns `-inf` only in the
/// degenerate `pi = 0` limit where a bracket underflows to zero.
pub fn log_likelihood(sample: &Sample, sigma: f64, pi: f64) -> f64 {
    let m = sample.len() as f64;
    let mut sum_lx = 0.0;
    let mut sum_lb = 0.0;
    for &x in sample.values() {
        let lx = x.ln();
        let b = pi + sigma * (pi - 1.0) * lx;
        if b <= 0.0 {
            return f64::NEG_INFINITY;
        }
        sum_lx += lx;
        sum_lb += b.ln();
    }
    m * sigma.ln() + (sigma - 1.0) * sum_lx + sum_lb
}

/// Gradient of the log-likelihood, `[d/d sigma, d/d pi]`.
pub fn score(sample: &Sample, sigma: f64, pi: f64) -> [f64; 2] {
    let m = sample.len() as f64;
    let mut d_sigma = m / sigma;
    let mut d_pi = 0.0;
    for &x in sample.values() {
        let lx = x.ln();
        let b = pi + sigma * (pi - 1.0) * lx;
        d_sigma += lx + (pi - 1.0) * lx / b;
        d_pi += (1.0 + sigma * lx) / b;
    }
    [d_sigma, d_pi]
}

/// Observed information (negative Hessian of the log-likelihood) at
/// `(sigma, pi)`, as a symmetric 2x2 matrix.
pub fn observed_info(sample: &Sample, sigma: f64, pi: f64) -> [[f64; 2]; 2] {
    let m = sample.len() as f64;
    let mut h_ss = -m / (sigma * sigma);
    let mut h_sp = 0.0;
    let mut h_pp = 0.0;
    for &x in sample.values() {
        let lx = x.ln();
        let b = pi + sigma * (pi - 1.0) * lx;
        let b2 = b * b;
        let r = (pi - 1.0) * lx / b;
        h_ss -= r * r;
        h_sp += lx / b2;
        let q = (1.0 + sigma * lx) / b;
        h_pp -= q * q;
    }
    [[-h_ss, -h_sp], [-h_sp, -h_pp]]
}

/// The weighted moment integral `g_k` defined in the module docs, for
/// `k <= 2` and `pi ∈ (0, 1]`.  (It diverges at `pi = 0` for `k = 0`.)
pub fn g_integral(sigma: f64, pi: f64, k: u32) -> Result<f64> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidParameters(format!(
            "sigma must be positive and finite, got {sigma}"
        )));
    }
    if !(pi > 0.0 && pi <= 1.0) {
        return Err(Error::Domain(format!("g integral requires pi in (0, 1], got {pi}")));
    }
    if k > 2 {
        return Err(Error::Domain(format!("g integral is implemented for k <= 2, got {k}")));
    }
    let g_scaled = scaled_g_triple(pi)[k as usize];
    Ok(g_scaled / sigma.powi(k as i32 + 1))
}

/// `[G_0, G_1, G_2]` with `G_k = sigma^(k+1) g_k = z^k (1+z) H_k(z)`;
/// depends on `pi` alone.
pub(crate) fn scaled_g_triple(pi: f64) -> [f64; 3] {
    debug_assert!(pi > 0.0 && pi <= 1.0);
    if pi == 1.0 {
        // z -> inf limit: H_k(z) ~ k! / z^(k+1), so G_k -> k!.
        return [1.0, 1.0, 2.0];
    }
    let z = pi / (1.0 - pi);
    let h = special::stieltjes_triple(z);
    let w = 1.0 + z;
    [w * h[0], z * w * h[1], z * z * w * h[2]]
}

/// Expected (Fisher) information for a sample of size `m`, using the
/// closed-form entries from the module docs.  Requires `pi ∈ (0, 1]`; the
/// matrix is singular at `pi = 1` and diverges as `pi -> 0`.
pub fn fisher_info(m: usize, sigma: f64, pi: f64) -> Result<[[f64; 2]; 2]> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidParameters(format!(
            "sigma must be positive and finite, got {sigma}"
        )));
    }
    if !(pi > 0.0 && pi <= 1.0) {
        return Err(Error::Domain(format!("expected information requires pi in (0, 1], got {pi}")));
    }
    let [g0, g1, g2] = scaled_g_triple(pi);
    let m = m as f64;
    let om = 1.0 - pi;
    let i11 = m * (1.0 + om * om * g2) / (sigma * sigma);
    let i12 = m * g1 / sigma;
    let i22 = m * (g0 - 2.0 * g1 + g2);
    Ok([[i11, i12], [i12, i22]])
}

/// Inverse of the expected information: the asymptotic covariance of the
/// maximum-likelihood estimator.
pub fn fisher_covariance(m: usize, sigma: f64, pi: f64) -> Result<[[f64; 2]; 2]> {
    invert2(fisher_info(m, sigma, pi)?)
}

fn invert2(a: [[f64; 2]; 2]) -> Result<[[f64; 2]; 2]> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if !(det.is_finite() && det > 0.0 && a[0][0] > 0.0 && a[1][1] > 0.0) {
        return Err(Error::Convergence(format!(
            "information matrix is not positive definite (det = {det})"
        )));
    }
    Ok([[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]])
}

/// Two-sided standard-normal quantile for a central interval at `level`.
pub(crate) fn normal_z(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameters(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    let n = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(n.inverse_cdf(0.5 + 0.5 * level))
}

/// A maximum-likelihood fit with curvature-based uncertainty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlFit {
    /// Estimated shape.
    pub sigma: f64,
    /// Estimated weight; exactly 0 or 1 when the maximum sits on the boundary.
    pub pi: f64,
    /// Log-likelihood at the estimate.
    pub log_likelihood: f64,
    /// Inverse expected information at the estimate (with `pi` clipped away
    /// from the boundary before evaluating curvature).
    pub covariance: [[f64; 2]; 2],
    /// Confidence interval for `sigma`.
    pub ci_sigma: Interval,
    /// Unconstrained (Wald) interval for `pi`; may leave `[0, 1]`.
    pub ci_pi_raw: Interval,
    /// The same interval clamped to the parameter space.
    pub ci_pi: Interval,
    /// Confidence level the intervals were built at.
    pub level: f64,
    /// Total simplex iterations spent.
    pub iterations: usize,
    /// True when the estimate of `pi` lies on the boundary of `[0, 1]`.
    pub boundary_pi: bool,
}

/// Maximizes the likelihood and reports Wald intervals at `level`.
///
/// The search runs Nelder-Mead on `(ln sigma, logit pi)`, where the
/// objective is smooth and the box constraints disappear.  A maximum on the
/// `pi` boundary is reached by the simplex sliding along the corresponding
/// logit asymptote; an optimum within `1e-8` of a boundary is reported as
/// the boundary value itself.
pub fn fit(sample: &Sample, level: f64) -> Result<MlFit> {
    let z = normal_z(level)?;

    let start = [moment_start(sample).ln(), 0.0];
    let objective = |p: &[f64; 2]| {
        let sigma = p[0].exp();
        let pi = sigmoid(p[1]);
        -log_likelihood(sample, sigma, pi)
    };
    let first = nelder_mead(&objective, start, 0.5, 2000);
    let second = nelder_mead(&objective, first.point, 0.05, 2000);
    let best = if second.value <= first.value { &second } else { &first };
    let iterations = first.iterations + second.iterations;
    if !best.converged {
        return Err(Error::Convergence(format!(
            "simplex search did not converge within {iterations} iterations"
        )));
    }
    let sigma = best.point[0].exp();
    let mut pi = sigmoid(best.point[1]);
    let ll = -best.value;

    // An estimate numerically indistinguishable from the boundary is
    // reported as the boundary.
    let mut boundary = false;
    if pi <= 1e-8 || pi >= 1.0 - 1e-8 {
        boundary = true;
        pi = pi.round();
    }

    let pi_curv = pi.clamp(PI_CURVATURE_CLIP, 1.0 - PI_CURVATURE_CLIP);
    let covariance = fisher_covariance(sample.len(), sigma, pi_curv)?;
    let se_sigma = covariance[0][0].sqrt();
    let se_pi = covariance[1][1].sqrt();
    let ci_sigma = Interval::new(sigma - z * se_sigma, sigma + z * se_sigma);
    let ci_pi_raw = Interval::new(pi - z * se_pi, pi + z * se_pi);
    let ci_pi = ci_pi_raw.clamped(0.0, 1.0);

    Ok(MlFit {
        sigma,
        pi,
        log_likelihood: ll,
        covariance,
        ci_sigma,
        ci_pi_raw,
        ci_pi,
        level,
        iterations,
        boundary_pi: boundary,
    })
}

/// Method-of-moments starting value for `sigma` at the neutral weight
/// `pi = 1/2`: the positive root of
/// `(1 - xbar) s^2 + (1/2 - 2 xbar) s - xbar = 0`, which matches the sample
/// mean to `E[X] = s (s + 1/2) / (s + 1)^2`.
fn moment_start(sample: &Sample) -> f64 {
    let xbar = sample.mean();
    let root = (2.0 * xbar - 0.5 + (0.25 + 2.0 * xbar).sqrt()) / (2.0 * (1.0 - xbar));
    root.clamp(1e-3, 1e3)
}

fn sigmoid(w: f64) -> f64 {
    if w >= 0.0 {
        1.0 / (1.0 + (-w).exp())
    } else {
        let e = w.exp();
        e / (1.0 + e)
    }
}

struct SimplexResult {
    point: [f64; 2],
    value: f64,
    iterations: usize,
    converged: bool,
}

/// Nelder-Mead in two dimensions with the standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).  Stops when the
/// simplex is smaller than 1e-8 across and the relative spread of the
/// objective over its vertices drops below 1e-10.
fn nelder_mead<F>(f: &F, start: [f64; 2], step: f64, max_iter: usize) -> SimplexResult
where
    F: Fn(&[f64; 2]) -> f64,
{
    let mut pts = [start, [start[0] + step, start[1]], [start[0], start[1] + step]];
    let mut vals = [f(&pts[0]), f(&pts[1]), f(&pts[2])];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        // Order the vertices: best, middle, worst.
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let (b, s, w) = (order[0], order[1], order[2]);

        let spread = vals[w] - vals[b];
        let diam = diameter(&pts);
        if spread <= 1e-10 * (vals[b].abs() + 1e-10) && diam <= 1e-8 {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid = [0.5 * (pts[b][0] + pts[s][0]), 0.5 * (pts[b][1] + pts[s][1])];
        let reflect = lerp(&centroid, &pts[w], -1.0);
        let f_reflect = f(&reflect);

        if f_reflect < vals[b] {
            let expand = lerp(&centroid, &pts[w], -2.0);
            let f_expand = f(&expand);
            if f_expand < f_reflect {
                pts[w] = expand;
                vals[w] = f_expand;
            } else {
                pts[w] = reflect;
                vals[w] = f_reflect;
            }
        } else if f_reflect < vals[s] {
            pts[w] = reflect;
            vals[w] = f_reflect;
        } else {
            // Contract toward the better of the worst vertex and its
            // reflection.
            let (anchor, f_anchor) =
                if f_reflect < vals[w] { (reflect, f_reflect) } else { (pts[w], vals[w]) };
            let contract = lerp(&centroid, &anchor, 0.5);
            let f_contract = f(&contract);
            if f_contract < f_anchor {
                pts[w] = contract;
                vals[w] = f_contract;
            } else {
                // Shrink toward the best vertex.
                for i in [s, w] {
                    pts[i] = lerp(&pts[b], &pts[i], 0.5);
                    vals[i] = f(&pts[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..3 {
        if vals[i] < vals[best] {
            best = i;
        }
    }
    SimplexResult { point: pts[best], value: vals[best], iterations, converged }
}

/// Point `a + t (b - a)`.
fn lerp(a: &[f64; 2], b: &[f64; 2], t: f64) -> [f64; 2] {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

fn diameter(pts: &[[f64; 2]; 3]) -> f64 {
    let mut d = 0.0f64;
    for i in 0..3 {
        for j in (i + 1)..3 {
            let dx = pts[i][0] - pts[j][0];
            let dy = pts[i][1] - pts[j][1];
            d = d.max(dx.hypot(dy));
        }
    }
    d
}
