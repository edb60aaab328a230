//! Scalar special functions.
//!
//! The quantile of the log-Lindley distribution needs the negative branch of
//! the Lambert W function, and its Fisher information reduces to generalized
//! exponential integrals `E_n(z) = ∫_1^∞ e^{-zt} / t^n dt`.  Everything here
//! is plain `f64` numerics: a Halley iteration for W_{-1}, a power series and
//! a modified-Lentz continued fraction for `E_n`, and thin validating
//! wrappers over well-tested log-gamma/log-beta implementations.

use crate::{Error, Result};

/// Euler-Mascheroni constant to double precision.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `-1/e`, the left end of the domain of the real Lambert W branches.
pub const NEG_INV_E: f64 = -0.367_879_441_171_442_33;

/// Natural log of the gamma function for `x > 0`.
///
/// Backed by a mature implementation (Lanczos-type approximation, relative
/// accuracy well below 1e-12 on `[1e-3, 50]`); this wrapper adds domain
/// validation so callers get a uniform error type.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

/// Natural log of the beta function `B(a, b)` for `a, b > 0`, evaluated as
/// `log_gamma(a) + log_gamma(b) - log_gamma(a + b)` so large arguments never
/// overflow.
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    if !a.is_finite() || !b.is_finite() || a <= 0.0 || b <= 0.0 {
        return Err(Error::Domain(format!("log_beta requires a, b > 0, got a={a}, b={b}")));
    }
    Ok(statrs::function::beta::ln_beta(a, b))
}

/// The real branch `W_{-1}` of the Lambert W function on `[-1/e, 0)`.
///
/// `w = lambert_w_m1(x)` satisfies `w e^w = x` with `w <= -1`.  The root is
/// found by Halley iteration on the logarithmic form `w + ln(-w) = ln(-x)`,
/// which stays well scaled arbitrarily far down the branch; close to the
/// branch point `x = -1/e` the standard series in `p = sqrt(2(1 + e x))` is
/// used instead because the iteration's derivative vanishes there.
pub fn lambert_w_m1(x: f64) -> Result<f64> {
    if !x.is_finite() || !(NEG_INV_E..0.0).contains(&x) {
        return Err(Error::Domain(format!("lambert_w_m1 requires -1/e <= x < 0, got {x}")));
    }
    // Distance from the branch point; rounding can push 1 + e*x a hair
    // negative when x is -1/e exactly, hence the clamp.
    let p = (2.0 * (1.0 + std::f64::consts::E * x)).max(0.0).sqrt();
    if p < 1e-4 {
        return Ok(branch_point_series(p));
    }
    let l = (-x).ln();
    Ok(halley_w_m1(l, p))
}

/// Same function, but taking `l = ln(-x)` directly.  The quantile routine
/// uses this to avoid forming `x = -e^l`, which underflows for the extreme
/// arguments produced by mixing weights very close to 1.
pub(crate) fn lambert_w_m1_from_ln(l: f64) -> f64 {
    debug_assert!(l <= -1.0 + 1e-9, "ln(-x) must be <= -1, got {l}");
    let l = l.min(-1.0);
    // 1 + e*x = 1 - e^(l+1) = -expm1(l+1), so p stays accurate near the
    // branch point without ever reconstructing x.
    let p = (-2.0 * (l + 1.0).exp_m1()).max(0.0).sqrt();
    if p < 1e-4 {
        return branch_point_series(p);
    }
    halley_w_m1(l, p)
}

/// Series for `W_{-1}` about the branch point: `w = -1 - p - p^2/3 - ...`
/// with `p = sqrt(2 (1 + e x)) >= 0`.
fn branch_point_series(p: f64) -> f64 {
    -1.0 - p - p * p / 3.0 - 11.0 * p.powi(3) / 72.0 - 43.0 * p.powi(4) / 540.0
}

/// Halley iteration on `phi(w) = w + ln(-w) - l`, which is monotone
/// increasing on `(-inf, -1)`.  `p` is the branch-point distance; since the
/// root satisfies `w <= -1 - p`, iterates are kept on that side to avoid the
/// vanishing derivative at `w = -1`.
fn halley_w_m1(l: f64, p: f64) -> f64 {
    let cap = -1.0 - 0.9 * p;
    let mut w = if l > -1.31 { branch_point_series(p) } else { l - (-l).ln() }.min(cap);
    for _ in 0..60 {
        let phi = w + (-w).ln() - l;
        let d1 = 1.0 + 1.0 / w; // phi'
        let d2 = -1.0 / (w * w); // phi''
        let newton = phi / d1;
        let step = newton / (1.0 - newton * d2 / (2.0 * d1));
        let next = (w - step).min(cap);
        if (next - w).abs() <= 1e-16 * w.abs() {
            return next;
        }
        w = next;
    }
    w
}

/// Generalized exponential integral `E_m(z) = ∫_1^∞ e^{-zt} / t^m dt` for
/// `z > 0` and `m` in `{0, 1, 2, 3}`.
///
/// `E_0` is elementary (`e^{-z}/z`).  For `z < 1`, `E_1` is evaluated by its
/// power series and higher orders follow from the stable upward recurrence
/// `m E_{m+1}(z) = e^{-z} - z E_m(z)`.  For `z >= 1` the modified-Lentz
/// continued fraction is evaluated directly at order `m` (running the upward
/// recurrence there would amplify relative error by a factor of roughly
/// `z / m` per order, which breaks the accuracy contract for large `z`).
pub fn exp_integral(m: u32, z: f64) -> Result<f64> {
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::Domain(format!("exp_integral requires z > 0, got {z}")));
    }
    if m > 3 {
        return Err(Error::Domain(format!("exp_integral supports orders 0..=3, got {m}")));
    }
    if m == 0 {
        return Ok((-z).exp() / z);
    }
    Ok((-z).exp() * exp_integral_scaled(m, z))
}

/// `e^z E_m(z)` for `z > 0`, `m >= 1`: the scaled form never underflows and
/// is what the Fisher-information reductions consume.
pub(crate) fn exp_integral_scaled(m: u32, z: f64) -> f64 {
    debug_assert!(m >= 1 && z > 0.0);
    if z >= 1.0 {
        return exp_integral_cf_scaled(m, z);
    }
    let mut e = e1_series(z);
    let emz = (-z).exp();
    for n in 1..m {
        e = (emz - z * e) / n as f64;
    }
    z.exp() * e
}

/// Power series for `E_1(z)`, accurate for `0 < z < 1`:
/// `E_1(z) = -gamma - ln z + sum_{k>=1} (-1)^{k+1} z^k / (k k!)`.
fn e1_series(z: f64) -> f64 {
    let mut sum = -EULER_GAMMA - z.ln();
    let mut pow = 1.0; // carries (-z)^k / k!
    for k in 1..=40 {
        pow *= -z / k as f64;
        let term = -pow / k as f64;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Modified-Lentz evaluation of the continued fraction for `e^z E_m(z)`,
/// valid for `z >= 1`, `m >= 1`.
fn exp_integral_cf_scaled(m: u32, z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let n = m as f64;
    let mut b = z + n;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=300 {
        let i = i as f64;
        let a = -i * (n - 1.0 + i);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// The exponentially weighted Stieltjes transforms
/// `H_k(z) = ∫_0^∞ s^k e^{-z s} / (1 + s) ds` for `k = 0, 1, 2` and `z > 0`.
///
/// `H_0(z) = e^z E_1(z)`, and integrating `s^k/(1+s) = s^{k-1} - s^{k-1}/(1+s)`
/// gives `H_1 = 1/z - H_0` and `H_2 = 1/z^2 - 1/z + H_0`.  Those forms cancel
/// catastrophically for large `z`, so past `z = 40` each `H_k` is summed from
/// its (rapidly converging) asymptotic series
/// `H_k(z) = z^{-(k+1)} * sum_{j>=0} (-1)^j (k+j)! / z^j` instead.
pub(crate) fn stieltjes_triple(z: f64) -> [f64; 3] {
    debug_assert!(z > 0.0);
    if z >= 40.0 {
        [stieltjes_asymptotic(0, z), stieltjes_asymptotic(1, z), stieltjes_asymptotic(2, z)]
    } else {
        let h0 = exp_integral_scaled(1, z);
        let h1 = 1.0 / z - h0;
        let h2 = (1.0 - z) / (z * z) + h0;
        [h0, h1, h2]
    }
}

fn stieltjes_asymptotic(k: u32, z: f64) -> f64 {
    // sum of (-1)^j (k+j)! / z^j, truncated at machine precision; the terms
    // decay until j ~ z, far beyond the truncation point for z >= 40.
    let mut term = (1..=k).map(|i| i as f64).product::<f64>(); // k!
    let mut sum = term;
    for j in 1..=60u32 {
        let next = -term * (k + j) as f64 / z;
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum / z.powi(k as i32 + 1)
}
