//! The log-Lindley distribution on the open unit interval.
//!
//! Density, distribution function, closed-form moments, quantiles through the
//! negative Lambert W branch, and inverse-transform sampling.  The
//! distribution has density
//!
//! ```text
//! f(x | sigma, pi) = sigma [pi + sigma (pi - 1) ln x] x^(sigma - 1),  0 < x < 1,
//! ```
//!
//! with shape `sigma > 0` and mixing weight `pi` in `[0, 1]`, and distribution
//! function `F(x) = [1 + sigma (pi - 1) ln x] x^sigma`.  Because `ln x < 0` on
//! the support, the bracket is at least `pi`, so the density is nonnegative
//! everywhere.  At `pi = 1` the family reduces to the power distribution
//! `x^sigma`; at `pi = 0` it is the pure log-tilted component.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::special;
use crate::{Error, Result};

/// Mixing weights closer to 1 than this use direct root-finding on the
/// distribution function instead of the Lambert W route: the W_{-1} argument
/// degenerates there and the closed form loses precision to cancellation.
const PI_LAMBERT_LIMIT: f64 = 1.0 - 1e-4;

/// A log-Lindley distribution with shape `sigma > 0` and weight `pi ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLindley {
    sigma: f64,
    pi: f64,
}

impl LogLindley {
    /// Validates and constructs the distribution.
    pub fn new(sigma: f64, pi: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidParameters(format!(
                "sigma must be positive and finite, got {sigma}"
            )));
        }
        if !pi.is_finite() || !(0.0..=1.0).contains(&pi) {
            return Err(Error::InvalidParameters(format!("pi must lie in [0, 1], got {pi}")));
        }
        Ok(LogLindley { sigma, pi })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn pi(&self) -> f64 {
        self.pi
    }

    /// Probability density at `x ∈ (0, 1)`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        Ok(self.log_pdf(x)?.exp())
    }

    /// Natural log of the density at `x ∈ (0, 1)`, formed without ever
    /// computing `x^(sigma-1)` so it stays finite deep into the tails.
    pub fn log_pdf(&self, x: f64) -> Result<f64> {
        check_unit_open(x, "pdf")?;
        let lx = x.ln();
        let bracket = self.pi + self.sigma * (self.pi - 1.0) * lx;
        if bracket <= 0.0 {
            // Mathematically the bracket is >= pi >= 0; it reaches 0 only in
            // the pi = 0, x -> 1 limit where the density vanishes.
            return Ok(f64::NEG_INFINITY);
        }
        Ok(self.sigma.ln() + bracket.ln() + (self.sigma - 1.0) * lx)
    }

    /// Distribution function at `x ∈ (0, 1]`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x <= 1.0) {
            return Err(Error::Domain(format!("cdf requires x in (0, 1], got {x}")));
        }
        let lx = x.ln();
        // F = [1 + sigma (pi - 1) ln x] e^(sigma ln x); evaluate in log-ish
        // form to avoid spurious underflow of x^sigma for tiny x.
        let bracket = 1.0 + self.sigma * (self.pi - 1.0) * lx;
        Ok((bracket.ln() + self.sigma * lx).exp().clamp(0.0, 1.0))
    }

    /// Quantile function: the unique `x ∈ (0, 1)` with `cdf(x) = u`.
    ///
    /// For `pi < 1` the quantile has the closed form
    /// `ln x = (w + 1/(1 - pi)) / sigma` with
    /// `w = W_{-1}( (u / (pi - 1)) e^{1/(pi - 1)} )`, evaluated via the log of
    /// the W argument so nothing underflows.  For `pi = 1` (and for weights
    /// within 1e-4 of it, where the closed form loses precision) the monotone
    /// distribution function is inverted by bisection.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("quantile requires u in (0, 1), got {u}")));
        }
        if self.pi == 1.0 {
            return Ok((u.ln() / self.sigma).exp());
        }
        if self.pi > PI_LAMBERT_LIMIT {
            return Ok(self.quantile_bisect(u));
        }
        // ln(-arg) for arg = (u / (pi - 1)) e^{1/(pi-1)}; arg ∈ [-1/e, 0) is
        // guaranteed analytically, so excursions are pure rounding noise.
        let one_m = 1.0 - self.pi;
        let l = u.ln() - one_m.ln() - 1.0 / one_m;
        if l > -1.0 {
            if l <= -1.0 + 3e-12 {
                // Clamp to the branch point (w = -1).
                return Ok(((-1.0 + 1.0 / one_m) / self.sigma).exp().min(1.0));
            }
            // Inconsistent rounding beyond the clamp window: fall back to
            // direct inversion rather than evaluating W off its domain.
            return Ok(self.quantile_bisect(u));
        }
        let w = special::lambert_w_m1_from_ln(l);
        let ln_x = (w + 1.0 / one_m) / self.sigma;
        Ok(ln_x.exp().clamp(f64::MIN_POSITIVE, 1.0))
    }

    /// Bisection inverse of `cdf` on (0, 1); ~90 halvings reach f64
    /// resolution at every representable abscissa.
    fn quantile_bisect(&self, u: f64) -> f64 {
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        for _ in 0..120 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            // cdf only errors for arguments outside (0, 1].
            if self.cdf(mid).unwrap() < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Raw moment `E[X^k]`, which has the closed form
    /// `sigma (sigma + k pi) / (sigma + k)^2` (integrate
    /// `x^(sigma+k-1)` and `x^(sigma+k-1) ln x` termwise).
    pub fn moment(&self, k: u32) -> f64 {
        if k == 0 {
            return 1.0;
        }
        let k = f64::from(k);
        let sk = self.sigma + k;
        self.sigma * (self.sigma + k * self.pi) / (sk * sk)
    }

    /// Mean `E[X]`.
    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    /// Variance `E[X^2] - E[X]^2`.
    pub fn variance(&self) -> f64 {
        let m1 = self.moment(1);
        self.moment(2) - m1 * m1
    }

    /// Draws `m` inverse-transform variates and packages them as a [`Sample`].
    pub fn sample<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> Result<Sample> {
        if m == 0 {
            return Err(Error::InvalidParameters("sample size must be at least 1".into()));
        }
        let mut values = Vec::with_capacity(m);
        for _ in 0..m {
            let u: f64 = rng.sample(rand::distributions::Open01);
            values.push(self.quantile(u)?);
        }
        Sample::new(values)
    }
}

fn check_unit_open(x: f64, what: &str) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} requires x in the open interval (0, 1), got {x}")))
    }
}

/// An observed sample on the open unit interval.
///
/// Values are stored in ascending order, which makes every downstream
/// computation (log-likelihoods, symmetric functions, rank statistics)
/// independent of the order the data arrived in — bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    /// Validates (non-empty, every value finite and strictly inside `(0, 1)`)
    /// and stores the data in canonical ascending order.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DegenerateSample("sample is empty".into()));
        }
        for (i, &x) in values.iter().enumerate() {
            if !x.is_finite() || x <= 0.0 || x >= 1.0 {
                return Err(Error::Domain(format!(
                    "sample value #{idx} = {x} is outside the open interval (0, 1)",
                    idx = i + 1
                )));
            }
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("values are finite"));
        Ok(Sample { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The observations in ascending order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Sample mean.
    pub fn mean(&self) -> f64 {
        crate::numeric::pairwise_mean(&self.values)
    }

    /// Whether all observations are identical (to the last bit).
    pub fn is_constant(&self) -> bool {
        self.values.first() == self.values.last()
    }

    /// The transformed observations `y_i = -ln x_i > 0`, ascending in `x`
    /// (hence descending in `y`).
    pub(crate) fn neg_log_values(&self) -> Vec<f64> {
        self.values.iter().map(|&x| -x.ln()).collect()
    }
}
