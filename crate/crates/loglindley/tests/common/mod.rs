//! Shared oracles for the integration tests: adaptive quadrature, finite
//! differences, brute-force symmetric sums, and Kolmogorov–Smirnov helpers.
//! These deliberately avoid the library's own numerics so the two sides of
//! every comparison are independent.

#![allow(dead_code)]

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance
/// `tol` (with Richardson correction).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
                + rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fb = f(b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(&f, a, fa, b, fb, m, fm, whole, tol, 48)
}

/// Adaptive Simpson over `[a, b]` split into equal panels first, so
/// integrands whose mass is far from the midpoint cannot fool the initial
/// error estimate into an early exit.
pub fn integrate_panels<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, tol: f64) -> f64 {
    let w = (b - a) / panels as f64;
    let per = tol / panels as f64;
    (0..panels).map(|i| integrate(&f, a + i as f64 * w, a + (i + 1) as f64 * w, per)).sum()
}

/// Density transplanted to the negative-log scale: with t = -ln x the unit
/// interval maps to (0, inf) and the integrand is smooth and exponentially
/// decaying, so endpoint singularities at x -> 0+ disappear.
pub fn pdf_neg_log_scale(sigma: f64, pi: f64, t: f64) -> f64 {
    sigma * (pi + sigma * (1.0 - pi) * t) * (-sigma * t).exp()
}

/// Distribution function on the same scale: F(e^{-t}).
pub fn cdf_neg_log_scale(sigma: f64, pi: f64, t: f64) -> f64 {
    (1.0 + sigma * (1.0 - pi) * t) * (-sigma * t).exp()
}

/// Central first difference.
pub fn first_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Central second difference along one variable of a bivariate function.
pub fn second_diff_11<F: Fn(f64, f64) -> f64>(f: F, x: f64, y: f64, h: f64) -> f64 {
    (f(x + h, y) - 2.0 * f(x, y) + f(x - h, y)) / (h * h)
}

pub fn second_diff_22<F: Fn(f64, f64) -> f64>(f: F, x: f64, y: f64, h: f64) -> f64 {
    (f(x, y + h) - 2.0 * f(x, y) + f(x, y - h)) / (h * h)
}

/// Central mixed difference.
pub fn second_diff_12<F: Fn(f64, f64) -> f64>(f: F, x: f64, y: f64, h: f64) -> f64 {
    (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4.0 * h * h)
}

/// Elementary symmetric sums e_0..e_m of `ys` by explicit subset
/// enumeration (2^m terms); only sensible for small m.
pub fn brute_force_symmetric_sums(ys: &[f64]) -> Vec<f64> {
    let m = ys.len();
    assert!(m <= 20, "subset enumeration only for small m");
    let mut e = vec![0.0; m + 1];
    for mask in 0u32..(1u32 << m) {
        let mut prod = 1.0;
        for (j, y) in ys.iter().enumerate() {
            if mask >> j & 1 == 1 {
                prod *= y;
            }
        }
        e[mask.count_ones() as usize] += prod;
    }
    e
}

/// One-sample Kolmogorov-Smirnov statistic against a distribution function;
/// `sorted` must be ascending.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let u = cdf(x);
        d = d.max((u - i as f64 / n).abs());
        d = d.max((u - (i as f64 + 1.0) / n).abs());
    }
    d
}

/// Two-sample Kolmogorov-Smirnov statistic; both slices must be ascending.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let (mut i, mut j) = (0usize, 0usize);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic Kolmogorov critical constant for significance 0.001: the
/// one-sample bound is c / sqrt(n), the two-sample bound
/// c * sqrt((n + m) / (n m)).
pub const KS_CRIT_001: f64 = 1.9494746035204052;

/// Deterministic test generator.
pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

/// Relative gap |a - b| / max(|a|, |b|, floor).
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}
