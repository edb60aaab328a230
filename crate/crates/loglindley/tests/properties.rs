//! Randomized property checks over wide parameter ranges.

mod common;

use proptest::prelude::*;

use loglindley::bayes::{posterior, PriorSpec, SymmetricStats};
use loglindley::distribution::{LogLindley, Sample};
use loglindley::mle::log_likelihood;
use loglindley::reliability::{discrepancy, reliability};
use loglindley::special::{lambert_w_m1, NEG_INV_E};

proptest! {
    #[test]
    fn lambert_roundtrip(f in 1e-12..1.0f64) {
        // Map the unit interval onto the branch domain (-1/e, 0).
        let x = NEG_INV_E * f;
        let w = lambert_w_m1(x).unwrap();
        prop_assert!(w <= -1.0);
        prop_assert!((w * w.exp() - x).abs() <= 1e-12);
    }

    #[test]
    fn quantile_roundtrip(
        sigma in 0.05..20.0f64,
        pi in 0.0..=1.0f64,
        u in 1e-9..=0.999_999_999f64,
    ) {
        let d = LogLindley::new(sigma, pi).unwrap();
        let x = d.quantile(u).unwrap();
        prop_assert!((0.0..=1.0).contains(&x));
        let back = d.cdf(x).unwrap();
        prop_assert!(
            (back - u).abs() <= 1e-9,
            "F(Q({u})) = {back} at ({sigma}, {pi})"
        );
    }

    #[test]
    fn cdf_is_monotone(
        sigma in 0.05..20.0f64,
        pi in 0.0..=1.0f64,
        a in 1e-6..1.0f64,
        b in 1e-6..1.0f64,
    ) {
        let d = LogLindley::new(sigma, pi).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(d.cdf(lo).unwrap() <= d.cdf(hi).unwrap());
    }

    #[test]
    fn pdf_is_nonnegative_and_loglik_finite(
        sigma in 0.05..20.0f64,
        pi in 0.0..=1.0f64,
        xs in prop::collection::vec(1e-6..0.999_999f64, 1..40),
    ) {
        let sample = Sample::new(xs).unwrap();
        for &x in sample.values() {
            let d = LogLindley::new(sigma, pi).unwrap();
            prop_assert!(d.pdf(x).unwrap() >= 0.0);
        }
        // Interior weights keep the density bracket positive, so the
        // likelihood is finite on the whole closed strip.
        if pi > 0.0 {
            prop_assert!(log_likelihood(&sample, sigma, pi).is_finite());
        }
    }

    #[test]
    fn symmetric_sums_ignore_input_order(
        mut xs in prop::collection::vec(1e-6..0.999_999f64, 2..20),
    ) {
        let a = SymmetricStats::from_sample(&Sample::new(xs.clone()).unwrap());
        xs.reverse();
        xs.swap(0, 1);
        let b = SymmetricStats::from_sample(&Sample::new(xs).unwrap());
        for (x, y) in a.log_v().iter().zip(b.log_v()) {
            prop_assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn posterior_weights_always_normalize(
        xs in prop::collection::vec(1e-6..0.999_999f64, 1..30),
        tau in 0.1..10.0f64,
        delta in 0.1..10.0f64,
        alpha in 0.1..10.0f64,
        beta in 0.1..10.0f64,
    ) {
        let sample = Sample::new(xs).unwrap();
        let prior = PriorSpec::new(tau, delta, alpha, beta).unwrap();
        let post = posterior(&sample, &prior).unwrap();
        let total: f64 = post.weights().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12, "sum = {}", total);
        prop_assert!(post.sigma_mean().is_finite() && post.sigma_mean() > 0.0);
        prop_assert!((0.0..=1.0).contains(&post.pi_mean()));
    }

    #[test]
    fn reliability_stays_in_the_unit_interval(
        s1 in 0.05..20.0f64,
        p1 in 0.0..=1.0f64,
        s2 in 0.05..20.0f64,
        p2 in 0.0..=1.0f64,
    ) {
        let x = LogLindley::new(s1, p1).unwrap();
        let y = LogLindley::new(s2, p2).unwrap();
        let r = reliability(&x, &y);
        prop_assert!((0.0..=1.0).contains(&r), "R = {}", r);
        prop_assert!((r + reliability(&y, &x) - 1.0).abs() <= 1e-12);
        let dd = discrepancy(r);
        prop_assert!((-1.0..=1.0).contains(&dd));
    }

    #[test]
    fn moments_are_ordered_and_bounded(
        sigma in 0.05..20.0f64,
        pi in 0.0..=1.0f64,
    ) {
        let d = LogLindley::new(sigma, pi).unwrap();
        let m1 = d.moment(1);
        let m2 = d.moment(2);
        prop_assert!(0.0 < m1 && m1 < 1.0);
        prop_assert!(m2 <= m1, "E[X^2] = {} > E[X] = {}", m2, m1);
        prop_assert!(d.variance() >= 0.0);
    }
}
