//! Second-order estimate, convergence sums and the coupling-exponent relation.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use spiked_osc::analysis::{
    convergence_report, convergence_sum_alpha4, lambda_of_gamma, perturbation_estimate,
    stationarity_check_d1, Regime, Terms,
};
use spiked_osc::basis::{gk_energy, BasisContext, ModelSpec};
use spiked_osc::solver::{minimize_over_a, spectrum_at};
use spiked_osc::specfun::hyp_pfq_unit;
use spiked_osc::Error;

fn estimate_gap(lambda: f64) -> f64 {
    let model = ModelSpec::new(4.0, lambda, 1.0, 3, 1).unwrap();
    let ctx = BasisContext::new(&model, 0.0, 10).unwrap();
    let est = perturbation_estimate(&model, &ctx, 9).unwrap();
    let exact = spectrum_at(&model, 0.0, 10).unwrap()[0];
    est - exact
}

#[test]
fn estimate_is_third_order_accurate() {
    let g1 = estimate_gap(1e-3);
    let g2 = estimate_gap(2e-3);
    assert!(g1.abs() < 1e-7, "{g1:e}");
    let ratio = g2 / g1;
    assert!((6.0..10.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn estimate_trivial_cases() {
    let free = ModelSpec::new(4.0, 0.0, 1.0, 3, 1).unwrap();
    let ctx = BasisContext::new(&free, 0.0, 5).unwrap();
    assert_eq!(
        perturbation_estimate(&free, &ctx, 5).unwrap(),
        gk_energy(&ctx, 0)
    );
    let folded = ModelSpec::half_line(2.0, 7.0);
    let ctx = BasisContext::new(&folded, 7.0, 5).unwrap();
    assert_eq!(
        perturbation_estimate(&folded, &ctx, 5).unwrap(),
        2.0 * ctx.gamma
    );
}

#[test]
fn gauss_sum_closed_form() {
    for &g in &[3.5, 4.0, 5.5, 8.0] {
        let s = hyp_pfq_unit(&[3.0, 1.0], &[g + 1.0]).unwrap();
        let exact = g / (g - 3.0);
        assert!(
            (s.value - exact).abs() < 1e-10 * exact,
            "gamma {g}: {} vs {exact}",
            s.value
        );
    }
}

#[test]
fn partial_sums_approach_closed_form() {
    let ctx = BasisContext::from_gamma(4.0, 1.0, 1).unwrap();
    let lambda = 0.7;
    let closed = convergence_sum_alpha4(&ctx, lambda, Terms::Infinite).unwrap();
    let s1 = convergence_sum_alpha4(&ctx, lambda, Terms::Finite(10_000)).unwrap();
    let s2 = convergence_sum_alpha4(&ctx, lambda, Terms::Finite(20_000)).unwrap();
    // the tail falls off like 1/D at γ = 4
    let (r1, r2) = ((closed - s1) / closed, (closed - s2) / closed);
    assert!(r1 > 0.0 && r1 < 1e-3, "{r1:e}");
    assert!((r1 / r2 - 2.0).abs() < 1e-2, "{}", r1 / r2);
    let extrapolated = 2.0 * s2 - s1;
    assert!((extrapolated - closed).abs() < 1e-6 * closed);
}

#[test]
fn partial_sums_nondecreasing_without_auxiliary_term() {
    let ctx = BasisContext::from_gamma(2.5, 1.0, 1).unwrap();
    let ctx = BasisContext { a: 0.0, ..ctx };
    let mut prev = 0.0;
    for d in 1..200 {
        let s = convergence_sum_alpha4(&ctx, 0.3, Terms::Finite(d)).unwrap();
        assert!(s >= prev);
        prev = s;
    }
    assert_eq!(
        convergence_sum_alpha4(&ctx, 0.0, Terms::Finite(10)).unwrap(),
        0.0
    );
}

#[test]
fn divergent_closed_form() {
    let ctx = BasisContext::from_gamma(3.0, 1.0, 1).unwrap();
    assert!(matches!(
        convergence_sum_alpha4(&ctx, 1.0, Terms::Infinite),
        Err(Error::Divergence(_))
    ));
}

fn lambda_of_gamma_exact(g: &BigRational) -> BigRational {
    let one = BigRational::from_integer(1.into());
    let two = BigRational::from_integer(2.into());
    let three = BigRational::from_integer(3.into());
    let four = BigRational::from_integer(4.into());
    let g2 = (g - &two) * (g - &two);
    let g1 = &two * (g - &one);
    g2 * (&g1 * &g1 - &one) / (four * (&two * g - three))
}

#[test]
fn lambda_of_gamma_matches_rational_arithmetic() {
    let crit = lambda_of_gamma_exact(&BigRational::from_integer(3.into()));
    assert_eq!(crit, BigRational::new(5.into(), 4.into()));
    assert_eq!(lambda_of_gamma(3.0).unwrap(), crit.to_f64().unwrap());
    assert!(lambda_of_gamma_exact(&BigRational::from_integer(2.into())).is_zero());
    for (p, q) in [(7i64, 4i64), (5, 2), (13, 4), (41, 8), (10, 1)] {
        let exact = lambda_of_gamma_exact(&BigRational::new(p.into(), q.into()))
            .to_f64()
            .unwrap();
        let v = lambda_of_gamma(p as f64 / q as f64).unwrap();
        assert!(
            (v - exact).abs() <= 8.0 * f64::EPSILON * exact.abs(),
            "{p}/{q}"
        );
    }
}

#[test]
fn lambda_of_gamma_increasing() {
    let mut prev = lambda_of_gamma(2.01).unwrap();
    for k in 1..800 {
        let v = lambda_of_gamma(2.01 + k as f64 * 0.01).unwrap();
        assert!(v > prev);
        prev = v;
    }
    assert!(lambda_of_gamma(1.5).is_err());
}

#[test]
fn one_function_minimum_is_stationary() {
    for &lambda in &[0.5, 2.0, 10.0, 100.0] {
        let d = stationarity_check_d1(&ModelSpec::half_line(4.0, lambda)).unwrap();
        assert!(d < 1e-6, "lambda {lambda}: {d:e}");
    }
    let r = minimize_over_a(&ModelSpec::half_line(4.0, 1.25), 1, 0).unwrap();
    assert!((r.optimal_a.unwrap() - 3.75).abs() < 1e-6);
    assert!(stationarity_check_d1(&ModelSpec::half_line(6.0, 1.0)).is_err());
}

#[test]
fn report_regimes() {
    let m = ModelSpec::half_line(4.0, 10.0);
    let ctx = BasisContext::new(&m, 12.0, 20).unwrap();
    let r = convergence_report(&m, &ctx, 20).unwrap();
    assert_eq!(r.regime, Regime::Fast);
    assert!(r.sum_closed.unwrap() > r.sum_partial);
    let m = ModelSpec::half_line(4.0, 0.1);
    let ctx = BasisContext::new(&m, 2.5, 20).unwrap();
    let r = convergence_report(&m, &ctx, 20).unwrap();
    assert_eq!(r.regime, Regime::Slow);
    assert!(r.sum_closed.is_none());
    let json = serde_json::to_string(&r).unwrap();
    assert!(json.contains("\"perturbation_E\"") && json.contains("\"slow\""));
}
