//! Diagonalisation and minimisation over the basis parameter.

use nalgebra::DMatrix;
use proptest::prelude::*;
use spiked_osc::basis::{BasisContext, ModelSpec};
use spiked_osc::matrix::build_hamiltonian;
use spiked_osc::solver::{
    agreeing_digits, converge_to_digits, eigen_pairs, eigen_symmetric, minimize_over_a,
    solve_levels, solve_spectrum, spectrum_at,
};

fn hamiltonian(alpha: f64, lambda: f64, a: f64, d: usize) -> spiked_osc::HamiltonianMatrix {
    let model = ModelSpec::half_line(alpha, lambda);
    build_hamiltonian(&model, &BasisContext::new(&model, a, d).unwrap()).unwrap()
}

#[test]
fn two_by_two_secular_equation() {
    let h = hamiltonian(1.0, 1.0, 0.5, 2);
    let (p, q, r) = (h.get(0, 0), h.get(0, 1), h.get(1, 1));
    let mid = 0.5 * (p + r);
    let rad = (0.25 * (p - r) * (p - r) + q * q).sqrt();
    let e = eigen_symmetric(&h).unwrap();
    assert!((e[0] - (mid - rad)).abs() < 1e-13 * mid);
    assert!((e[1] - (mid + rad)).abs() < 1e-13 * mid);
}

#[test]
fn six_by_six_invariants() {
    let h = hamiltonian(2.5, 3.0, 1.2, 6);
    let e = eigen_symmetric(&h).unwrap();
    let m = DMatrix::from_row_slice(6, 6, &h.entries);
    let trace: f64 = (0..6).map(|i| h.get(i, i)).sum();
    assert!((e.iter().sum::<f64>() - trace).abs() < 1e-12 * trace);
    let det = m.determinant();
    let prod: f64 = e.iter().product();
    assert!((prod - det).abs() < 1e-10 * det.abs());
    assert!(e.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn eigenpairs_backward_error() {
    let h = hamiltonian(4.0, 50.0, 20.0, 12);
    let m = DMatrix::from_row_slice(12, 12, &h.entries);
    let norm = m.norm();
    for (e, v) in eigen_pairs(&h).unwrap() {
        let r = &m * &v - &v * e;
        assert!(r.norm() < 1e-12 * norm, "residual {:e}", r.norm());
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn alpha2_is_exact_in_one_function() {
    for &lambda in &[0.1, 1.0, 10.0, 1000.0] {
        let model = ModelSpec::half_line(2.0, lambda);
        let r = minimize_over_a(&model, 1, 0).unwrap();
        let exact = 2.0 * (1.0 + 0.5 * (1.0 + 4.0 * lambda).sqrt());
        assert!((r.eigenvalues[0] - exact).abs() < 1e-10 * exact);
        assert!((r.optimal_a.unwrap() - lambda).abs() < 1e-8 * lambda);
    }
}

#[test]
fn optimised_bound_beats_fixed() {
    let model = ModelSpec::half_line(0.5, 1000.0);
    let fixed = spectrum_at(&model, 0.0, 5).unwrap()[0];
    let opt = minimize_over_a(&model, 5, 0).unwrap();
    assert!(opt.eigenvalues[0] < fixed);
    assert!(opt.evaluations > 10);
}

#[test]
fn per_level_bounds_decrease_with_size() {
    let model = ModelSpec::half_line(4.0, 1000.0);
    let mut prev = [f64::INFINITY; 3];
    for d in 3..=6 {
        let r = solve_levels(&model, d, 3).unwrap();
        assert_eq!(r.level_a.len(), 3);
        for (k, p) in prev.iter_mut().enumerate() {
            assert!(r.eigenvalues[k] <= *p + 1e-9, "level {k} at D = {d}");
            *p = r.eigenvalues[k];
        }
    }
}

#[test]
fn fixed_a_outside_domain() {
    let model = ModelSpec::half_line(4.0, 1.0);
    assert!(solve_spectrum(&model, 4, false, Some(0.0)).is_err());
    assert!(solve_spectrum(&model, 4, false, None).is_err());
}

#[test]
fn digit_agreement() {
    assert_eq!(agreeing_digits(1.0, 1.0), 15);
    assert_eq!(agreeing_digits(1.0, 1.0 + 4e-6), 5);
    assert_eq!(agreeing_digits(1.0, 1.0 + 6e-6), 4);
    assert_eq!(agreeing_digits(1.0, 3.0), 0);
}

#[test]
fn faster_convergence_at_larger_coupling() {
    let fast = converge_to_digits(&ModelSpec::half_line(4.0, 10.0), 4, 0, 100).unwrap();
    let slow = converge_to_digits(&ModelSpec::half_line(4.0, 0.01), 4, 0, 100).unwrap();
    assert!(!fast.not_converged);
    assert!(fast.d_used < slow.d_used || slow.not_converged);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn eigenvalues_interlace(
        alpha in 0.3f64..6.0,
        lambda in 0.01f64..100.0,
        slack in 0.1f64..10.0,
        d in 1usize..12,
    ) {
        let model = ModelSpec::half_line(alpha, lambda);
        let a = model.a_min().max(0.0) + slack;
        let small = spectrum_at(&model, a, d).unwrap();
        let large = spectrum_at(&model, a, d + 1).unwrap();
        for k in 0..d {
            let tol = 1e-10 * large[k + 1].abs();
            prop_assert!(large[k] <= small[k] + tol);
            prop_assert!(small[k] <= large[k + 1] + tol);
        }
    }

    #[test]
    fn spectrum_json_round_trip(alpha in 0.5f64..5.0, lambda in 0.1f64..50.0) {
        let model = ModelSpec::half_line(alpha, lambda);
        let r = minimize_over_a(&model, 3, 0).unwrap();
        let back: spiked_osc::SpectrumResult =
            serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        prop_assert_eq!(back, r);
    }
}
