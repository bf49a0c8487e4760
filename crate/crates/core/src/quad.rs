//! Numerical integration used to cross-check closed-form integrals.
//!
//! Thin wrapper over tanh-sinh quadrature from the `quadrature` crate: the
//! half-line integrands met here (powers times Gaussians, with integrable
//! algebraic singularities at the origin) are integrated panel by panel on a
//! truncated interval.

/// Number of dyadic sub-panels the first panel is graded into towards 0.
const ORIGIN_GRADING: i32 = 80;

/// Integrates `f` over `[0, upper]` split into `panels` equal panels.
///
/// The first panel is further graded geometrically towards the origin, which
/// keeps integrable singularities `x^p` (`p > -1`) accurate. `abs_tol` is the
/// target absolute error per panel.
pub fn integrate_panels<F>(f: F, upper: f64, panels: usize, abs_tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    assert!(upper > 0.0 && panels > 0);
    let de = |a: f64, b: f64| quadrature::double_exponential::integrate(&f, a, b, abs_tol).integral;
    let width = upper / panels as f64;
    let mut total = de(0.0, width * 2f64.powi(-ORIGIN_GRADING));
    for k in (0..ORIGIN_GRADING).rev() {
        total += de(width * 2f64.powi(-k - 1), width * 2f64.powi(-k));
    }
    for i in 1..panels {
        let a = i as f64 * width;
        total += de(a, a + width);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_moment() {
        // ∫_0^∞ x^2 e^{-x^2} dx = √π / 4
        let v = integrate_panels(|x| x * x * (-x * x).exp(), 12.0, 6, 1e-14);
        assert!((v - std::f64::consts::PI.sqrt() / 4.0).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let v = integrate_panels(|x| x.powf(-0.5), 1.0, 1, 1e-13);
        assert!((v - 2.0).abs() < 1e-10, "{v}");
    }
}
