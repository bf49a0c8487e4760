//! The singular oscillator basis: eigenfunctions of
//! `-d²/dx² + B x² + A/x²` on the half-line with Dirichlet condition at 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::specfun::{gamma_ls, hyp1f1_terminating_ls, pochhammer, LogScaled};

/// The physical problem `-d²/dx² + B x² + λ/x^α` (plus the centrifugal
/// term `Λ(Λ+1)/x²`, `Λ = l + (N-3)/2`, in `N ≥ 2` dimensions).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub alpha: f64,
    pub lambda: f64,
    #[serde(rename = "B")]
    pub b: f64,
    /// Spatial dimension; 1 is the half-line problem.
    #[serde(rename = "N")]
    pub dim: u32,
    /// Angular momentum, ignored for `N = 1`.
    pub l: u32,
}

impl ModelSpec {
    pub fn new(alpha: f64, lambda: f64, b: f64, dim: u32, l: u32) -> Result<Self> {
        let model = ModelSpec {
            alpha,
            lambda,
            b,
            dim,
            l,
        };
        model.validate()?;
        Ok(model)
    }

    /// Half-line problem with `B = 1`.
    pub fn half_line(alpha: f64, lambda: f64) -> Self {
        ModelSpec {
            alpha,
            lambda,
            b: 1.0,
            dim: 1,
            l: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::domain(format!(
                "alpha must be > 0, got {}",
                self.alpha
            )));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::domain(format!(
                "lambda must be >= 0, got {}",
                self.lambda
            )));
        }
        if !(self.b.is_finite() && self.b > 0.0) {
            return Err(Error::domain(format!("B must be > 0, got {}", self.b)));
        }
        if self.dim == 0 {
            return Err(Error::domain("dimension N must be >= 1"));
        }
        Ok(())
    }

    /// `Λ = l + (N-3)/2`, defined for `N ≥ 2`.
    pub fn big_lambda(&self) -> Option<f64> {
        (self.dim >= 2).then(|| f64::from(self.l) + 0.5 * (f64::from(self.dim) - 3.0))
    }

    /// Coefficient `Λ(Λ+1)` of the centrifugal `1/x²` term (0 for `N = 1`).
    pub fn centrifugal(&self) -> f64 {
        self.big_lambda().map_or(0.0, |lam| lam * (lam + 1.0))
    }

    /// `(Λ + 1/2)²` for `N ≥ 2`, `1/4` on the half-line.
    fn shift(&self) -> f64 {
        self.big_lambda()
            .map_or(0.25, |lam| (lam + 0.5) * (lam + 0.5))
    }

    /// Basis exponent for auxiliary strength `a`:
    /// `1 + ½√(1+4A)` for `N = 1`, `1 + √(A + (Λ+½)²)` otherwise.
    pub fn gamma_of(&self, a: f64) -> f64 {
        if self.dim == 1 {
            1.0 + 0.5 * (1.0 + 4.0 * a).sqrt()
        } else {
            1.0 + (a + self.shift()).sqrt()
        }
    }

    /// Inverse of [`ModelSpec::gamma_of`].
    pub fn a_of_gamma(&self, gamma: f64) -> f64 {
        (gamma - 1.0).powi(2) - self.shift()
    }

    /// Infimum of the admissible auxiliary strengths: `A ≥ 0` and `2γ > α`.
    pub fn a_min(&self) -> f64 {
        let half = 0.5 * self.alpha;
        if half <= 1.0 {
            0.0
        } else {
            self.a_of_gamma(half).max(0.0)
        }
    }

    /// True when `a` yields a valid basis for the `x^{-α}` matrix elements.
    pub fn admits(&self, a: f64) -> bool {
        a >= 0.0 && 2.0 * self.gamma_of(a) > self.alpha
    }
}

/// Parameters of one truncated basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisContext {
    #[serde(rename = "A")]
    pub a: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Truncation size.
    #[serde(rename = "D")]
    pub size: usize,
}

impl BasisContext {
    pub fn new(model: &ModelSpec, a: f64, size: usize) -> Result<Self> {
        model.validate()?;
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::domain(format!("A must be >= 0, got {a}")));
        }
        if size == 0 {
            return Err(Error::domain("basis size must be >= 1"));
        }
        Ok(BasisContext {
            a,
            beta: model.b.sqrt(),
            gamma: model.gamma_of(a),
            size,
        })
    }

    /// Basis given directly by `(γ, β)`; `A` is filled in from the
    /// half-line relation `γ = 1 + ½√(1+4A)`.
    pub fn from_gamma(gamma: f64, beta: f64, size: usize) -> Result<Self> {
        if !(gamma > 0.0 && beta > 0.0) {
            return Err(Error::domain(format!(
                "need gamma > 0 and beta > 0, got ({gamma}, {beta})"
            )));
        }
        Ok(BasisContext {
            a: (gamma - 1.0).powi(2) - 0.25,
            beta,
            gamma,
            size: size.max(1),
        })
    }
}

/// `E_n = 2β(2n + γ)`.
pub fn gk_energy(ctx: &BasisContext, n: u32) -> f64 {
    2.0 * ctx.beta * (2.0 * f64::from(n) + ctx.gamma)
}

/// Converts the `V0 (a/x - x/a)²` parameterisation to `(A, B)`.
pub fn gk_convert_legacy(v0: f64, a: f64) -> Result<(f64, f64)> {
    if !(v0 > 0.0 && a > 0.0) {
        return Err(Error::domain(format!(
            "V0 and a must be positive, got ({v0}, {a})"
        )));
    }
    Ok((v0 * a * a, v0 / (a * a)))
}

/// Normalisation constant `C_n = √(2 β^γ (γ)_n / (n! Γ(γ)))`.
pub fn norm_constant(ctx: &BasisContext, n: u32) -> Result<LogScaled> {
    if !(ctx.gamma > 0.0) {
        return Err(Error::domain(format!(
            "normalisation needs gamma > 0, got {}",
            ctx.gamma
        )));
    }
    let n_fact = pochhammer(1.0, n);
    let c2 = LogScaled::from_f64(2.0)
        * LogScaled::from_f64(ctx.beta).powf(ctx.gamma)
        * pochhammer(ctx.gamma, n)
        / (n_fact * gamma_ls(ctx.gamma));
    Ok(c2.sqrt())
}

/// `ψ_n(x) = (-1)^n C_n x^{γ-½} e^{-βx²/2} 1F1(-n; γ; βx²)`, assembled in
/// log space.
pub fn eval_wavefunction(ctx: &BasisContext, n: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("wavefunction needs x > 0, got {x}")));
    }
    let z = ctx.beta * x * x;
    let poly = hyp1f1_terminating_ls(n, ctx.gamma, z)?;
    let envelope = LogScaled::new((ctx.gamma - 0.5) * x.ln() - 0.5 * z, 1);
    let psi = norm_constant(ctx, n)? * envelope * poly;
    Ok(psi.neg_if(n % 2 == 1).value())
}

/// Upper integration limit beyond which every basis function up to index
/// `size - 1` is negligible.
pub fn quadrature_cutoff(ctx: &BasisContext) -> f64 {
    // turning point of the top function in z = βx², plus a Gaussian tail
    let z_turn = 4.0 * ctx.size as f64 + 2.0 * ctx.gamma;
    ((z_turn + 12.0 * z_turn.sqrt() + 60.0) / ctx.beta).sqrt()
}

/// Gram matrix `∫ ψ_m ψ_n dx` of the first `ctx.size` functions by quadrature.
pub fn gram_matrix(ctx: &BasisContext) -> Result<Vec<Vec<f64>>> {
    let d = ctx.size;
    let upper = quadrature_cutoff(ctx);
    let mut g = vec![vec![0.0; d]; d];
    #[allow(clippy::needless_range_loop)]
    for m in 0..d {
        for n in m..d {
            let v = overlap_integral(ctx, m as u32, n as u32, upper, |_| 1.0)?;
            g[m][n] = v;
            g[n][m] = v;
        }
    }
    Ok(g)
}

/// `∫_0^upper ψ_m(x) w(x) ψ_n(x) dx` by panelled tanh-sinh quadrature.
pub fn overlap_integral<W>(ctx: &BasisContext, m: u32, n: u32, upper: f64, weight: W) -> Result<f64>
where
    W: Fn(f64) -> f64,
{
    // Evaluate once to surface domain errors before entering the integrator.
    eval_wavefunction(ctx, m.max(n), upper)?;
    let integrand = |x: f64| {
        if x <= 0.0 {
            return 0.0;
        }
        let a = eval_wavefunction(ctx, m, x).unwrap_or(0.0);
        let b = eval_wavefunction(ctx, n, x).unwrap_or(0.0);
        a * b * weight(x)
    };
    Ok(quad::integrate_panels(integrand, upper, 16, 1e-14))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ctx(a: f64, b: f64, d: usize) -> BasisContext {
        BasisContext::new(&ModelSpec::new(1.0, 0.0, b, 1, 0).unwrap(), a, d).unwrap()
    }

    #[test]
    fn energies() {
        assert_eq!(gk_energy(&ctx(0.0, 1.0, 1), 0), 3.0);
        assert_eq!(gk_energy(&ctx(0.0, 1.0, 1), 1), 7.0);
        assert_eq!(gk_energy(&ctx(2.0, 1.0, 1), 0), 5.0);
    }

    #[test]
    fn legacy_conversion() {
        assert_eq!(gk_convert_legacy(1.0, 1.0).unwrap(), (1.0, 1.0));
        assert_eq!(gk_convert_legacy(4.0, 2.0).unwrap(), (16.0, 1.0));
        assert!(gk_convert_legacy(0.0, 1.0).is_err());

        let (v0, a) = (3.0_f64, 0.7_f64);
        let (big_a, big_b) = gk_convert_legacy(v0, a).unwrap();
        let c = ctx(big_a, big_b, 1);
        for n in 0..=5u32 {
            let nf = f64::from(n);
            let legacy = 4.0 / a
                * v0.sqrt()
                * (nf + 0.5 + 0.25 * ((1.0 + 4.0 * v0 * a * a).sqrt() - 2.0 * a * v0.sqrt()));
            // the legacy potential carries the constant offset -2 V0
            assert!((legacy + 2.0 * v0 - gk_energy(&c, n)).abs() < 1e-12 * legacy);
        }
    }

    #[test]
    fn normalisation_constants() {
        let c = ctx(0.0, 1.0, 1);
        let c0 = norm_constant(&c, 0).unwrap().value();
        assert!((c0 * c0 - 4.0 / PI.sqrt()).abs() < 1e-14);

        let c = BasisContext::from_gamma(2.5, 2.0, 7).unwrap();
        // C_6² = 2 β^γ (γ)_6 / (6! Γ(γ)), Γ(2.5) = 3√π/4
        let poch: f64 = (0..6).map(|j| 2.5 + f64::from(j)).product();
        let expected = 2.0 * 2f64.powf(2.5) * poch / (720.0 * 0.75 * PI.sqrt());
        let c6 = norm_constant(&c, 6).unwrap().value();
        assert!((c6 * c6 - expected).abs() < 1e-12 * expected);

        let bad = BasisContext {
            a: 0.0,
            beta: 1.0,
            gamma: -0.5,
            size: 1,
        };
        assert!(norm_constant(&bad, 0).is_err());
    }

    #[test]
    fn ground_state_value() {
        let v = eval_wavefunction(&ctx(0.0, 1.0, 1), 0, 1.0).unwrap();
        let expected = (4.0 / PI.sqrt()).sqrt() * (-0.5f64).exp();
        assert!((v - expected).abs() < 1e-14);
        assert!((v - 0.911161).abs() < 1e-6);
    }

    #[test]
    fn dirichlet_at_origin() {
        assert!(eval_wavefunction(&ctx(0.0, 1.0, 1), 0, 1e-8).unwrap().abs() < 1e-6);
        assert!(eval_wavefunction(&ctx(0.0, 1.0, 1), 0, 0.0).is_err());
    }

    #[test]
    fn sign_convention() {
        // (-1)^n at the origin, positive beyond the last node.
        let c = ctx(2.0, 1.0, 8);
        for n in 0..8u32 {
            let near0 = eval_wavefunction(&c, n, 1e-3).unwrap();
            let far = eval_wavefunction(&c, n, 8.0).unwrap();
            assert_eq!(near0.signum(), if n % 2 == 0 { 1.0 } else { -1.0 });
            assert!(far > 0.0);
        }
    }

    #[test]
    fn hermite_bridge() {
        // 1F1(-n; 3/2; x²) = (-1)^n / (2x) n!/(2n+1)! H_{2n+1}(x)
        fn hermite(k: usize, x: f64) -> f64 {
            let (mut h0, mut h1) = (1.0, 2.0 * x);
            if k == 0 {
                return h0;
            }
            for j in 1..k {
                let h2 = 2.0 * x * h1 - 2.0 * j as f64 * h0;
                h0 = h1;
                h1 = h2;
            }
            h1
        }
        for n in 0..=6u32 {
            for &x in &[0.3, 1.0, 2.5] {
                let lhs = crate::specfun::hyp1f1_terminating(n, 1.5, x * x).unwrap();
                let ratio: f64 = ((n + 1)..=(2 * n + 1)).map(f64::from).product();
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let rhs = sign / (2.0 * x) / ratio * hermite(2 * n as usize + 1, x);
                assert!(
                    (lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1e-12),
                    "n={n} x={x}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn three_dim_s_wave_matches_half_line() {
        let one = ModelSpec::new(4.0, 1.0, 1.0, 1, 0).unwrap();
        let three = ModelSpec::new(4.0, 1.0, 1.0, 3, 0).unwrap();
        for &a in &[0.0, 0.75, 3.0, 171.7] {
            assert_eq!(one.gamma_of(a), three.gamma_of(a));
        }
        assert_eq!(three.big_lambda(), Some(0.0));
        assert_eq!(one.big_lambda(), None);
    }

    #[test]
    fn admissible_strengths() {
        let m = ModelSpec::half_line(4.0, 1.0);
        assert!((m.a_min() - 0.75).abs() < 1e-15);
        assert!(!m.admits(0.75));
        assert!(m.admits(0.76));
        let m = ModelSpec::half_line(0.5, 0.1);
        assert_eq!(m.a_min(), 0.0);
        assert!(m.admits(0.0));
        let m = ModelSpec::new(4.0, 1000.0, 1.0, 2, 0).unwrap();
        assert!((m.a_min() - 1.0).abs() < 1e-15);
        for &g in &[2.3, 4.0, 9.5] {
            assert!((m.gamma_of(m.a_of_gamma(g)) - g).abs() < 1e-14);
        }
    }

    #[test]
    fn laguerre_orthogonality_integral() {
        // ∫ x^{2γ-1} e^{-βx²} 1F1(-n) 1F1(-m) dx = ½ n! Γ(γ)/(β^γ (γ)_n) δ_mn
        let (gamma, beta) = (2.3_f64, 1.7_f64);
        let upper = ((4.0 * 7.0 + 2.0 * gamma + 60.0) / beta).sqrt();
        for m in 0..=6u32 {
            for n in m..=6u32 {
                let f = |x: f64| {
                    if x <= 0.0 {
                        return 0.0;
                    }
                    let z = beta * x * x;
                    x.powf(2.0 * gamma - 1.0)
                        * (-z).exp()
                        * crate::specfun::hyp1f1_terminating(n, gamma, z).unwrap()
                        * crate::specfun::hyp1f1_terminating(m, gamma, z).unwrap()
                };
                let v = quad::integrate_panels(f, upper, 16, 1e-15);
                let expected = if m == n {
                    let fact: f64 = (1..=n).map(f64::from).product();
                    0.5 * fact * gamma_ls(gamma).value()
                        / (beta.powf(gamma) * pochhammer(gamma, n).value())
                } else {
                    0.0
                };
                assert!(
                    (v - expected).abs() < 1e-10,
                    "m={m} n={n}: {v} vs {expected}"
                );
            }
        }
    }
}
