//! Second-order estimate of the ground state and the series that govern the
//! rate of convergence for `α = 4`.

use serde::{Deserialize, Serialize};

use crate::basis::{gk_energy, BasisContext, ModelSpec};
use crate::error::{Error, Result};
use crate::matrix::PowerElements;
use crate::solver::minimize_over_a;
use crate::specfun::{hyp_pfq_unit, ln_gamma};

/// Coupling separating slow from fast convergence at `α = 4` in one
/// dimension: the `γ` of the one-function optimum passes 3 here.
pub const LAMBDA_CRITICAL: f64 = 1.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Slow,
    Fast,
}

impl Regime {
    pub fn of(lambda: f64) -> Self {
        if lambda > LAMBDA_CRITICAL {
            Regime::Fast
        } else {
            Regime::Slow
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    #[serde(rename = "perturbation_E")]
    pub perturbation_e: f64,
    pub sum_partial: f64,
    pub sum_closed: Option<f64>,
    pub lambda_of_gamma: f64,
    pub regime: Regime,
}

/// Number of terms in a convergence sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terms {
    Finite(usize),
    Infinite,
}

/// `E_0 + <0|V'|0> - Σ_{n=1}^{D} |<0|V'|n>|² / (E_n - E_0)` with
/// `V' = λx^{-α} - Ax^{-2}`.
pub fn perturbation_estimate(model: &ModelSpec, ctx: &BasisContext, d: usize) -> Result<f64> {
    model.validate()?;
    if !(2.0 * ctx.gamma > model.alpha) {
        return Err(Error::domain(format!(
            "estimate needs 2*gamma > alpha, got gamma = {}",
            ctx.gamma
        )));
    }
    let len = d + 1;
    let fold = model.alpha == 2.0;
    let spike = PowerElements::new(ctx, model.alpha, len)?;
    let aux = if !fold && ctx.a != 0.0 {
        Some(PowerElements::new(ctx, 2.0, len)?)
    } else {
        None
    };
    let coupling = if fold {
        model.lambda - ctx.a
    } else {
        model.lambda
    };
    let perturbation = |n: usize| -> Result<f64> {
        let mut v = 0.0;
        if coupling != 0.0 {
            v += coupling * spike.element(0, n)?;
        }
        if let Some(aux) = &aux {
            v -= ctx.a * aux.element(0, n)?;
        }
        Ok(v)
    };
    let e0 = gk_energy(ctx, 0);
    let mut e = e0 + perturbation(0)?;
    for n in 1..=d {
        let v = perturbation(n)?;
        e -= v * v / (gk_energy(ctx, n as u32) - e0);
    }
    Ok(e)
}

/// `Γ²(γ-2)/Γ²(γ)`
fn gamma_ratio_sq(gamma: f64) -> f64 {
    (2.0 * (ln_gamma(gamma - 2.0).0 - ln_gamma(gamma).0)).exp()
}

/// The three-series expression for the second-order sum at `α = 4`, in the
/// printed form
/// `¼ Γ²(γ-2)/Γ²(γ) [λ² S₀ + 2λc S₁ + c² S₂]`, `c = λ - A(γ-2)`,
/// `S_j = Σ (n+1)!/(n^j (γ)_n)`. For finite `D` the partial sums run over
/// `n = 1..D`; `Terms::Infinite` uses the hypergeometric forms at unit
/// argument, which need `γ > 3`.
///
/// `β ≠ 1` is absorbed by scaling `λ → λβ` and the whole sum by `β`.
pub fn convergence_sum_alpha4(ctx: &BasisContext, lambda: f64, terms: Terms) -> Result<f64> {
    let g = ctx.gamma;
    if !(g > 2.0) {
        return Err(Error::domain(format!("sum needs gamma > 2, got {g}")));
    }
    let lam = lambda * ctx.beta;
    let c = lam - ctx.a * (g - 2.0);
    let pref = gamma_ratio_sq(g);
    match terms {
        Terms::Finite(d) => {
            let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
            // (n+1)!/(γ)_n by its ratio recurrence
            let mut ratio = 1.0;
            for n in 1..=d {
                let nf = n as f64;
                ratio *= (nf + 1.0) / (g + nf - 1.0);
                s0 += ratio;
                s1 += ratio / nf;
                s2 += ratio / (nf * nf);
            }
            Ok(ctx.beta * 0.25 * pref * (lam * lam * s0 + 2.0 * lam * c * s1 + c * c * s2))
        }
        Terms::Infinite => {
            if !(g > 3.0) {
                return Err(Error::Divergence(format!(
                    "2F1(3,1;gamma+1;1) diverges for gamma = {g} <= 3"
                )));
            }
            let f0 = hyp_pfq_unit(&[3.0, 1.0], &[g + 1.0])?.value;
            let f1 = hyp_pfq_unit(&[3.0, 1.0, 1.0], &[2.0, g + 1.0])?.value;
            let f2 = hyp_pfq_unit(&[3.0, 1.0, 1.0, 1.0], &[2.0, 2.0, g + 1.0])?.value;
            Ok(ctx.beta * pref / (2.0 * g) * (lam * lam * f0 + 2.0 * lam * c * f1 + c * c * f2))
        }
    }
}

/// Coupling whose one-function optimum at `α = 4`, `B = 1` has exponent `γ`:
/// `(γ-2)²(4(γ-1)²-1) / (4(2γ-3))`.
pub fn lambda_of_gamma(gamma: f64) -> Result<f64> {
    if !(gamma > 1.5) {
        return Err(Error::domain(format!("need gamma > 3/2, got {gamma}")));
    }
    let g2 = (gamma - 2.0) * (gamma - 2.0);
    let g1 = 2.0 * (gamma - 1.0);
    Ok(g2 * (g1 * g1 - 1.0) / (4.0 * (2.0 * gamma - 3.0)))
}

/// `|dE₀/dA|` at the one-function minimiser for `α = 4`, `B = 1`, by a
/// central difference. Fails when the minimiser's `γ` does not reproduce
/// `λ` through [`lambda_of_gamma`] to relative `1e-6` (unless the minimum
/// sits on the validity boundary).
pub fn stationarity_check_d1(model: &ModelSpec) -> Result<f64> {
    if model.alpha != 4.0 || model.b != 1.0 || model.dim != 1 {
        return Err(Error::domain(
            "stationarity check is defined for alpha = 4, B = 1, N = 1",
        ));
    }
    let r = minimize_over_a(model, 1, 0)?;
    let a = r.optimal_a.expect("optimised result carries A");
    let energy = |a: f64| -> f64 {
        let g = model.gamma_of(a);
        2.0 * g + model.lambda / ((g - 1.0) * (g - 2.0)) - a / (g - 1.0)
    };
    let h = 1e-6 * (1.0 + a);
    let derivative = ((energy(a + h) - energy(a - h)) / (2.0 * h)).abs();
    if !r.at_boundary {
        let implied = lambda_of_gamma(model.gamma_of(a))?;
        if (implied - model.lambda).abs() > 1e-6 * model.lambda {
            return Err(Error::Convergence(format!(
                "minimiser gamma implies lambda = {implied}, expected {}",
                model.lambda
            )));
        }
    }
    Ok(derivative)
}

/// Estimate, sums and regime for `α = 4`.
pub fn convergence_report(
    model: &ModelSpec,
    ctx: &BasisContext,
    d: usize,
) -> Result<ConvergenceReport> {
    if model.alpha != 4.0 {
        return Err(Error::domain("convergence sums are defined for alpha = 4"));
    }
    let sum_closed = if ctx.gamma > 3.0 {
        Some(convergence_sum_alpha4(ctx, model.lambda, Terms::Infinite)?)
    } else {
        None
    };
    Ok(ConvergenceReport {
        perturbation_e: perturbation_estimate(model, ctx, d)?,
        sum_partial: convergence_sum_alpha4(ctx, model.lambda, Terms::Finite(d))?,
        sum_closed,
        lambda_of_gamma: lambda_of_gamma(ctx.gamma)?,
        regime: Regime::of(model.lambda),
    })
}
