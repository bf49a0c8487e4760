//! Diagonalisation of the truncated Hamiltonian, minimisation over the
//! auxiliary strength `A`, and the increasing-`D` convergence driver.

use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisContext, ModelSpec};
use crate::error::{Error, Result};
use crate::matrix::{build_hamiltonian, HamiltonianMatrix};

/// Basis sizes visited by [`converge_to_digits`].
pub const D_SCHEDULE: [usize; 13] = [1, 2, 3, 5, 7, 10, 15, 20, 30, 40, 60, 80, 100];

/// Spacing of the global scan in `ln(A - A_min)`.
const SCAN_STEP: f64 = 0.25;
/// Number of the lowest grid minima refined further.
/// Golden-section bracket width in `ln(A - A_min)` before Newton polishing.
const GOLDEN_TOL: f64 = 1e-5;
const REFINED_MINIMA: usize = 3;
/// Closest approach of `γ` to `α/2` when the validity boundary is open.
const GAMMA_MARGIN: f64 = 1e-3;
/// Largest auxiliary strength the scan expands to.
const A_CEILING: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Ascending upper bounds, or per-level minima when each level was
    /// optimised separately.
    pub eigenvalues: Vec<f64>,
    /// Minimiser for the requested level (level 0 unless stated).
    #[serde(rename = "optimal_A")]
    pub optimal_a: Option<f64>,
    /// Minimiser of each entry of `eigenvalues` under per-level optimisation.
    #[serde(rename = "level_A", default, skip_serializing_if = "Vec::is_empty")]
    pub level_a: Vec<f64>,
    #[serde(rename = "D_used")]
    pub d_used: usize,
    pub converged_digits: Vec<u32>,
    /// Number of matrix builds.
    pub evaluations: usize,
    /// The minimum sits on the edge of the admissible `A` range.
    #[serde(default)]
    pub at_boundary: bool,
    #[serde(default)]
    pub not_converged: bool,
}

fn to_dmatrix(h: &HamiltonianMatrix) -> Result<DMatrix<f64>> {
    if h.entries.iter().any(|v| !v.is_finite()) {
        return Err(Error::Convergence("matrix has non-finite entries".into()));
    }
    Ok(DMatrix::from_row_slice(h.dim, h.dim, &h.entries))
}

fn decompose(h: &HamiltonianMatrix) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    let m = to_dmatrix(h)?;
    SymmetricEigen::try_new(m, f64::EPSILON, 0)
        .ok_or_else(|| Error::Convergence("symmetric QR iteration did not converge".into()))
}

/// All eigenvalues of the symmetric matrix, ascending.
pub fn eigen_symmetric(h: &HamiltonianMatrix) -> Result<Vec<f64>> {
    // No iteration cap, so the eigenvalue-only path cannot fail to converge.
    let mut values: Vec<f64> = to_dmatrix(h)?
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Convergence("non-finite eigenvalue".into()));
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Eigenpairs sorted by eigenvalue; vectors are unit columns.
pub fn eigen_pairs(h: &HamiltonianMatrix) -> Result<Vec<(f64, DVector<f64>)>> {
    let eig = decompose(h)?;
    let mut pairs: Vec<(f64, DVector<f64>)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, eig.eigenvectors.column(i).into_owned()))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs)
}

/// Spectrum at one value of `A`.
pub fn spectrum_at(model: &ModelSpec, a: f64, d: usize) -> Result<Vec<f64>> {
    let ctx = BasisContext::new(model, a, d)?;
    eigen_symmetric(&build_hamiltonian(model, &ctx)?)
}

/// `E_level(A)` with evaluation counting; failures map to `+∞`.
struct LevelFn<'a> {
    model: &'a ModelSpec,
    d: usize,
    level: usize,
    evaluations: AtomicUsize,
}

impl LevelFn<'_> {
    fn eval(&self, a: f64) -> f64 {
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        match spectrum_at(self.model, a, self.d) {
            Ok(s) if s[self.level].is_finite() => s[self.level],
            _ => f64::INFINITY,
        }
    }
}

/// Admissible range in the form `(A_min, closed, first offset)`: the scan
/// visits `A_min` itself when `closed`, then `A_min + δ` for δ growing
/// geometrically from the first offset.
fn scan_origin(model: &ModelSpec) -> (f64, bool, f64) {
    let a_min = model.a_min();
    if model.admits(a_min) {
        (a_min, true, 1e-7 * a_min.max(1.0))
    } else {
        let a_lo = model
            .a_of_gamma(0.5 * model.alpha + GAMMA_MARGIN)
            .max(a_min);
        (a_min, false, (a_lo - a_min).max(1e-12))
    }
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Newton steps on central differences of `E(A)`; golden section alone
/// leaves `A` uncertain at the square root of machine precision.
fn polish(f: &LevelFn<'_>, mut a: f64, mut e: f64, lo: f64, hi: f64) -> (f64, f64) {
    for _ in 0..8 {
        let h = 1e-5 * (1.0 + a.abs());
        if a - h <= lo || a + h >= hi {
            break;
        }
        let (em, ep) = (f.eval(a - h), f.eval(a + h));
        let d1 = (ep - em) / (2.0 * h);
        let d2 = (ep - 2.0 * e + em) / (h * h);
        if !(d2 > 0.0 && d1.is_finite()) {
            break;
        }
        let step = -d1 / d2;
        if step.abs() > 10.0 * h {
            break;
        }
        let trial = a + step;
        let et = f.eval(trial);
        if et > e + 1e-14 * e.abs().max(1.0) {
            break;
        }
        a = trial;
        e = et;
        if step.abs() < 1e-13 * (1.0 + a.abs()) {
            break;
        }
    }
    (a, e)
}

struct Minimum {
    a: f64,
    energy: f64,
    at_boundary: bool,
    evaluations: usize,
}

fn minimize_level(model: &ModelSpec, d: usize, level: usize) -> Result<Minimum> {
    model.validate()?;
    if d == 0 {
        return Err(Error::domain("basis size must be >= 1"));
    }
    if level >= d {
        return Err(Error::domain(format!(
            "level {level} needs D > {level}, got D = {d}"
        )));
    }
    let f = LevelFn {
        model,
        d,
        level,
        evaluations: AtomicUsize::new(0),
    };
    let (a_min, closed, delta0) = scan_origin(model);
    let t_lo = delta0.ln();
    let scale = model.lambda.powf(2.0 / model.alpha).clamp(1.0, 1e4);
    let mut t_hi = (scale.ln() + 3.0).max(t_lo + 8.0 * SCAN_STEP);

    let mut ts: Vec<f64> = Vec::new();
    let mut es: Vec<f64> = Vec::new();
    let at = |t: f64| a_min + t.exp();
    loop {
        let start = ts.len();
        let mut k = start;
        let mut batch = Vec::new();
        loop {
            let t = t_lo + k as f64 * SCAN_STEP;
            if t > t_hi {
                break;
            }
            batch.push(t);
            k += 1;
        }
        let values: Vec<f64> = batch.par_iter().map(|&t| f.eval(at(t))).collect();
        ts.extend(batch);
        es.extend(values);
        let best = argmin(&es);
        let n = es.len();
        let rising = n >= 2 && es[n - 1] >= es[n - 2];
        if (best + 3 < n && rising) || at(t_hi) >= A_CEILING {
            break;
        }
        t_hi += 4.0;
    }
    let top = argmin(&es);
    if top + 1 == es.len() {
        return Err(Error::Bracket(format!(
            "E(A) still decreasing at A = {:.3e}",
            at(ts[top])
        )));
    }

    let mut candidates: Vec<usize> = (0..es.len())
        .filter(|&i| {
            i + 1 < es.len()
                && es[i].is_finite()
                && (i == 0 || es[i] <= es[i - 1])
                && (i + 1 == es.len() || es[i] <= es[i + 1])
        })
        .collect();
    candidates.sort_by(|&i, &j| es[i].total_cmp(&es[j]));
    candidates.truncate(REFINED_MINIMA);

    let mut best: Option<Minimum> = None;
    let boundary_e = if closed { f.eval(a_min) } else { f64::INFINITY };
    if closed && boundary_e.is_finite() {
        best = Some(Minimum {
            a: a_min,
            energy: boundary_e,
            at_boundary: true,
            evaluations: 0,
        });
    }
    let lo_a = if closed { a_min } else { a_min + delta0 };
    let mut interior: Option<(f64, f64, f64, bool)> = None;
    for i in candidates {
        let lo_t = if i == 0 { t_lo - SCAN_STEP } else { ts[i - 1] };
        let hi_t = ts[i + 1];
        let (t_star, e_star) = golden_section(|t| f.eval(at(t)), lo_t, hi_t, GOLDEN_TOL);
        let at_boundary = !closed && i == 0 && t_star - lo_t < 2.0 * GOLDEN_TOL;
        if interior.is_none_or(|(_, e, _, _)| e_star < e) {
            interior = Some((at(t_star), e_star, at(hi_t), at_boundary));
        }
    }
    if let Some((a0, e0, hi_a, at_boundary)) = interior {
        let (a, e) = polish(&f, a0, e0, lo_a, hi_a);
        if best.as_ref().is_none_or(|b| e < b.energy) {
            best = Some(Minimum {
                a,
                energy: e,
                at_boundary,
                evaluations: 0,
            });
        }
    }
    let mut best = best.ok_or_else(|| Error::Bracket("no finite energy found".into()))?;
    best.evaluations = f.evaluations.load(Ordering::Relaxed);
    Ok(best)
}

fn argmin(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map_or(0, |(i, _)| i)
}

/// Minimises the `level`-th eigenvalue over the admissible auxiliary
/// strengths and returns the full spectrum at the minimiser.
pub fn minimize_over_a(model: &ModelSpec, d: usize, level: usize) -> Result<SpectrumResult> {
    let m = minimize_level(model, d, level)?;
    let eigenvalues = spectrum_at(model, m.a, d)?;
    Ok(SpectrumResult {
        eigenvalues,
        optimal_a: Some(m.a),
        level_a: Vec::new(),
        d_used: d,
        converged_digits: Vec::new(),
        evaluations: m.evaluations + 1,
        at_boundary: m.at_boundary,
        not_converged: false,
    })
}

/// Spectrum at a fixed `A`, or minimised over `A` for the ground state.
pub fn solve_spectrum(
    model: &ModelSpec,
    d: usize,
    optimize_a: bool,
    fixed_a: Option<f64>,
) -> Result<SpectrumResult> {
    if optimize_a {
        return minimize_over_a(model, d, 0);
    }
    let a = fixed_a.ok_or_else(|| Error::domain("fixed A required when not optimising"))?;
    if !model.admits(a) {
        return Err(Error::domain(format!(
            "A = {a} violates 2*gamma > alpha (alpha = {})",
            model.alpha
        )));
    }
    Ok(SpectrumResult {
        eigenvalues: spectrum_at(model, a, d)?,
        optimal_a: None,
        level_a: Vec::new(),
        d_used: d,
        converged_digits: Vec::new(),
        evaluations: 1,
        at_boundary: false,
        not_converged: false,
    })
}

/// Minimises each of the lowest `levels` eigenvalues over its own `A`.
pub fn solve_levels(model: &ModelSpec, d: usize, levels: usize) -> Result<SpectrumResult> {
    if levels == 0 || levels > d {
        return Err(Error::domain(format!(
            "need 1 <= levels <= D, got {levels}"
        )));
    }
    let minima = (0..levels)
        .into_par_iter()
        .map(|k| minimize_level(model, d, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumResult {
        eigenvalues: minima.iter().map(|m| m.energy).collect(),
        optimal_a: Some(minima[0].a),
        level_a: minima.iter().map(|m| m.a).collect(),
        d_used: d,
        converged_digits: Vec::new(),
        evaluations: minima.iter().map(|m| m.evaluations).sum(),
        at_boundary: minima.iter().any(|m| m.at_boundary),
        not_converged: false,
    })
}

/// Decimal places on which two successive estimates agree, in the sense
/// `|ΔE| < ½·10^{-k}`.
pub fn agreeing_digits(previous: f64, current: f64) -> u32 {
    let diff = (previous - current).abs();
    if diff == 0.0 {
        return 15;
    }
    (0.5 / diff).log10().floor().clamp(0.0, 15.0) as u32
}

/// Runs the optimised solve over [`D_SCHEDULE`] until two successive sizes
/// agree to `digits` decimal places, or `d_max` is reached.
pub fn converge_to_digits(
    model: &ModelSpec,
    digits: u32,
    level: usize,
    d_max: usize,
) -> Result<SpectrumResult> {
    if digits == 0 || digits > 12 {
        return Err(Error::domain(format!(
            "digits must lie in 1..=12, got {digits}"
        )));
    }
    let schedule: Vec<usize> = D_SCHEDULE
        .iter()
        .copied()
        .filter(|&d| d > level && d <= d_max)
        .collect();
    if schedule.is_empty() {
        return Err(Error::domain(format!(
            "D_max = {d_max} leaves no admissible size"
        )));
    }
    let mut previous: Option<f64> = None;
    let mut evaluations = 0;
    let mut last = None;
    for &d in &schedule {
        let mut r = minimize_over_a(model, d, level)?;
        evaluations += r.evaluations;
        let e = r.eigenvalues[level];
        let agreed = previous.map_or(0, |p| agreeing_digits(p, e));
        r.converged_digits = vec![agreed];
        r.evaluations = evaluations;
        let done = agreed >= digits;
        previous = Some(e);
        last = Some(r);
        if done {
            break;
        }
    }
    let mut r = last.expect("schedule is non-empty");
    r.not_converged = r.converged_digits[0] < digits;
    Ok(r)
}
