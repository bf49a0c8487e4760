//! Reference eigenvalues by direct integration of the radial equation.
//!
//! With `x = e^t` and `ψ = e^{t/2} φ` the equation becomes
//! `φ'' = [x²(V - E) + ¼] φ` on a uniform `t` grid, which resolves both the
//! spike near the origin and the oscillator tail with one step size. The
//! Numerov recurrence is integrated outward and the number of sign changes
//! (a Sturm count) brackets the requested level; bisection on that count
//! converges to the discrete Dirichlet eigenvalue on `[x_min, x_max]`.

use serde::{Deserialize, Serialize};

use crate::basis::ModelSpec;
use crate::error::{Error, Result};

/// Decay exponent `∫√(V-E) dx` demanded across each forbidden region.
const WKB_ACTION: f64 = 40.0;
const DEFAULT_STEPS: usize = 40_000;
const DEFAULT_TOLERANCE: f64 = 1e-9;
const RESCALE: f64 = 1e100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub steps: usize,
    pub energy_bracket: (f64, f64),
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub energy: f64,
    pub node_count: usize,
    pub config_used: OracleConfig,
    /// Extrapolation from a rerun with half the step.
    pub richardson_estimate: f64,
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_min > 0.0 && self.x_max > self.x_min && self.x_max.is_finite()) {
            return Err(Error::domain(format!(
                "need 0 < x_min < x_max, got [{}, {}]",
                self.x_min, self.x_max
            )));
        }
        if self.steps < 16 {
            return Err(Error::domain("at least 16 steps are required"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::domain("tolerance must be positive"));
        }
        let (lo, hi) = self.energy_bracket;
        if !(lo < hi) {
            return Err(Error::domain(format!("empty energy bracket [{lo}, {hi}]")));
        }
        Ok(())
    }

    /// Cutoffs and bracket chosen from the potential alone, so that the
    /// level is enclosed and both forbidden regions carry a decay of at
    /// least `e^-40`.
    pub fn auto(model: &ModelSpec, level: usize) -> Result<Self> {
        model.validate()?;
        let v_min = potential_minimum(model);
        let spacing = 4.0 * model.b.sqrt();
        let lo = v_min;
        let mut hi = v_min + spacing * (level as f64 + 1.0) + 1.0;
        for _ in 0..60 {
            let cfg = Self::for_energy(model, (lo, hi));
            if sturm_count(model, hi, &cfg)? > level {
                return Ok(cfg);
            }
            hi = lo + 2.0 * (hi - lo);
        }
        Err(Error::Bracket(format!(
            "no bracket found for level {level}"
        )))
    }

    fn for_energy(model: &ModelSpec, bracket: (f64, f64)) -> Self {
        let e = bracket.1;
        let (x_in, x_out) = turning_points(model, e);
        let x_min = inner_cutoff(model, e, x_in);
        let x_max = outer_cutoff(model, e, x_out).max(((e + 40.0) / model.b).sqrt());
        OracleConfig {
            x_min,
            x_max,
            steps: DEFAULT_STEPS,
            energy_bracket: bracket,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

/// `V(x) = Bx² + λ/x^α + (Λ(Λ+1) + A_extra)/x²`.
pub fn effective_potential(model: &ModelSpec, a_extra: f64, x: f64) -> f64 {
    model.b * x * x
        + model.lambda * x.powf(-model.alpha)
        + (model.centrifugal() + a_extra) / (x * x)
}

fn potential(model: &ModelSpec, x: f64) -> f64 {
    effective_potential(model, 0.0, x)
}

/// Coefficient of `1/x²` that governs the small-`x` power law.
fn inverse_square(model: &ModelSpec) -> f64 {
    let mut c = model.centrifugal();
    if model.alpha == 2.0 {
        c += model.lambda;
    }
    c
}

fn spike_dominates(model: &ModelSpec) -> bool {
    model.alpha > 2.0 && model.lambda > 0.0
}

fn potential_minimum(model: &ModelSpec) -> f64 {
    let (mut best, mut t) = (f64::INFINITY, -12.0_f64);
    while t < 8.0 {
        best = best.min(potential(model, t.exp()));
        t += 0.01;
    }
    // the minimum can lie below the grid only as a limit 0 at the origin
    best.max(0.0)
}

/// Classical turning points at energy `e` (the innermost and outermost
/// roots of `V = e`), located by scanning `ln x` and bisecting.
fn turning_points(model: &ModelSpec, e: f64) -> (f64, f64) {
    let v = |t: f64| potential(model, t.exp()) - e;
    let grid: Vec<f64> = (0..=2000).map(|i| -14.0 + 0.01 * f64::from(i)).collect();
    let root = |a: f64, b: f64| {
        let (mut a, mut b) = (a, b);
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if (v(m) > 0.0) == (v(a) > 0.0) {
                a = m;
            } else {
                b = m;
            }
        }
        (0.5 * (a + b)).exp()
    };
    let mut inner = None;
    let mut outer = None;
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        if v(a) > 0.0 && v(b) <= 0.0 && inner.is_none() {
            inner = Some(root(a, b));
        }
        if v(a) <= 0.0 && v(b) > 0.0 {
            outer = Some(root(a, b));
        }
    }
    let outer = outer.unwrap_or_else(|| (e.max(1.0) / model.b).sqrt());
    (inner.unwrap_or(0.0), outer)
}

fn inner_cutoff(model: &ModelSpec, e: f64, x_in: f64) -> f64 {
    if spike_dominates(model) && x_in > 0.0 {
        // walk inward in ln x until the accumulated action is large enough
        let mut t = x_in.ln();
        let dt = 1e-3;
        let mut action = 0.0;
        while action < WKB_ACTION && t > -40.0 {
            let x = t.exp();
            action += (potential(model, x) - e).max(0.0).sqrt() * x * dt;
            t -= dt;
        }
        t.exp()
    } else {
        // power-law start; keep the subdominant spike negligible
        let mut x_min: f64 = 1e-4;
        if model.lambda > 0.0 && model.alpha < 2.0 {
            x_min = x_min.min((1e-10 / model.lambda).powf(1.0 / (2.0 - model.alpha)));
        }
        x_min
    }
}

fn outer_cutoff(model: &ModelSpec, e: f64, x_out: f64) -> f64 {
    let mut t = x_out.ln();
    let dt = 1e-3;
    let mut action = 0.0;
    while action < WKB_ACTION && t < 20.0 {
        let x = t.exp();
        action += (potential(model, x) - e).max(0.0).sqrt() * x * dt;
        t += dt;
    }
    t.exp()
}

struct Grid {
    t0: f64,
    h: f64,
    steps: usize,
}

impl Grid {
    fn new(cfg: &OracleConfig, steps: usize) -> Self {
        let t0 = cfg.x_min.ln();
        Grid {
            t0,
            h: (cfg.x_max.ln() - t0) / steps as f64,
            steps,
        }
    }

    fn x(&self, i: usize) -> f64 {
        (self.t0 + self.h * i as f64).exp()
    }
}

/// `Q(t) = x²(V - E) + ¼`.
fn q_value(model: &ModelSpec, x: f64, e: f64) -> f64 {
    x * x * (potential(model, x) - e) + 0.25
}

/// Number of sign changes of the outward Numerov solution on the grid,
/// which equals the number of discrete levels below `e`.
fn count_nodes(model: &ModelSpec, e: f64, grid: &Grid) -> Result<usize> {
    let h2 = grid.h * grid.h / 12.0;
    let q0 = q_value(model, grid.x(0), e);
    let q1 = q_value(model, grid.x(1), e);
    let (mut p0, mut p1) = if spike_dominates(model) {
        let ratio = (q0 / q1).powf(0.25) * (0.5 * grid.h * (q0.sqrt() + q1.sqrt())).exp();
        (1.0, ratio)
    } else {
        let s = (inverse_square(model) + 0.25).max(0.0).sqrt();
        (1.0, (s * grid.h).exp())
    };
    if !(p1.is_finite() && q0.is_finite()) {
        return Err(Error::Stiffness(format!(
            "start values not finite at x_min = {:.3e}",
            grid.x(0)
        )));
    }
    let (mut qa, mut qb) = (q0, q1);
    let mut nodes = 0;
    for i in 2..=grid.steps {
        let qc = q_value(model, grid.x(i), e);
        let p2 = (2.0 * (1.0 + 5.0 * h2 * qb) * p1 - (1.0 - h2 * qa) * p0) / (1.0 - h2 * qc);
        if !p2.is_finite() {
            return Err(Error::Stiffness(format!(
                "outward solution overflowed at x = {:.3e}",
                grid.x(i)
            )));
        }
        if i < grid.steps && (p2 < 0.0) != (p1 < 0.0) && p2 != 0.0 {
            nodes += 1;
        }
        p0 = p1;
        p1 = p2;
        if p1.abs() > RESCALE {
            p0 /= RESCALE;
            p1 /= RESCALE;
        }
        qa = qb;
        qb = qc;
    }
    // a sign change in the last cell means the Dirichlet condition at
    // x_max is crossed
    if (p1 < 0.0) != (p0 < 0.0) && p1 != 0.0 {
        nodes += 1;
    }
    Ok(nodes)
}

fn sturm_count(model: &ModelSpec, e: f64, cfg: &OracleConfig) -> Result<usize> {
    count_nodes(model, e, &Grid::new(cfg, cfg.steps))
}

fn bisect_level(model: &ModelSpec, level: usize, cfg: &OracleConfig, steps: usize) -> Result<f64> {
    let grid = Grid::new(cfg, steps);
    let (mut lo, mut hi) = cfg.energy_bracket;
    let (c_lo, c_hi) = (
        count_nodes(model, lo, &grid)?,
        count_nodes(model, hi, &grid)?,
    );
    if c_lo > level || c_hi <= level {
        return Err(Error::Bracket(format!(
            "level {level} not enclosed: {c_lo} levels below {lo}, {c_hi} below {hi}"
        )));
    }
    while hi - lo > cfg.tolerance {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_nodes(model, mid, &grid)? > level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Eigenvalue of the requested level by Sturm-count bisection, with a
/// half-step rerun for the Richardson estimate (the scheme is fourth order).
pub fn shoot_eigenvalue(
    model: &ModelSpec,
    level: usize,
    config: &OracleConfig,
) -> Result<OracleResult> {
    model.validate()?;
    config.validate()?;
    let coarse = bisect_level(model, level, config, config.steps)?;
    let fine = bisect_level(model, level, config, 2 * config.steps)?;
    Ok(OracleResult {
        energy: coarse,
        node_count: level,
        config_used: *config,
        richardson_estimate: fine + (fine - coarse) / 15.0,
    })
}

/// [`shoot_eigenvalue`] with [`OracleConfig::auto`].
pub fn shoot_auto(model: &ModelSpec, level: usize) -> Result<OracleResult> {
    shoot_eigenvalue(model, level, &OracleConfig::auto(model, level)?)
}

/// Sign changes of the outward solution at energy `e` over the configured
/// grid, excluding the endpoint.
pub fn node_count_at(model: &ModelSpec, e: f64, config: &OracleConfig) -> Result<usize> {
    sturm_count(model, e, config)
}
