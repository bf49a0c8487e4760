//! Matrix elements `<ψ_m| x^{-α} |ψ_n>` and the truncated Hamiltonian.
//!
//! The general element is a terminating `3F2` at unit argument. It is always
//! summed with the smaller index as the `-m` parameter: in that ordering every
//! term of the series has the same sign, while the reversed ordering cancels
//! catastrophically once the indices reach a few dozen.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{gk_energy, BasisContext, ModelSpec};
use crate::error::{Error, Result};
use crate::specfun::{
    hyp3f2_unit_terminating_ls, hyp3f2_unit_terminating_with_magnitude, ln_gamma, LogScaled,
};

/// Leading block whose entries are re-evaluated in reversed index order to
/// certify symmetry. Beyond roughly this size the reversed series is too
/// ill-conditioned to be a meaningful check.
pub const SYMMETRY_PROBE: usize = 12;

/// Relative tolerance of the symmetry certificate.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Multiple of `ε Σ|term|` allowed on top of [`SYMMETRY_TOL`] for the
/// rounding error of the reversed-order series.
const ROUNDING_FACTOR: f64 = 64.0;

/// Cumulative log tables over the basis index.
#[derive(Debug, Clone)]
struct IndexTables {
    ln_fact: Vec<f64>,
    /// `ln (γ)_n`
    ln_poch_gamma: Vec<f64>,
}

impl IndexTables {
    fn new(gamma: f64, len: usize) -> Self {
        let mut ln_fact = Vec::with_capacity(len);
        let mut ln_poch_gamma = Vec::with_capacity(len);
        let (mut f, mut p) = (0.0_f64, 0.0_f64);
        for n in 0..len {
            ln_fact.push(f);
            ln_poch_gamma.push(p);
            f += ((n + 1) as f64).ln();
            p += (gamma + n as f64).ln();
        }
        IndexTables {
            ln_fact,
            ln_poch_gamma,
        }
    }

    /// `√(n! (γ)_m / (m! (γ)_n))` with `m ≤ n`, in log form.
    fn ln_radical(&self, m: usize, n: usize) -> f64 {
        0.5 * (self.ln_fact[n] + self.ln_poch_gamma[m] - self.ln_fact[m] - self.ln_poch_gamma[n])
    }
}

fn parity(m: usize, n: usize) -> bool {
    (m + n) % 2 == 1
}

/// Evaluator for the elements of `x^{-α}` in one basis, sharing the index
/// tables between entries.
#[derive(Debug, Clone)]
pub struct PowerElements {
    alpha: f64,
    beta: f64,
    gamma: f64,
    tables: IndexTables,
    /// `ln (α/2)_n`
    ln_poch_half_alpha: Vec<f64>,
    /// `(α/2) ln β + ln Γ(γ - α/2) - ln Γ(γ)`
    ln_base: f64,
}

impl PowerElements {
    /// Tables for indices `0..len`. Requires `2γ > α`.
    pub fn new(ctx: &BasisContext, alpha: f64, len: usize) -> Result<Self> {
        check_validity(ctx.gamma, alpha)?;
        let half = 0.5 * alpha;
        let mut ln_poch_half_alpha = Vec::with_capacity(len);
        let mut acc = 0.0_f64;
        for n in 0..len {
            ln_poch_half_alpha.push(acc);
            acc += (half + n as f64).ln();
        }
        let ln_base = half * ctx.beta.ln() + ln_gamma(ctx.gamma - half).0 - ln_gamma(ctx.gamma).0;
        Ok(PowerElements {
            alpha,
            beta: ctx.beta,
            gamma: ctx.gamma,
            tables: IndexTables::new(ctx.gamma, len),
            ln_poch_half_alpha,
            ln_base,
        })
    }

    fn len(&self) -> usize {
        self.tables.ln_fact.len()
    }

    /// General formula evaluated with `m` as the `-m` parameter and `n`
    /// entering `1 - α/2 - n`, exactly as written, without reordering.
    fn ordered_raw(&self, m: usize, n: usize) -> Result<f64> {
        let half = 0.5 * self.alpha;
        let series = hyp3f2_unit_terminating_ls(
            m as u32,
            self.gamma - half,
            1.0 - half,
            self.gamma,
            1.0 - half - n as f64,
        )?;
        Ok((LogScaled::new(self.ln_prefactor(m, n), 1) * series)
            .neg_if(parity(m, n))
            .value())
    }

    fn ln_prefactor(&self, m: usize, n: usize) -> f64 {
        let t = &self.tables;
        self.ln_base + self.ln_poch_half_alpha[n] - t.ln_poch_gamma[n]
            + 0.5 * (t.ln_poch_gamma[n] + t.ln_poch_gamma[m] - t.ln_fact[n] - t.ln_fact[m])
    }

    /// Value and the sum of absolute terms scaled by the prefactor.
    fn ordered_with_magnitude(&self, m: usize, n: usize) -> Result<(f64, f64)> {
        let half = 0.5 * self.alpha;
        let (series, magnitude) = hyp3f2_unit_terminating_with_magnitude(
            m as u32,
            self.gamma - half,
            1.0 - half,
            self.gamma,
            1.0 - half - n as f64,
        )?;
        let pref = LogScaled::new(self.ln_prefactor(m, n), 1);
        Ok((
            (pref * series).neg_if(parity(m, n)).value(),
            (pref * magnitude).value(),
        ))
    }

    /// `<ψ_m| x^{-α} |ψ_n>` from the general formula.
    pub fn general(&self, m: usize, n: usize) -> Result<f64> {
        self.check_index(m, n)?;
        let (lo, hi) = (m.min(n), m.max(n));
        self.ordered_raw(lo, hi)
    }

    /// Closed forms for `α = 2, 4, 6`; the general formula otherwise.
    pub fn element(&self, m: usize, n: usize) -> Result<f64> {
        self.check_index(m, n)?;
        let (lo, hi) = (m.min(n), m.max(n));
        if self.alpha == 2.0 {
            Ok(closed_alpha2(self.beta, self.gamma, &self.tables, lo, hi))
        } else if self.alpha == 4.0 {
            Ok(closed_alpha4(self.beta, self.gamma, &self.tables, lo, hi))
        } else if self.alpha == 6.0 {
            Ok(closed_alpha6(self.beta, self.gamma, &self.tables, lo, hi))
        } else {
            self.ordered_raw(lo, hi)
        }
    }

    fn check_index(&self, m: usize, n: usize) -> Result<()> {
        if m.max(n) >= self.len() {
            return Err(Error::domain(format!(
                "index ({m}, {n}) outside table of length {}",
                self.len()
            )));
        }
        Ok(())
    }
}

fn check_validity(gamma: f64, alpha: f64) -> Result<()> {
    if 2.0 * gamma > alpha {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "matrix elements of x^-{alpha} need 2*gamma > alpha, got gamma = {gamma}"
        )))
    }
}

fn closed_alpha2(beta: f64, gamma: f64, t: &IndexTables, m: usize, n: usize) -> f64 {
    let v = beta / (gamma - 1.0) * t.ln_radical(m, n).exp();
    if parity(m, n) {
        -v
    } else {
        v
    }
}

fn closed_alpha4(beta: f64, gamma: f64, t: &IndexTables, m: usize, n: usize) -> f64 {
    let (mf, nf) = (m as f64, n as f64);
    let bracket = gamma * (nf - mf + 1.0) + 2.0 * mf;
    let pref = beta * beta / (gamma * (gamma - 1.0) * (gamma - 2.0));
    let v = pref * t.ln_radical(m, n).exp() * bracket;
    if parity(m, n) {
        -v
    } else {
        v
    }
}

fn closed_alpha6(beta: f64, gamma: f64, t: &IndexTables, m: usize, n: usize) -> f64 {
    let (mf, nf) = (m as f64, n as f64);
    let g = gamma;
    let bracket = (2.0 + nf) * (1.0 + nf) * g * (g + 1.0)
        - 2.0 * mf * (1.0 + nf) * (g - 3.0) * (g + 1.0)
        - mf * (1.0 - mf) * (g - 2.0) * (g - 3.0);
    let pref = 0.5 * beta.powi(3) / ((g + 1.0) * g * (g - 1.0) * (g - 2.0) * (g - 3.0));
    let v = pref * t.ln_radical(m, n).exp() * bracket;
    if parity(m, n) {
        -v
    } else {
        v
    }
}

fn closed_form_tables(ctx: &BasisContext, m: u32, n: u32, min_gamma: f64) -> Result<IndexTables> {
    if !(ctx.gamma > min_gamma) {
        return Err(Error::domain(format!(
            "closed form needs gamma > {min_gamma}, got {}",
            ctx.gamma
        )));
    }
    Ok(IndexTables::new(ctx.gamma, m.max(n) as usize + 1))
}

/// `<ψ_m| x^{-α} |ψ_n>` from the general terminating-`3F2` formula.
pub fn matelem_x_pow(ctx: &BasisContext, alpha: f64, m: u32, n: u32) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::domain(format!("alpha must be > 0, got {alpha}")));
    }
    PowerElements::new(ctx, alpha, m.max(n) as usize + 1)?.general(m as usize, n as usize)
}

/// Closed form of `<ψ_m| x^{-2} |ψ_n>`; needs `γ > 1`.
pub fn matelem_alpha2(ctx: &BasisContext, m: u32, n: u32) -> Result<f64> {
    let t = closed_form_tables(ctx, m, n, 1.0)?;
    let (lo, hi) = (m.min(n) as usize, m.max(n) as usize);
    Ok(closed_alpha2(ctx.beta, ctx.gamma, &t, lo, hi))
}

/// Closed form of `<ψ_m| x^{-4} |ψ_n>`; needs `γ > 2`.
pub fn matelem_alpha4(ctx: &BasisContext, m: u32, n: u32) -> Result<f64> {
    let t = closed_form_tables(ctx, m, n, 2.0)?;
    let (lo, hi) = (m.min(n) as usize, m.max(n) as usize);
    Ok(closed_alpha4(ctx.beta, ctx.gamma, &t, lo, hi))
}

/// Closed form of `<ψ_m| x^{-6} |ψ_n>`; needs `γ > 3`.
pub fn matelem_alpha6(ctx: &BasisContext, m: u32, n: u32) -> Result<f64> {
    let t = closed_form_tables(ctx, m, n, 3.0)?;
    let (lo, hi) = (m.min(n) as usize, m.max(n) as usize);
    Ok(closed_alpha6(ctx.beta, ctx.gamma, &t, lo, hi))
}

/// Dense symmetric matrix of the Hamiltonian in a truncated basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianMatrix {
    pub dim: usize,
    /// Row-major entries.
    pub entries: Vec<f64>,
    pub ctx: BasisContext,
    pub model: ModelSpec,
}

impl HamiltonianMatrix {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.dim)
    }

    /// Largest `|H_mn - H_nm|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for m in 0..self.dim {
            for n in (m + 1)..self.dim {
                worst = worst.max((self.get(m, n) - self.get(n, m)).abs());
            }
        }
        worst
    }

    /// Plain-text dump: one row per line, 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix serialises")
    }
}

/// Assembles `H_mn = 2β(2n+γ)δ_mn + λ<x^{-α}>_mn - A<x^{-2}>_mn`.
///
/// Only the upper triangle is evaluated (smaller index first) and mirrored;
/// [`certify_symmetry`] cross-checks the leading block in reversed order.
pub fn build_hamiltonian(model: &ModelSpec, ctx: &BasisContext) -> Result<HamiltonianMatrix> {
    model.validate()?;
    let d = ctx.size;
    if d == 0 {
        return Err(Error::domain("matrix dimension must be >= 1"));
    }
    check_validity(ctx.gamma, model.alpha)?;

    let fold = model.alpha == 2.0;
    let spike = if fold {
        PowerElements::new(ctx, 2.0, d)?
    } else {
        PowerElements::new(ctx, model.alpha, d)?
    };
    let spike_coeff = if fold {
        model.lambda - ctx.a
    } else {
        model.lambda
    };
    let aux = if !fold && ctx.a != 0.0 {
        Some(PowerElements::new(ctx, 2.0, d)?)
    } else {
        None
    };

    let upper: Vec<Vec<f64>> = (0..d)
        .into_par_iter()
        .map(|m| {
            (m..d)
                .map(|n| {
                    let mut v = 0.0;
                    if spike_coeff != 0.0 {
                        v += spike_coeff * spike.element(m, n)?;
                    }
                    if let Some(aux) = &aux {
                        v -= ctx.a * aux.element(m, n)?;
                    }
                    if m == n {
                        v += gk_energy(ctx, n as u32);
                    }
                    Ok(v)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut entries = vec![0.0; d * d];
    for (m, row) in upper.iter().enumerate() {
        for (offset, &v) in row.iter().enumerate() {
            let n = m + offset;
            entries[m * d + n] = v;
            entries[n * d + m] = v;
        }
    }
    let h = HamiltonianMatrix {
        dim: d,
        entries,
        ctx: *ctx,
        model: *model,
    };
    certify_symmetry(&h)?;
    Ok(h)
}

/// Re-evaluates the interaction part of the leading `SYMMETRY_PROBE` block
/// with the larger index as the `-m` parameter and compares it with the
/// assembled lower triangle, allowing for the rounding error of the reversed
/// series. Returns the largest mismatch relative to the matrix scale.
pub fn certify_symmetry(h: &HamiltonianMatrix) -> Result<f64> {
    let ctx = &h.ctx;
    let model = &h.model;
    let probe = h.dim.min(SYMMETRY_PROBE);
    let fold = model.alpha == 2.0;
    let spike = PowerElements::new(ctx, model.alpha, probe)?;
    let spike_coeff = if fold {
        model.lambda - ctx.a
    } else {
        model.lambda
    };
    let aux = if !fold && ctx.a != 0.0 {
        Some(PowerElements::new(ctx, 2.0, probe)?)
    } else {
        None
    };
    // For even α the reversed series is 0/0; there the closed form is
    // compared with the general formula instead.
    let cross = |p: &PowerElements, m: usize, n: usize| -> Result<(f64, f64)> {
        if (0.5 * p.alpha).fract() == 0.0 {
            p.ordered_with_magnitude(n, m)
        } else {
            p.ordered_with_magnitude(m, n)
        }
    };
    let scale = h.entries.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
    let mut worst = 0.0_f64;
    for m in 0..probe {
        for n in 0..m {
            let (s, s_mag) = cross(&spike, m, n)?;
            let mut v = spike_coeff * s;
            let mut rounding = spike_coeff.abs() * s_mag;
            if let Some(aux) = &aux {
                let (x, x_mag) = cross(aux, m, n)?;
                v -= ctx.a * x;
                rounding += ctx.a.abs() * x_mag;
            }
            let mismatch = (v - h.get(m, n)).abs();
            let tolerance = SYMMETRY_TOL * scale + ROUNDING_FACTOR * f64::EPSILON * rounding;
            if mismatch > tolerance {
                return Err(Error::Asymmetry {
                    row: m,
                    col: n,
                    mismatch,
                    tolerance,
                });
            }
            worst = worst.max(mismatch / scale);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn validity_region() {
        let ctx = BasisContext::from_gamma(2.0, 1.0, 4).unwrap();
        assert!(matelem_x_pow(&ctx, 4.0, 0, 0).is_err());
        assert!(matelem_x_pow(&ctx, 3.9, 0, 0).is_ok());
        assert!(matelem_alpha4(&ctx, 0, 0).is_err());
        assert!(matelem_alpha6(&BasisContext::from_gamma(3.0, 1.0, 1).unwrap(), 0, 0).is_err());
        assert!(matelem_alpha2(&BasisContext::from_gamma(1.0, 1.0, 1).unwrap(), 0, 0).is_err());
    }

    #[test]
    fn diagonal_ground_element() {
        // m = n = 0: β^{α/2} Γ(γ-α/2)/Γ(γ)
        let ctx = BasisContext::from_gamma(2.7, 1.3, 1).unwrap();
        for &alpha in &[0.5, 1.0, 3.3, 5.0] {
            let expected =
                1.3f64.powf(alpha / 2.0) * (ln_gamma(2.7 - alpha / 2.0).0 - ln_gamma(2.7).0).exp();
            assert!(rel(matelem_x_pow(&ctx, alpha, 0, 0).unwrap(), expected) < 1e-14);
        }
    }

    #[test]
    fn even_alpha_ground_values() {
        let (g, b) = (3.4, 1.2);
        let ctx = BasisContext::from_gamma(g, b, 1).unwrap();
        assert!(rel(matelem_alpha2(&ctx, 0, 0).unwrap(), b / (g - 1.0)) < 1e-15);
        assert!(
            rel(
                matelem_alpha4(&ctx, 0, 0).unwrap(),
                b * b / ((g - 1.0) * (g - 2.0))
            ) < 1e-14
        );
        let ctx = BasisContext::from_gamma(4.2, b, 1).unwrap();
        assert!(
            rel(
                matelem_alpha6(&ctx, 0, 0).unwrap(),
                b.powi(3) / (3.2 * 2.2 * 1.2)
            ) < 1e-14
        );
        let ctx = BasisContext::from_gamma(3.0, 1.0, 2).unwrap();
        assert!(rel(matelem_alpha4(&ctx, 1, 1).unwrap(), 5.0 / 6.0) < 1e-15);
    }

    #[test]
    fn alpha2_first_off_diagonal() {
        // m=0, n=1: -β/(γ-1) √(1/γ)
        let (g, b) = (2.5, 1.0);
        let ctx = BasisContext::from_gamma(g, b, 2).unwrap();
        let v = matelem_alpha2(&ctx, 0, 1).unwrap();
        assert!(rel(v, -b / ((g - 1.0) * g.sqrt())) < 1e-15);
        assert!(rel(matelem_x_pow(&ctx, 2.0, 0, 1).unwrap(), v) < 1e-14);
        assert_eq!(v, matelem_alpha2(&ctx, 1, 0).unwrap());
    }

    #[test]
    fn hamiltonian_free_case_is_diagonal() {
        let model = ModelSpec::half_line(1.0, 0.0);
        let ctx = BasisContext::new(&model, 0.0, 5).unwrap();
        let h = build_hamiltonian(&model, &ctx).unwrap();
        for m in 0..5 {
            for n in 0..5 {
                let expected = if m == n {
                    2.0 * (2.0 * m as f64 + 1.5)
                } else {
                    0.0
                };
                assert_eq!(h.get(m, n), expected);
            }
        }
    }

    #[test]
    fn hamiltonian_single_entry() {
        // D = 1, α = 2: 2βγ + (λ - A)β/(γ-1)
        let model = ModelSpec::new(2.0, 3.0, 2.0, 1, 0).unwrap();
        let ctx = BasisContext::new(&model, 1.5, 1).unwrap();
        let h = build_hamiltonian(&model, &ctx).unwrap();
        let (b, g) = (ctx.beta, ctx.gamma);
        let expected = 2.0 * b * g + (3.0 - 1.5) * b / (g - 1.0);
        assert!(rel(h.get(0, 0), expected) < 1e-14);

        // general α
        let model = ModelSpec::new(1.3, 0.7, 2.0, 1, 0).unwrap();
        let ctx = BasisContext::new(&model, 0.4, 1).unwrap();
        let h = build_hamiltonian(&model, &ctx).unwrap();
        let (b, g) = (ctx.beta, ctx.gamma);
        let expected = 2.0 * b * g
            + 0.7 * b.powf(0.65) * (ln_gamma(g - 0.65).0 - ln_gamma(g).0).exp()
            - 0.4 * b / (g - 1.0);
        assert!(rel(h.get(0, 0), expected) < 1e-14);
    }

    #[test]
    fn symmetric_and_certified() {
        for &(alpha, lambda, a) in &[(1.0, 1.0, 0.3), (4.0, 1000.0, 150.0), (2.5, 2.0, 1.0)] {
            let model = ModelSpec::half_line(alpha, lambda);
            let ctx = BasisContext::new(&model, a, 40).unwrap();
            let h = build_hamiltonian(&model, &ctx).unwrap();
            assert_eq!(h.max_asymmetry(), 0.0);
            let worst = certify_symmetry(&h).unwrap();
            assert!(worst < SYMMETRY_TOL, "alpha={alpha}: {worst}");
        }
    }

    #[test]
    fn asymmetry_detected() {
        let model = ModelSpec::half_line(1.0, 1.0);
        let ctx = BasisContext::new(&model, 0.3, 6).unwrap();
        let mut h = build_hamiltonian(&model, &ctx).unwrap();
        h.entries[3 * 6 + 1] += 1e-6;
        assert!(matches!(certify_symmetry(&h), Err(Error::Asymmetry { .. })));
    }

    #[test]
    fn validity_enforced_in_assembly() {
        let model = ModelSpec::half_line(4.0, 1.0);
        let ctx = BasisContext::new(&model, 0.5, 3).unwrap();
        assert!(matches!(
            build_hamiltonian(&model, &ctx),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn text_dump_format() {
        let model = ModelSpec::half_line(1.0, 1.0);
        let ctx = BasisContext::new(&model, 0.3, 3).unwrap();
        let h = build_hamiltonian(&model, &ctx).unwrap();
        let text = h.to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        for (m, line) in lines.iter().enumerate() {
            let cols: Vec<f64> = line.split(' ').map(|s| s.parse().unwrap()).collect();
            assert_eq!(cols.len(), 3);
            for (n, v) in cols.iter().enumerate() {
                assert_eq!(*v, h.get(m, n));
            }
        }
        let back: HamiltonianMatrix = serde_json::from_str(&h.to_json()).unwrap();
        assert_eq!(back, h);
    }
}
