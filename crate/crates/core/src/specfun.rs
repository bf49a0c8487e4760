//! Gamma ratios, Pochhammer symbols and hypergeometric series.
//!
//! Everything that can overflow a double (rising factorials of order ~100,
//! factorials, prefactors of normalisation constants) is carried as a
//! [`LogScaled`] value until the very last step.

use std::ops::{Div, Mul};

use crate::error::{Error, Result};

/// Orders up to this bound are evaluated as an explicit product.
const DIRECT_PRODUCT_MAX: u32 = 24;

/// Running sums are rescaled once a term crosses this magnitude.
const RESCALE_THRESHOLD: f64 = 1e200;

/// Relative size of the last retained term in a non-terminating unit series.
pub const UNIT_SERIES_REL_TOL: f64 = 1e-15;

/// Hard cap on the number of terms of a non-terminating unit series.
pub const UNIT_SERIES_MAX_TERMS: usize = 1_000_000;

/// A real number stored as `sign * exp(log_magnitude)`.
///
/// `sign == 0` encodes an exact zero; `log_magnitude` is then meaningless
/// and kept at `-inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogScaled {
    pub log_magnitude: f64,
    pub sign: i8,
}

impl LogScaled {
    pub const ONE: LogScaled = LogScaled {
        log_magnitude: 0.0,
        sign: 1,
    };
    pub const ZERO: LogScaled = LogScaled {
        log_magnitude: f64::NEG_INFINITY,
        sign: 0,
    };

    pub fn new(log_magnitude: f64, sign: i8) -> Self {
        if sign == 0 {
            Self::ZERO
        } else {
            LogScaled {
                log_magnitude,
                sign: sign.signum(),
            }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogScaled {
                log_magnitude: x.abs().ln(),
                sign: if x > 0.0 { 1 } else { -1 },
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn value(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_magnitude.exp(),
        }
    }

    pub fn recip(self) -> Self {
        assert!(!self.is_zero(), "reciprocal of an exact zero");
        LogScaled {
            log_magnitude: -self.log_magnitude,
            sign: self.sign,
        }
    }

    /// Square root of a non-negative value.
    pub fn sqrt(self) -> Self {
        assert!(self.sign >= 0, "square root of a negative LogScaled");
        if self.is_zero() {
            return self;
        }
        LogScaled {
            log_magnitude: 0.5 * self.log_magnitude,
            sign: 1,
        }
    }

    pub fn powf(self, p: f64) -> Self {
        assert!(self.sign > 0, "real power of a non-positive LogScaled");
        LogScaled {
            log_magnitude: p * self.log_magnitude,
            sign: 1,
        }
    }

    pub fn neg_if(self, flip: bool) -> Self {
        if flip {
            LogScaled {
                log_magnitude: self.log_magnitude,
                sign: -self.sign,
            }
        } else {
            self
        }
    }
}

impl Mul for LogScaled {
    type Output = LogScaled;

    fn mul(self, rhs: LogScaled) -> LogScaled {
        if self.is_zero() || rhs.is_zero() {
            return LogScaled::ZERO;
        }
        LogScaled {
            log_magnitude: self.log_magnitude + rhs.log_magnitude,
            sign: self.sign * rhs.sign,
        }
    }
}

impl Div for LogScaled {
    type Output = LogScaled;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: LogScaled) -> LogScaled {
        self * rhs.recip()
    }
}

/// `ln|Γ(x)|` together with the sign of `Γ(x)`.
///
/// Returns an infinite magnitude at the poles `x = 0, -1, -2, ...`.
pub fn ln_gamma(x: f64) -> (f64, i8) {
    let (lg, sign) = libm::lgamma_r(x);
    (lg, if sign < 0 { -1 } else { 1 })
}

/// `Γ(x)` as a log-scaled value. Panics at the poles.
pub fn gamma_ls(x: f64) -> LogScaled {
    let (lg, sign) = ln_gamma(x);
    assert!(lg.is_finite(), "gamma function pole at {x}");
    LogScaled::new(lg, sign)
}

fn is_non_positive_integer(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

/// Rising factorial `(a)_k = a (a+1) ... (a+k-1)` as an explicit product,
/// rescaled on the fly so that orders in the hundreds do not overflow.
fn pochhammer_product(a: f64, k: u32) -> LogScaled {
    let mut mantissa = 1.0_f64;
    let mut log_scale = 0.0_f64;
    for j in 0..k {
        let factor = a + f64::from(j);
        if factor == 0.0 {
            return LogScaled::ZERO;
        }
        mantissa *= factor;
        if mantissa.abs() > RESCALE_THRESHOLD || mantissa.abs() < 1.0 / RESCALE_THRESHOLD {
            log_scale += mantissa.abs().ln();
            mantissa = mantissa.signum();
        }
    }
    let mut out = LogScaled::from_f64(mantissa);
    out.log_magnitude += log_scale;
    out
}

/// Pochhammer symbol (rising factorial) `(a)_k`.
///
/// Low orders are multiplied out directly; high orders go through
/// `ln Γ(a+k) - ln Γ(a)` with the signs of both gamma values tracked.
/// A product that contains a zero factor (`a` a non-positive integer with
/// `k > -a`) is returned as an exact zero.
pub fn pochhammer(a: f64, k: u32) -> LogScaled {
    if k == 0 {
        return LogScaled::ONE;
    }
    if is_non_positive_integer(a) {
        if f64::from(k) > -a {
            return LogScaled::ZERO;
        }
        return pochhammer_product(a, k);
    }
    if k <= DIRECT_PRODUCT_MAX {
        return pochhammer_product(a, k);
    }
    let (lg_end, s_end) = ln_gamma(a + f64::from(k));
    let (lg_start, s_start) = ln_gamma(a);
    if lg_end.is_finite() && lg_start.is_finite() {
        LogScaled::new(lg_end - lg_start, s_end * s_start)
    } else {
        pochhammer_product(a, k)
    }
}

/// `ln n!`
pub fn ln_factorial(n: u32) -> f64 {
    if n < 2 {
        0.0
    } else {
        ln_gamma(f64::from(n) + 1.0).0
    }
}

/// Neumaier-compensated accumulator with an explicit log scale, so that sums
/// whose terms reach 1e300 or more can still be formed.
#[derive(Debug, Clone, Copy)]
struct ScaledAccumulator {
    sum: f64,
    compensation: f64,
    log_scale: f64,
}

impl ScaledAccumulator {
    fn new() -> Self {
        ScaledAccumulator {
            sum: 0.0,
            compensation: 0.0,
            log_scale: 0.0,
        }
    }

    /// Adds `term * exp(log_scale)`; returns the (possibly rescaled) term.
    fn add(&mut self, mut term: f64) -> f64 {
        if term.abs() > RESCALE_THRESHOLD {
            let shift = term.abs().ln();
            let factor = (-shift).exp();
            self.sum *= factor;
            self.compensation *= factor;
            term *= factor;
            self.log_scale += shift;
        }
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.compensation += (self.sum - t) + term;
        } else {
            self.compensation += (term - t) + self.sum;
        }
        self.sum = t;
        term
    }

    fn total(&self) -> LogScaled {
        let mut out = LogScaled::from_f64(self.sum + self.compensation);
        if !out.is_zero() {
            out.log_magnitude += self.log_scale;
        }
        out
    }
}

/// Sum of a generalised hypergeometric series that terminates because one of
/// the numerator parameters is a non-positive integer.
///
/// Terms are generated by the ratio recurrence and summation stops at the
/// first index where the numerator product vanishes. A vanishing denominator
/// while the numerator is still non-zero is a [`Error::Domain`].
pub(crate) fn terminating_series(numer: &[f64], denom: &[f64], z: f64) -> Result<LogScaled> {
    Ok(summed(numer, denom, z, false)?.0)
}

/// As [`terminating_series`], also returning `Σ|term|`, which bounds the
/// rounding error of the sum at a small multiple of machine epsilon.
pub(crate) fn terminating_series_with_magnitude(
    numer: &[f64],
    denom: &[f64],
    z: f64,
) -> Result<(LogScaled, LogScaled)> {
    summed(numer, denom, z, true)
}

fn summed(numer: &[f64], denom: &[f64], z: f64, track: bool) -> Result<(LogScaled, LogScaled)> {
    let bound = numer
        .iter()
        .filter(|a| is_non_positive_integer(**a))
        .map(|a| -*a)
        .fold(f64::INFINITY, f64::min);
    if !bound.is_finite() {
        return Err(Error::domain(
            "series does not terminate: no non-positive integer numerator parameter",
        ));
    }
    let mut acc = ScaledAccumulator::new();
    let mut magnitude = LogScaled::ONE;
    let mut log_term = 0.0_f64;
    let mut term = acc.add(1.0);
    let mut k = 0.0_f64;
    loop {
        let num: f64 = numer.iter().map(|a| a + k).product::<f64>() * z;
        if num == 0.0 {
            break;
        }
        let den: f64 = denom.iter().map(|b| b + k).product::<f64>() * (k + 1.0);
        if den == 0.0 {
            return Err(Error::domain(format!(
                "denominator parameter hits a pole at summation index {}",
                k as u64
            )));
        }
        let ratio = num / den;
        term = acc.add(term * ratio);
        if track {
            log_term += ratio.abs().ln();
            magnitude = log_add(magnitude, log_term);
        }
        k += 1.0;
        if k > bound {
            break;
        }
    }
    Ok((acc.total(), magnitude))
}

/// `x + e^{log_y}` for positive `x`.
fn log_add(x: LogScaled, log_y: f64) -> LogScaled {
    let (hi, lo) = if x.log_magnitude >= log_y {
        (x.log_magnitude, log_y)
    } else {
        (log_y, x.log_magnitude)
    };
    LogScaled::new(hi + (lo - hi).exp().ln_1p(), 1)
}

/// Terminating confluent hypergeometric function `1F1(-n; b; z)`.
pub fn hyp1f1_terminating(n: u32, b: f64, z: f64) -> Result<f64> {
    Ok(hyp1f1_terminating_ls(n, b, z)?.value())
}

pub(crate) fn hyp1f1_terminating_ls(n: u32, b: f64, z: f64) -> Result<LogScaled> {
    if !(b > 0.0) || n < 2 {
        return terminating_series(&[-f64::from(n)], &[b], z);
    }
    // (b+k) M_{k+1} = (b+2k-z) M_k - k M_{k-1}; the alternating series
    // cancels badly once z exceeds b.
    let (mut prev, mut cur) = (1.0_f64, 1.0 - z / b);
    let mut log_scale = 0.0;
    for k in 1..n {
        let k = f64::from(k);
        let next = ((b + 2.0 * k - z) * cur - k * prev) / (b + k);
        prev = cur;
        cur = next;
        if cur.abs() > 1e200 {
            prev *= 1e-200;
            cur *= 1e-200;
            log_scale += 200.0 * std::f64::consts::LN_10;
        }
    }
    if cur == 0.0 {
        return Ok(LogScaled::ZERO);
    }
    Ok(LogScaled::new(
        cur.abs().ln() + log_scale,
        if cur < 0.0 { -1 } else { 1 },
    ))
}

/// `2F1(-m, b; c; 1)` by the Chu-Vandermonde identity `(c-b)_m / (c)_m`.
pub fn hyp2f1_unit(m: u32, b: f64, c: f64) -> Result<f64> {
    let den = pochhammer(c, m);
    if den.is_zero() {
        return Err(Error::domain(format!(
            "(c)_m vanishes for c = {c}, m = {m}"
        )));
    }
    Ok((pochhammer(c - b, m) / den).value())
}

/// Terminating `3F2(-m, a2, a3; b1, b2; 1)`.
///
/// Termination happens at `k = m` or earlier, when `a3` is a non-positive
/// integer (the even-exponent matrix elements).
pub fn hyp3f2_unit_terminating(m: u32, a2: f64, a3: f64, b1: f64, b2: f64) -> Result<f64> {
    Ok(hyp3f2_unit_terminating_ls(m, a2, a3, b1, b2)?.value())
}

pub(crate) fn hyp3f2_unit_terminating_with_magnitude(
    m: u32,
    a2: f64,
    a3: f64,
    b1: f64,
    b2: f64,
) -> Result<(LogScaled, LogScaled)> {
    terminating_series_with_magnitude(&[-f64::from(m), a2, a3], &[b1, b2], 1.0)
}

pub(crate) fn hyp3f2_unit_terminating_ls(
    m: u32,
    a2: f64,
    a3: f64,
    b1: f64,
    b2: f64,
) -> Result<LogScaled> {
    terminating_series(&[-f64::from(m), a2, a3], &[b1, b2], 1.0)
}

/// First `terms` terms of `pFq(numerators; denominators; 1)`.
pub fn hyp_pfq_partial(numerators: &[f64], denominators: &[f64], terms: usize) -> Result<f64> {
    if terms == 0 {
        return Err(Error::domain("at least one term is required"));
    }
    let mut acc = ScaledAccumulator::new();
    let mut term = acc.add(1.0);
    for k in 0..terms - 1 {
        let kf = k as f64;
        let num: f64 = numerators.iter().map(|a| a + kf).product();
        if num == 0.0 {
            break;
        }
        let den: f64 = denominators.iter().map(|b| b + kf).product::<f64>() * (kf + 1.0);
        if den == 0.0 {
            return Err(Error::domain(format!(
                "denominator parameter hits a pole at summation index {k}"
            )));
        }
        term = acc.add(term * num / den);
    }
    Ok(acc.total().value())
}

/// Result of summing a non-terminating series at unit argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSeries {
    /// Partial sum plus the asymptotic tail estimate.
    pub value: f64,
    /// Number of terms actually summed.
    pub terms: usize,
    /// Estimated remainder that was added to the partial sum.
    pub tail: f64,
    /// True when the last term fell below the relative tolerance.
    pub converged: bool,
}

fn power_tail(t: f64, k: usize, p: f64) -> f64 {
    t * (k as f64 / (p - 1.0) + 0.5)
}

/// `pFq(numerators; denominators; 1)` for a convergent, non-terminating
/// series with positive terms from some index on.
///
/// Terms behave like `k^(-p)` with `p = 1 + Σb - Σa`; the series converges
/// only for `p > 1`. Summation stops once a term drops below
/// [`UNIT_SERIES_REL_TOL`] of the running sum or after
/// [`UNIT_SERIES_MAX_TERMS`] terms, in which case the power-law remainder
/// `Σ_{k≥K} t_k ≈ t_K (K/(p-1) + 1/2)` is added, extrapolated from `K/2`
/// and `K`.
pub fn hyp_pfq_unit(numerators: &[f64], denominators: &[f64]) -> Result<UnitSeries> {
    let excess: f64 = denominators.iter().sum::<f64>() - numerators.iter().sum::<f64>();
    let p = 1.0 + excess;
    if excess <= 0.0 {
        return Err(Error::Divergence(format!(
            "unit-argument series needs Σb - Σa > 0, got {excess}"
        )));
    }
    let mut acc = ScaledAccumulator::new();
    let mut term = acc.add(1.0);
    let mut half = None;
    let mut k = 0usize;
    loop {
        let kf = k as f64;
        let num: f64 = numerators.iter().map(|a| a + kf).product();
        if num == 0.0 {
            return Ok(UnitSeries {
                value: acc.total().value(),
                terms: k + 1,
                tail: 0.0,
                converged: true,
            });
        }
        let den: f64 = denominators.iter().map(|b| b + kf).product::<f64>() * (kf + 1.0);
        if den == 0.0 {
            return Err(Error::domain(format!(
                "denominator parameter hits a pole at summation index {k}"
            )));
        }
        let next = term * num / den;
        k += 1;
        let sum = acc.total().value();
        if next.abs() <= UNIT_SERIES_REL_TOL * sum.abs() {
            acc.add(next);
            return Ok(UnitSeries {
                value: acc.total().value(),
                terms: k + 1,
                tail: 0.0,
                converged: true,
            });
        }
        if k == UNIT_SERIES_MAX_TERMS / 2 {
            half = Some(sum + power_tail(next, k, p));
        }
        if k >= UNIT_SERIES_MAX_TERMS {
            // The remainder estimate is off by O(K^-p); combine K/2 and K.
            let full = sum + power_tail(next, k, p);
            let w = 2f64.powf(p);
            let value = half.map_or(full, |h| (w * full - h) / (w - 1.0));
            return Ok(UnitSeries {
                value,
                terms: k,
                tail: value - sum,
                converged: false,
            });
        }
        term = acc.add(next);
    }
}
