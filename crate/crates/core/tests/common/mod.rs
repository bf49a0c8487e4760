//! Quadrature oracle for matrix elements, independent of the series code.

/// `ψ_n(x)` from the Laguerre three-term recurrence, independent of the
/// hypergeometric code in the crate.
pub fn psi(beta: f64, gamma: f64, n: u32, x: f64) -> f64 {
    let z = beta * x * x;
    let a = gamma - 1.0;
    let (mut prev, mut cur) = (1.0, 1.0 + a - z);
    if n == 0 {
        cur = 1.0;
    }
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + a - z) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    let nf = n as f64;
    let ln_c =
        0.5 * (2f64.ln() + gamma * beta.ln() + libm::lgamma(nf + 1.0) - libm::lgamma(gamma + nf));
    let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
    sign * (ln_c + (gamma - 0.5) * x.ln() - 0.5 * z).exp() * cur
}

/// `∫ ψ_m x^{-α} ψ_n dx` after `x = e^t`, on equal panels.
pub fn quad_element(beta: f64, gamma: f64, alpha: f64, m: u32, n: u32) -> f64 {
    let top = 2.0 * (m.max(n) as f64) + gamma;
    let x_max = ((4.0 * top + 80.0) / beta).sqrt();
    let t_hi = x_max.ln();
    let t_lo = (1e-3f64.ln() - 0.5 * beta.ln()) - 45.0 / (2.0 * gamma - alpha);
    let f = |t: f64| {
        let x = t.exp();
        psi(beta, gamma, m, x) * psi(beta, gamma, n, x) * x.powf(1.0 - alpha)
    };
    let panels = 60;
    let w = (t_hi - t_lo) / panels as f64;
    (0..panels)
        .map(|k| {
            let a = t_lo + w * k as f64;
            quadrature::double_exponential::integrate(f, a, a + w, 1e-15).integral
        })
        .sum()
}
