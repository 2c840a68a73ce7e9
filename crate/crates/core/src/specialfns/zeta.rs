use super::gamma::{log_gamma, log_sin_pi};
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

// B_{2k} / (2k)!, k = 1..30.
const EM: [f64; 30] = [
    0.083333333333333333,
    -0.0013888888888888889,
    3.3068783068783069e-5,
    -8.2671957671957672e-7,
    2.0876756987868099e-8,
    -5.2841901386874932e-10,
    1.3382536530684679e-11,
    -3.3896802963225829e-13,
    8.5860620562778446e-15,
    -2.1748686985580619e-16,
    5.5090028283602295e-18,
    -1.3954464685812523e-19,
    3.5347070396294675e-21,
    -8.9535174270375469e-23,
    2.2679524523376831e-24,
    -5.7447906688722024e-26,
    1.4551724756148649e-27,
    -3.6859949406653102e-29,
    9.3367342570950447e-31,
    -2.3650224157006299e-32,
    5.9906717624821343e-34,
    -1.5174548844682903e-35,
    3.8437581254541882e-37,
    -9.736353072646691e-39,
    2.466247044200681e-40,
    -6.2470767418207437e-42,
    1.5824030244644914e-43,
    -4.008273685948936e-45,
    1.0153075855569556e-46,
    -2.5718041582418717e-48,
];

/// Number of explicit terms for Euler–Maclaurin at imaginary part `im`.
pub(crate) fn em_cutoff(im: f64) -> usize {
    (0.4 * im.abs()).ceil().max(20.0) as usize + 4
}

/// Σ_{n≥0} (x0+n)^{−s} by Euler–Maclaurin, for x0 large compared with |s|/2π.
///
/// With `regularized` the leading term is (x0^{1−s} − 1)/(s−1), which stays
/// finite at s = 1.
pub(crate) fn em_tail(s: Complex64, x0: f64, regularized: bool) -> Complex64 {
    let lx = x0.ln();
    let p = (-s * lx).exp();
    let one_minus_s = 1.0 - s;
    let lead = if regularized {
        let z = one_minus_s * lx;
        -lx * expm1_over(z)
    } else {
        p * x0 / (s - 1.0)
    };
    let mut acc = lead + p * 0.5;
    let mut poch = s;
    let inv2 = 1.0 / (x0 * x0);
    let mut xp = p / x0;
    let mut prev = f64::INFINITY;
    for (k, c) in EM.iter().enumerate() {
        let term = poch * xp * *c;
        let size = term.norm();
        if size > prev {
            break;
        }
        acc += term;
        if size < 1e-17 * acc.norm() {
            break;
        }
        prev = size;
        let k2 = 2.0 * (k as f64 + 1.0);
        poch *= (s + (k2 - 1.0)) * (s + k2);
        xp *= inv2;
    }
    acc
}

// (e^z − 1)/z
fn expm1_over(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0))
    } else {
        (z.exp() - 1.0) / z
    }
}

/// Riemann ζ(s): Euler–Maclaurin for Re(s) ≥ −1, the functional equation further left.
pub fn riemann_zeta(s: Complex64) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole { what: "zeta", at: s });
    }
    if s.re < -1.0 {
        let one_minus_s = 1.0 - s;
        let log_factor = s * 2f64.ln() + (s - 1.0) * PI.ln() + log_gamma(one_minus_s)? + log_sin_pi(s * 0.5);
        return Ok(log_factor.exp() * riemann_zeta(one_minus_s)?);
    }
    let n = em_cutoff(s.im);
    let mut head = Complex64::new(0.0, 0.0);
    for k in 1..n {
        head += (-s * (k as f64).ln()).exp();
    }
    Ok(head + em_tail(s, n as f64, false))
}

/// ξ(s) = π^{−s/2} Γ(s/2) ζ(s), without the s(s−1)/2 factor.
pub fn xi_completed(s: Complex64) -> Result<Complex64> {
    if s.norm() == 0.0 || s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole { what: "xi", at: s });
    }
    // Trivial zeros of ζ cancel poles of Γ(s/2); evaluate through the reflection there.
    let half = s * 0.5;
    if s.re < 0.0 && (half.re - half.re.round()).abs() < 1e-6 && half.im.abs() < 1e-6 {
        return xi_completed(1.0 - s);
    }
    let log_pre = -half * PI.ln() + log_gamma(half)?;
    Ok(log_pre.exp() * riemann_zeta(s)?)
}

/// Scattering coefficient c_s = √π Γ(s−½) ζ(2s−1) / (Γ(s) ζ(2s)).
pub fn scattering_c(s: Complex64) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole { what: "c_s", at: s });
    }
    if (s - 0.5).norm() < 1e-13 {
        return Ok(Complex64::new(-1.0, 0.0));
    }
    let two_s = s * 2.0;
    let ratio = (log_gamma(s - 0.5)? - log_gamma(s)?).exp();
    Ok(ratio * PI.sqrt() * riemann_zeta(two_s - 1.0)? / riemann_zeta(two_s)?)
}

/// Scattering coefficient through the completed zeta, ξ(2−2s)/ξ(2s).
pub fn scattering_c_xi(s: Complex64) -> Result<Complex64> {
    Ok(xi_completed(2.0 - s * 2.0)? / xi_completed(s * 2.0)?)
}

/// Riemann–Siegel phase θ(t) = Im log Γ(1/4 + it/2) − (t/2) log π.
pub fn riemann_siegel_theta(t: f64) -> Result<f64> {
    Ok(log_gamma(Complex64::new(0.25, 0.5 * t))?.im - 0.5 * t * PI.ln())
}
