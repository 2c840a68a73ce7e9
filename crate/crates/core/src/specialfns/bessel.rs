use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

/// e^{π|Im ν|/2} K_ν(x) for complex order ν and x > 0.
///
/// Uses K_ν(x) = ½∫ exp(−x cosh u + νu) du on the line Im u = β, with β
/// placed at the saddle of the exponent (clamped away from ±π/2), and the
/// trapezoid rule halved until it settles.
pub fn bessel_k_scaled(nu: Complex64, x: f64) -> Complex64 {
    let (sigma, mu) = (nu.re, nu.im);
    let margin = if mu.abs() > 1.0 { 1.0 / mu.abs() } else { 0.25 };
    let limit = FRAC_PI_2 - margin;
    let beta = (nu / x).asinh().im.clamp(-limit, limit);
    let (sb, cb) = beta.sin_cos();
    let shift = FRAC_PI_2 * mu.abs() - mu * beta;

    let log_mag = |u: f64| -x * u.cosh() * cb + sigma * u + shift;
    let u_peak = (sigma / (x * cb)).asinh();
    let peak = log_mag(u_peak);
    if peak < -745.0 {
        return Complex64::new(0.0, 0.0);
    }
    let mut hi = u_peak + 0.25;
    while log_mag(hi) > peak - 42.0 {
        hi += 0.25;
    }
    let mut lo = u_peak - 0.25;
    while log_mag(lo) > peak - 42.0 {
        lo -= 0.25;
    }
    let f = |u: f64| {
        let re = log_mag(u) - peak;
        let im = -x * u.sinh() * sb + mu * u + sigma * beta;
        let (s, c) = im.sin_cos();
        Complex64::new(c, s) * re.exp()
    };

    let gap = FRAC_PI_2 - beta.abs();
    let mut h = (gap / 4.0).min(0.25);
    let mut n = ((hi - lo) / h).ceil() as usize;
    h = (hi - lo) / n as f64;
    let mut sum: Complex64 = (0..=n).map(|k| f(lo + k as f64 * h)).sum();
    let mut estimate = sum * h;
    for _ in 0..14 {
        let mids: Complex64 = (0..n).map(|k| f(lo + (k as f64 + 0.5) * h)).sum();
        sum += mids;
        n *= 2;
        h *= 0.5;
        let next = sum * h;
        let settled = (next - estimate).norm() <= 1e-15 * (hi - lo);
        estimate = next;
        if settled {
            break;
        }
    }
    estimate * 0.5 * peak.exp()
}

/// K_ν(x) for complex order ν and x > 0.
pub fn bessel_k(nu: Complex64, x: f64) -> Complex64 {
    bessel_k_scaled(nu, x) * (-FRAC_PI_2 * nu.im.abs()).exp()
}

/// K_{iμ}(y), real for real μ and y > 0. Values below 1e−300 are returned as 0.
pub fn bessel_k_imag(mu: f64, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("K-Bessel argument must be positive, got {y}")));
    }
    let v = bessel_k(Complex64::new(0.0, mu), y).re;
    Ok(if v.abs() < 1e-300 { 0.0 } else { v })
}
