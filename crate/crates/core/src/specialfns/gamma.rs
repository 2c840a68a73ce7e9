use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

// B_{2k} / (2k(2k−1)), k = 1..12.
const STIRLING: [f64; 12] = [
    0.083333333333333333,
    -0.0027777777777777778,
    0.00079365079365079365,
    -0.00059523809523809524,
    0.00084175084175084175,
    -0.0019175269175269175,
    0.0064102564102564103,
    -0.029550653594771242,
    0.17964437236883057,
    -1.3924322169059011,
    13.402864044168392,
    -156.84828462600202,
];

const SHIFT_RADIUS: f64 = 16.0;

/// log Γ(s).
///
/// On Re(s) ≥ 0 this is the analytic branch that is real on the positive axis.
/// Further left the reflection formula is used and the imaginary part is only
/// meaningful modulo 2π.
pub fn log_gamma(s: Complex64) -> Result<Complex64> {
    if s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round() {
        return Err(Error::Pole { what: "Gamma", at: s });
    }
    if s.re < 0.0 {
        let one = Complex64::new(1.0, 0.0);
        return Ok(PI.ln() - log_sin_pi(s) - log_gamma(one - s)?);
    }
    let mut z = s;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.norm() < SHIFT_RADIUS {
        shift += z.ln();
        z += 1.0;
    }
    Ok(stirling(z) - shift)
}

fn stirling(z: Complex64) -> Complex64 {
    let half_ln_2pi = 0.5 * (2.0 * PI).ln();
    let mut acc = (z - 0.5) * z.ln() - z + half_ln_2pi;
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut p = inv;
    for c in STIRLING {
        let term = p * c;
        acc += term;
        if term.norm() < 1e-17 * acc.norm() {
            break;
        }
        p *= inv2;
    }
    acc
}

/// log sin(πz) without overflow for large |Im z|.
pub fn log_sin_pi(z: Complex64) -> Complex64 {
    if z.im.abs() < 1.0 {
        return (z * PI).sin().ln();
    }
    if z.im < 0.0 {
        return log_sin_pi(z.conj()).conj();
    }
    // sin(πz) = e^{−iπz}(e^{2πiz} − 1)/(2i)
    let i = Complex64::i();
    let e = (i * 2.0 * PI * z).exp();
    -i * PI * z + (e - 1.0).ln() - 2f64.ln() - i * (PI / 2.0)
}
