//! Eisenstein series E_s(z): lattice sums, the Fourier–Bessel expansion,
//! constant terms, truncation and Maass–Selberg inner products.

use crate::specialfns::{bessel_k_scaled, log_gamma, riemann_zeta, scattering_c, PhaseBranch};
use crate::{Error, Result, TruncationHeight, UpperHalfPoint};
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

/// Truncated lattice sum with its estimated remaining error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectSum {
    pub value: Complex64,
    pub tail_estimate: f64,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// ½ Σ′ y^s/|cz+d|^{2s} over coprime (c,d) with |cz+d| ≤ bound.
///
/// The sum runs over a disk of the lattice Zz + Z, so it is exactly invariant
/// under z → z+1 and z → −1/z̄. The part outside the disk is replaced by its
/// mean-density integral; `tail_estimate` bounds what that leaves over.
pub fn eisenstein_direct_sum(z: UpperHalfPoint, s: Complex64, bound: u32) -> Result<DirectSum> {
    if s.re <= 1.0 {
        return Err(Error::Domain(format!("lattice sum needs Re(s) > 1, got {s}")));
    }
    let r = bound as f64;
    let r2 = r * r;
    let (x, y) = (z.x, z.y);
    let c_max = (r / y).floor() as i64;
    let ln_y = y.ln();
    let mut acc = Complex64::new(0.0, 0.0);
    for c in -c_max..=c_max {
        let cy = c as f64 * y;
        let room = r2 - cy * cy;
        if room < 0.0 {
            continue;
        }
        let centre = -(c as f64) * x;
        let half = room.sqrt();
        let d_lo = (centre - half).ceil() as i64;
        let d_hi = (centre + half).floor() as i64;
        for d in d_lo..=d_hi {
            if gcd(c, d) != 1 {
                continue;
            }
            let re = c as f64 * x + d as f64;
            let n2 = re * re + cy * cy;
            acc += (s * (ln_y - n2.ln())).exp();
        }
    }
    let sigma = s.re;
    let density = 6.0 / (PI * PI) * TAU / y;
    let tail = (s * ln_y + (2.0 - 2.0 * s) * r.ln()).exp() * density / (2.0 * s - 2.0);
    let value = acc * 0.5 + tail * 0.5;
    let tail_estimate = y.powf(sigma) * r.powf(1.0 - 2.0 * sigma) * (1.0 + r.ln()) * density;
    Ok(DirectSum { value, tail_estimate })
}

fn divisor_power_sum(n: u64, e: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            acc += (e * (d as f64).ln()).exp();
            let q = n / d;
            if q != d {
                acc += (e * (q as f64).ln()).exp();
            }
        }
        d += 1;
    }
    acc
}

/// Fourier–Bessel expansion of E_s at a fixed s:
/// E_s = y^s + c_s y^{1−s} + Σ_{n≠0} a_n(y) e(nx), with
/// a_n(y) = 2√y |n|^{s−½} σ_{1−2s}(|n|) K_{s−½}(2π|n|y) / ξ(2s).
#[derive(Debug, Clone)]
pub struct FourierExpansion {
    s: Complex64,
    c_s: Complex64,
    // 2 π^s / (Γ(s) ζ(2s)) with the e^{π|Im s|/2} of the scaled K-Bessel folded in
    pref: Complex64,
}

impl FourierExpansion {
    pub fn new(s: Complex64) -> Result<Self> {
        if s == Complex64::new(1.0, 0.0) {
            return Err(Error::Pole {
                what: "Eisenstein series",
                at: s,
            });
        }
        let c_s = scattering_c(s)?;
        let log_pref = s * PI.ln() - log_gamma(s)? - 0.5 * PI * s.im.abs();
        let pref = log_pref.exp() * 2.0 / riemann_zeta(s * 2.0)?;
        Ok(Self { s, c_s, pref })
    }

    pub fn s(&self) -> Complex64 {
        self.s
    }

    pub fn scattering(&self) -> Complex64 {
        self.c_s
    }

    pub fn constant_term(&self, y: f64) -> Complex64 {
        let ly = y.ln();
        (self.s * ly).exp() + self.c_s * ((1.0 - self.s) * ly).exp()
    }

    /// a_n(y) for n = 1, 2, … until the K-Bessel factor has decayed.
    pub fn modes(&self, y: f64) -> Vec<Complex64> {
        let nu = self.s - 0.5;
        let mu = nu.im.abs();
        let n_min = 10usize;
        let n_cap = 10 + ((mu + 60.0) / (TAU * y)).ceil() as usize;
        let e = 1.0 - 2.0 * self.s;
        let root_y = y.sqrt();
        let mut out = Vec::new();
        let mut scale = 0.0f64;
        for n in 1..=n_cap {
            let arg = TAU * n as f64 * y;
            let k = bessel_k_scaled(nu, arg);
            let nf = n as f64;
            let a = self.pref * root_y * (nu * nf.ln()).exp() * divisor_power_sum(n as u64, e) * k;
            scale = scale.max(a.norm());
            out.push(a);
            if n >= n_min && arg > mu + 5.0 && a.norm() <= 1e-18 * scale.max(1e-300) {
                break;
            }
            if n >= n_min && a.norm() == 0.0 {
                break;
            }
        }
        out
    }

    /// Non-constant part Σ_{n≠0} a_n(y) e(nx).
    pub fn nonconstant(&self, z: UpperHalfPoint) -> Complex64 {
        Self::sum_modes(&self.modes(z.y), z.x)
    }

    pub fn sum_modes(modes: &[Complex64], x: f64) -> Complex64 {
        modes
            .iter()
            .enumerate()
            .map(|(i, a)| a * (2.0 * (TAU * (i + 1) as f64 * x).cos()))
            .sum()
    }

    pub fn value(&self, z: UpperHalfPoint) -> Complex64 {
        self.constant_term(z.y) + self.nonconstant(z)
    }
}

/// E_s(z) by the Fourier–Bessel expansion.
pub fn eisenstein_value(z: UpperHalfPoint, s: Complex64) -> Result<Complex64> {
    Ok(FourierExpansion::new(s)?.value(z))
}

/// y^s + c_s y^{1−s}.
pub fn constant_term(s: Complex64, y: f64) -> Result<Complex64> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("height must be positive, got {y}")));
    }
    let ly = y.ln();
    Ok((s * ly).exp() + scattering_c(s)? * ((1.0 - s) * ly).exp())
}

/// ∧^a E_s(z) for z in the standard fundamental domain.
pub fn truncated_eisenstein(z: UpperHalfPoint, s: Complex64, a: TruncationHeight) -> Result<Complex64> {
    if !z.in_fundamental_domain() {
        return Err(Error::Domain(format!(
            "({}, {}) is outside the fundamental domain",
            z.x, z.y
        )));
    }
    let e = FourierExpansion::new(s)?;
    Ok(if z.y >= a.get() { e.nonconstant(z) } else { e.value(z) })
}

/// Hyperbolic Laplacian residual (−Δ − λ_s)E_s at z, Δ = y²(∂²_x + ∂²_y), 5-point stencil.
pub fn laplacian_residual(z: UpperHalfPoint, s: Complex64, h: f64) -> Result<Complex64> {
    let e = FourierExpansion::new(s)?;
    let at = |dx: f64, dy: f64| {
        e.value(UpperHalfPoint {
            x: z.x + dx,
            y: z.y + dy,
        })
    };
    let centre = at(0.0, 0.0);
    let lap = (at(h, 0.0) + at(-h, 0.0) + at(0.0, h) + at(0.0, -h) - centre * 4.0) / (h * h);
    Ok(-lap * (z.y * z.y) - s * (1.0 - s) * centre)
}

/// Four-term Maass–Selberg formula for ⟨∧^aE_s, ∧^aE_r⟩.
pub fn maass_selberg(s: Complex64, r: Complex64, a: TruncationHeight) -> Result<Complex64> {
    let rb = r.conj();
    let la = a.get().ln();
    let c_s = scattering_c(s)?;
    let c_rb = scattering_c(rb)?;
    let exps = [s + rb - 1.0, rb - s, s - rb, 1.0 - s - rb];
    if exps.iter().any(|e| e.norm() < 1e-12) {
        return Err(Error::Degenerate("Maass-Selberg relation; use maass_selberg_norm"));
    }
    let term = |e: Complex64| (e * la).exp() / e;
    Ok(term(exps[0]) + c_s * term(exps[1]) + c_rb * term(exps[2]) + c_s * c_rb * term(exps[3]))
}

/// ⟨∧^aE_s, ∧^aE_s⟩ on s = ½+it: 2 log a + 2ψ′(t) + sin(2(t log a + ψ(t)))/t.
/// At constant-term zeros the last term vanishes.
pub fn maass_selberg_norm(t: f64, a: TruncationHeight, branch: &PhaseBranch) -> Result<f64> {
    let la = a.get().ln();
    let psi = branch.psi(t)?;
    let dpsi = branch.psi_prime(t)?;
    Ok(2.0 * la + 2.0 * dpsi + (2.0 * (t * la + psi)).sin() / t)
}

/// x-average of ∧^aE_s at height y (the constant term of the truncation).
pub fn truncated_constant_term(s: Complex64, y: f64, a: TruncationHeight) -> Result<Complex64> {
    let e = FourierExpansion::new(s)?;
    let modes = e.modes(y);
    let n = 4 * modes.len().max(16);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let x = -0.5 + (k as f64 + 0.5) / n as f64;
        let mut v = FourierExpansion::sum_modes(&modes, x);
        if y < a.get() {
            v += e.constant_term(y);
        }
        acc += v;
    }
    Ok(acc / n as f64)
}

/// Coefficient C in (−Δ−λ_s)∧^aE_s = C·η_a, measured from the jump of ∂_y of
/// the x-averaged truncation across y = a, with one-sided second-order
/// differences of step h. The pairing is against the invariant measure
/// dx dy/y², so C = ∂_y(constant term)(a⁻) − ∂_y(constant term)(a⁺).
pub fn truncation_jump_coefficient(s: Complex64, a: TruncationHeight, h: f64) -> Result<Complex64> {
    let av = a.get();
    let below = |k: f64| truncated_constant_term(s, av - k * h, a);
    let above = |k: f64| truncated_constant_term(s, av + k * h, a);
    // value at a taken from the lower side, where the constant term is still present
    let c0 = constant_term(s, av)?;
    let d_minus = (c0 * 3.0 - below(1.0)? * 4.0 + below(2.0)?) / (2.0 * h);
    let c0_plus = above(0.0)?;
    let d_plus = (-c0_plus * 3.0 + above(1.0)? * 4.0 - above(2.0)?) / (2.0 * h);
    Ok(d_minus - d_plus)
}
