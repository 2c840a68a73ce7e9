use super::quadrature::{line_integral, LineIntegrand, MeanModel};
use super::{PairingResult, QuadratureSpec, ThetaSampler};
use crate::heegner::{theta_coefficient, theta_one};
use crate::specialfns::scattering_c;
use crate::{lambda, Error, Result, ThetaCombination, TruncationHeight, UpperHalfPoint, LAMBDA_ONE, VOLUME};
use num_complex::Complex64;

type Coefficient<'a> = &'a (dyn Fn(f64) -> Result<Complex64> + Sync);

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_raw(w: Complex64, q: &QuadratureSpec) -> Result<()> {
    if (w.re - 0.5).abs() <= q.delta {
        return Err(Error::NearLine(w));
    }
    if w.re < 0.5 {
        return Err(Error::Domain(format!("raw pairing needs Re(w) > 1/2, got {w}")));
    }
    if w.im == 0.0 && w.re <= 1.0 {
        return Err(Error::Domain(format!("w = {w} lies on (1/2, 1]")));
    }
    Ok(())
}

fn pole_at_half(w: Complex64) -> Result<()> {
    if (2.0 * w - 1.0).norm() < 1e-14 {
        return Err(Error::Pole {
            what: "1/(2w-1)",
            at: w,
        });
    }
    Ok(())
}

/// η_aE_s = a^s + c_s a^{1−s}.
pub fn constant_term_coefficient(s: Complex64, a: f64) -> Result<Complex64> {
    let la = a.ln();
    Ok((s * la).exp() + scattering_c(s)? * ((1.0 - s) * la).exp())
}

fn constant_term_on_line(t: f64, a: f64) -> Result<Complex64> {
    constant_term_coefficient(cx(0.5, t), a)
}

/// (1/4πi)∫_{(½)} A(s)B(s) ds/(λ_s − λ_w) + const/(λ_1 − λ_w), with A, B given
/// as functions of t on s = ½ + it.
pub fn kernel_pairing(
    coef_a: Coefficient<'_>,
    coef_b: Coefficient<'_>,
    const_term: Complex64,
    w: Complex64,
    q: &QuadratureSpec,
) -> Result<PairingResult> {
    pairing_with_model(coef_a, coef_b, const_term, w, q, MeanModel::Constant)
}

fn pairing_with_model(
    coef_a: Coefficient<'_>,
    coef_b: Coefficient<'_>,
    const_term: Complex64,
    w: Complex64,
    q: &QuadratureSpec,
    mean: MeanModel,
) -> Result<PairingResult> {
    check_raw(w, q)?;
    let numerator = |t: f64| Ok(coef_a(t)? * coef_b(t)?);
    let mut r = line_integral(
        q,
        &LineIntegrand {
            b: w - 0.5,
            numerator: &numerator,
            excise: None,
            mean,
        },
    )?;
    r.value += const_term / (LAMBDA_ONE - lambda(w));
    Ok(r)
}

/// η_a(v_{w,a}) = a^{1−w}(a^w + c_w a^{1−w})/(2w−1).
pub fn eta_v_closed(w: Complex64, a: TruncationHeight) -> Result<Complex64> {
    pole_at_half(w)?;
    let la = a.get().ln();
    Ok(((1.0 - w) * la).exp() * constant_term_coefficient(w, a.get())? / (2.0 * w - 1.0))
}

/// a^{1−w}y^w − a^w y^{1−w}, the contribution of a point at height y > a.
pub fn rd_term(w: Complex64, a: f64, y: f64) -> Complex64 {
    let (la, ly) = (a.ln(), y.ln());
    ((1.0 - w) * la + w * ly).exp() - (w * la + (1.0 - w) * ly).exp()
}

/// 2√(ay)·sinh((w−½)·log⁺(y/a)); equal to [`rd_term`] for y > a and zero otherwise.
pub fn rd_term_sinh(w: Complex64, a: f64, y: f64) -> Complex64 {
    let lp = (y / a).ln().max(0.0);
    ((w - 0.5) * lp).sinh() * (2.0 * (a * y).sqrt())
}

/// R_w(θ, a) = Σ ν (a^{1−w}y^w − a^w y^{1−w}) over Heegner points with y > a.
pub fn rd_correction(theta: &ThetaCombination, w: Complex64, a: TruncationHeight) -> Result<Complex64> {
    let av = a.get();
    let mut acc = cx(0.0, 0.0);
    for (p, nu) in theta.weighted_points() {
        if (p.y - av).abs() <= 1e-12 * av {
            return Err(Error::HeightCollision(p.y));
        }
        if p.y > av {
            acc += rd_term(w, av, p.y) * nu;
        }
    }
    Ok(acc)
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// ½ Σ over coprime (m, n) with |mz+n|² < y/a of
/// a^{1−w}y^w/|mz+n|^{2w} − a^w y^{1−w}/|mz+n|^{2−2w},
/// so that δ_z(v_{w,a}) = (a^{1−w}E_w(z) − correction)/(2w−1) for any z.
pub fn heegner_correction_general(z: UpperHalfPoint, w: Complex64, a: TruncationHeight) -> Result<Complex64> {
    let (av, y) = (a.get(), z.y);
    let bound = y / av;
    let m_max = (1.0 / (av * y)).sqrt().floor() as i64;
    let mut acc = cx(0.0, 0.0);
    for m in -m_max..=m_max {
        let mf = m as f64;
        let rem = bound - mf * mf * y * y;
        if rem <= 0.0 {
            continue;
        }
        let r = rem.sqrt();
        let n_lo = (-mf * z.x - r).floor() as i64;
        let n_hi = (-mf * z.x + r).ceil() as i64;
        for n in n_lo..=n_hi {
            if gcd(m, n) != 1 {
                continue;
            }
            let q = (mf * z.x + n as f64).powi(2) + mf * mf * y * y;
            if (q - bound).abs() <= 1e-12 * bound {
                return Err(Error::HeightCollision(y));
            }
            if q < bound {
                let (la, ly, lq) = (av.ln(), y.ln(), q.ln());
                let t1 = ((1.0 - w) * la + w * ly - w * lq).exp();
                let t2 = (w * la + (1.0 - w) * ly - (1.0 - w) * lq).exp();
                acc += (t1 - t2) * 0.5;
            }
        }
    }
    Ok(acc)
}

/// θ(v_{w,a}) = (a^{1−w}θE_w − R_w(θ,a))/(2w−1).
pub fn theta_v_closed(theta: &ThetaCombination, w: Complex64, a: TruncationHeight) -> Result<Complex64> {
    pole_at_half(w)?;
    let r = rd_correction(theta, w, a)?;
    let te = theta_coefficient(theta, w)?;
    Ok((((1.0 - w) * a.get().ln()).exp() * te - r) / (2.0 * w - 1.0))
}

/// Quadrature route of η_a(v_{w,a}).
pub fn eta_v(w: Complex64, a: TruncationHeight, q: &QuadratureSpec) -> Result<PairingResult> {
    let av = a.get();
    let b = |t: f64| constant_term_on_line(t, av);
    let c = |t: f64| Ok(constant_term_on_line(t, av)?.conj());
    kernel_pairing(&c, &b, cx(1.0 / VOLUME, 0.0), w, q)
}

/// Which formula produced an (F, G) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum FgRoute {
    /// Direct integral of |θE_s|², Re(w) > ½ + δ; uses θE_w².
    Raw,
    /// Subtracted integrand (θE_sθE_{1−s} − θE_wθE_{1−w}); uses θE_wθE_{1−w}.
    Subtracted,
}

/// F(a, w) and G(w, a) = F/(a^w + c_w a^{1−w}).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FgValue {
    pub f: Complex64,
    pub g: Complex64,
    pub route: FgRoute,
    pub tail_estimate: f64,
}

impl ThetaSampler {
    fn theta_const(&self) -> f64 {
        theta_one(self.theta())
    }

    /// θ(u_{θ,w}) = |θ(1)|²/(⟨1,1⟩(λ_1−λ_w)) + (1/4πi)∫|θE_s|² ds/(λ_s−λ_w).
    pub fn theta_u(&self, w: Complex64, q: &QuadratureSpec) -> Result<PairingResult> {
        let h = self.theta_const();
        let a = |t: f64| self.line_value(-t);
        let b = |t: f64| self.line_value(t);
        pairing_with_model(&a, &b, cx(h * h / VOLUME, 0.0), w, q, MeanModel::LogLinear)
    }

    /// a^s + c_s a^{1−s} at s = ½ + it from the cached c.
    fn eta_line(&self, t: f64, a: f64) -> Result<Complex64> {
        let s = cx(0.5, t);
        let la = a.ln();
        Ok((s * la).exp() + self.line_scattering(t)? * ((1.0 - s) * la).exp())
    }

    /// η_a(v_{w,a}) by quadrature, with c from the sample table.
    pub fn eta_v(&self, w: Complex64, a: TruncationHeight, q: &QuadratureSpec) -> Result<PairingResult> {
        let av = a.get();
        let b = |t: f64| self.eta_line(t, av);
        let c = |t: f64| Ok(self.eta_line(t, av)?.conj());
        kernel_pairing(&c, &b, cx(1.0 / VOLUME, 0.0), w, q)
    }

    /// η_a(u_{θ,w}) by quadrature.
    pub fn eta_u(&self, w: Complex64, a: TruncationHeight, q: &QuadratureSpec) -> Result<PairingResult> {
        let av = a.get();
        let th = |t: f64| self.line_value(-t);
        let et = |t: f64| self.eta_line(t, av);
        kernel_pairing(&th, &et, cx(self.theta_const() / VOLUME, 0.0), w, q)
    }

    /// θ(v_{w,a}) by quadrature.
    pub fn theta_v(&self, w: Complex64, a: TruncationHeight, q: &QuadratureSpec) -> Result<PairingResult> {
        let av = a.get();
        let et = |t: f64| Ok(self.eta_line(t, av)?.conj());
        let th = |t: f64| self.line_value(t);
        kernel_pairing(&et, &th, cx(self.theta_const() / VOLUME, 0.0), w, q)
    }

    /// θE_w · θE_{1−w}, both evaluated independently.
    fn product_at(&self, w: Complex64) -> Result<Complex64> {
        Ok(theta_coefficient(self.theta(), w)? * theta_coefficient(self.theta(), 1.0 - w)?)
    }

    /// |θ(1)|²/(⟨1,1⟩(λ_1−λ_w)) + (1/4πi)∫(θE_sθE_{1−s} − θE_wθE_{1−w}) ds/(λ_s−λ_w).
    fn subtracted(&self, w: Complex64, q: &QuadratureSpec) -> Result<(Complex64, Complex64, PairingResult)> {
        let g_w = self.product_at(w)?;
        let numerator = |t: f64| Ok(self.line_value(t)? * self.line_value(-t)? - g_w);
        let mut r = line_integral(
            q,
            &LineIntegrand {
                b: w - 0.5,
                numerator: &numerator,
                excise: Some(w.im.abs()),
                mean: MeanModel::LogLinear,
            },
        )?;
        let h = self.theta_const();
        r.value += h * h / (VOLUME * (LAMBDA_ONE - lambda(w)));
        Ok((r.value, g_w, r))
    }

    /// J_{θ,w} at w = ½ + iτ; real up to a checked imaginary residue below 1e−8.
    pub fn j_online(&self, tau: f64, q: &QuadratureSpec) -> Result<f64> {
        if !(tau > 0.0) {
            return Err(Error::Domain(format!("tau must be positive, got {tau}")));
        }
        let (j, _, _) = self.subtracted(cx(0.5, tau), q)?;
        if j.im.abs() >= 1e-8 {
            return Err(Error::Realness(j.im));
        }
        Ok(j.re)
    }

    /// Limit of θ(u_{θ,w}) as w → ½ + iτ from the right: Richardson
    /// extrapolation of raw quadratures at Re(w) − ½ ∈ {4, 2, 1}·10⁻³.
    pub fn theta_u_line_limit(&self, tau: f64, q: &QuadratureSpec) -> Result<Complex64> {
        let mut f = [cx(0.0, 0.0); 3];
        for (k, eps) in [1e-3, 2e-3, 4e-3].into_iter().enumerate() {
            f[k] = self.theta_u(cx(0.5 + eps, tau), &q.with_delta(0.5 * eps))?.value;
        }
        Ok((f[0] * 8.0 - f[1] * 6.0 + f[2]) / 3.0)
    }

    /// F and G, by the raw integral when Re(w) > ½ + δ and by the subtracted form otherwise.
    pub fn determinant_fg(&self, a: TruncationHeight, w: Complex64, q: &QuadratureSpec) -> Result<FgValue> {
        let route = if w.re - 0.5 > q.delta {
            FgRoute::Raw
        } else {
            FgRoute::Subtracted
        };
        self.determinant_fg_route(a, w, q, route)
    }

    pub fn determinant_fg_route(
        &self,
        a: TruncationHeight,
        w: Complex64,
        q: &QuadratureSpec,
        route: FgRoute,
    ) -> Result<FgValue> {
        let av = a.get();
        if self.theta().max_height() >= av {
            return Err(Error::Domain(format!(
                "truncation height {av} is not above all Heegner points"
            )));
        }
        pole_at_half(w)?;
        let la = av.ln();
        let aw = (w * la).exp();
        let ca = scattering_c(w)? * ((1.0 - w) * la).exp();
        let denom = aw + ca;
        if denom.norm() <= 1e-13 * (aw.norm() + ca.norm()) {
            return Err(Error::Pole {
                what: "G (constant-term zero)",
                at: w,
            });
        }
        match route {
            FgRoute::Raw => {
                let tu = self.theta_u(w, q)?;
                let te = theta_coefficient(self.theta(), w)?;
                let f = denom * tu.value - ((1.0 - w) * la).exp() * te * te / (2.0 * w - 1.0);
                Ok(FgValue {
                    f,
                    g: f / denom,
                    route,
                    tail_estimate: tu.tail_estimate,
                })
            }
            FgRoute::Subtracted => {
                let (head, g_w, r) = self.subtracted(w, q)?;
                let g = head + (aw - ca) / denom * g_w / (2.0 * (2.0 * w - 1.0));
                Ok(FgValue {
                    f: g * denom,
                    g,
                    route,
                    tail_estimate: r.tail_estimate,
                })
            }
        }
    }

    /// Slope of log ∫_{τ−ε}^{τ+ε}|θE| against log ε over ε, 2ε, 4ε: about 1
    /// at generic τ and about 2 at a simple zero of θE.
    pub fn local_l1_exponent(&self, tau: f64, eps: f64) -> Result<f64> {
        if !(eps > 0.0 && tau - 4.0 * eps > 0.0) {
            return Err(Error::Domain(format!("need 0 < 4ε < τ, got τ = {tau}, ε = {eps}")));
        }
        let mass = |e: f64| -> Result<f64> {
            let panels = 32;
            let h = 2.0 * e / panels as f64;
            let mut acc = 0.0;
            for k in 0..panels {
                let lo = tau - e + k as f64 * h;
                for &(x, wgt) in super::quadrature::rule() {
                    acc += self.line_value(lo + 0.5 * h * (x + 1.0))?.norm() * wgt * 0.5 * h;
                }
            }
            Ok(acc)
        };
        let pts: Vec<(f64, f64)> = [eps, 2.0 * eps, 4.0 * eps]
            .iter()
            .map(|&e| Ok((e.ln(), mass(e)?.ln())))
            .collect::<Result<_>>()?;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / 3.0;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / 3.0;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Ok(sxy / sxx)
    }
}

/// Threshold on [`ThetaSampler::local_l1_exponent`] separating zeros of θE from generic points.
pub const L1_ZERO_EXPONENT: f64 = 1.5;

/// θ(u_{θ,w}) by quadrature.
pub fn theta_u(theta: &ThetaCombination, w: Complex64, q: &QuadratureSpec) -> Result<PairingResult> {
    ThetaSampler::new(theta.clone()).theta_u(w, q)
}

/// J_{θ,w} on the critical line w = ½ + iτ.
pub fn j_online(theta: &ThetaCombination, tau: f64, q: &QuadratureSpec) -> Result<f64> {
    ThetaSampler::new(theta.clone()).j_online(tau, q)
}

/// (F(a, w), G(w, a)).
pub fn determinant_fg(
    theta: &ThetaCombination,
    a: TruncationHeight,
    w: Complex64,
    q: &QuadratureSpec,
) -> Result<(Complex64, Complex64)> {
    let v = ThetaSampler::new(theta.clone()).determinant_fg(a, w, q)?;
    Ok((v.f, v.g))
}
