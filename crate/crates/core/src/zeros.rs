//! Zero isolation on the critical line.
//!
//! Every search reduces to a real function of t: the phase condition
//! cos(t log a + ψ(t)) for constant-term zeros, the rotated coefficients
//! Z_θ = e^{iψ}θE and Hardy's Z = e^{iθ_R}ζ, the subtracted integral J, and the
//! eigenvalue condition C(τ). Sign changes on a grid of step π/(4 log t) are
//! bisected to a bracket below [`BRACKET_TOL`].

use crate::heegner::theta_coefficient;
use crate::specialfns::{riemann_siegel_theta, riemann_zeta, PhaseBranch};
use crate::spectral::{QuadratureSpec, ThetaSampler};
use crate::{Error, Result, ThetaCombination, TruncationHeight};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

pub const BRACKET_TOL: f64 = 1e-11;
pub const REALNESS_TOL: f64 = 1e-7;
/// Below this ordinate ψ′ may be negative and the phase is scanned densely.
pub const MONOTONE_FROM: f64 = 10.0;
const DENSE_STEP: f64 = 0.01;
/// Step and number of steps of the truncation-height adjustment.
pub const ADJUST_STEP: f64 = 1e-4;
pub const ADJUST_STEPS: usize = 10;
pub const ADJUST_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroKind {
    ConstantTerm,
    ThetaE,
    Zeta,
    JFn,
    Eigenvalue,
}

impl ZeroKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ZeroKind::ConstantTerm => "constant_term",
            ZeroKind::ThetaE => "theta_e",
            ZeroKind::Zeta => "zeta",
            ZeroKind::JFn => "j_fn",
            ZeroKind::Eigenvalue => "eigenvalue",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub kind: ZeroKind,
    pub t: f64,
    pub a: Option<f64>,
    /// |defining function| at t.
    pub residual: f64,
    pub bracket: (f64, f64),
    /// Derivative of the defining function at t, where it is recorded.
    pub slope: Option<f64>,
}

/// Grid step π/(4 log t), with log t floored at 1.
pub fn grid_step(t: f64) -> f64 {
    PI / (4.0 * t.ln().max(1.0))
}

/// Scan points on [lo, hi] with step [`grid_step`]/refine.
pub fn line_grid(lo: f64, hi: f64, refine: usize) -> Vec<f64> {
    let mut pts = vec![lo];
    let mut t = lo;
    while t < hi {
        t = (t + grid_step(t) / refine.max(1) as f64).min(hi);
        pts.push(t);
    }
    pts
}

/// Bisects f on [lo, hi] with f(lo)·f(hi) ≤ 0 until the bracket is below [`BRACKET_TOL`].
fn bisect(f: &dyn Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, mut flo: f64) -> Result<(f64, f64)> {
    while hi - lo > BRACKET_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok((mid, mid));
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Sign changes of f between consecutive points of `pts`, each bisected to a bracket.
pub fn isolate_sign_changes(f: &(dyn Fn(f64) -> Result<f64> + Sync), pts: &[f64]) -> Result<Vec<(f64, f64)>> {
    let vals: Vec<f64> = pts.par_iter().map(|&t| f(t)).collect::<Result<_>>()?;
    let mut brackets = Vec::new();
    for i in 0..pts.len() - 1 {
        if vals[i] == 0.0 {
            brackets.push((pts[i], pts[i], vals[i]));
        } else if vals[i] * vals[i + 1] < 0.0 {
            brackets.push((pts[i], pts[i + 1], vals[i]));
        }
    }
    if let Some(&last) = vals.last() {
        if last == 0.0 {
            let t = pts[pts.len() - 1];
            brackets.push((t, t, 0.0));
        }
    }
    brackets
        .into_par_iter()
        .map(|(lo, hi, flo)| if lo == hi { Ok((lo, hi)) } else { bisect(f, lo, hi, flo) })
        .collect()
}

fn check_window(lo: f64, hi: f64) -> Result<()> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Domain(format!("need 0 < t_lo < t_hi, got [{lo}, {hi}]")));
    }
    Ok(())
}

/// φ(t) = t log a + ψ(t).
pub fn constant_term_phase(t: f64, a: TruncationHeight, branch: &PhaseBranch) -> Result<f64> {
    Ok(t * a.get().ln() + branch.psi(t)?)
}

/// Index k with φ(t) in [(k+½)π, (k+3/2)π).
fn half_period_index(phi: f64) -> i64 {
    ((phi - 0.5 * PI) / PI).floor() as i64
}

/// Solutions of cos(t log a + ψ(t)) = 0 in [t_lo, t_hi].
pub fn constant_term_zeros(a: TruncationHeight, t_lo: f64, t_hi: f64, branch: &PhaseBranch) -> Result<Vec<ZeroRecord>> {
    check_window(t_lo, t_hi)?;
    if t_hi > branch.t_max() + 1e-9 {
        return Err(Error::BranchCoverage {
            t: t_hi,
            t_max: branch.t_max(),
        });
    }
    let la = a.get().ln();
    let phi = |t: f64| constant_term_phase(t, a, branch);
    let mut pts = Vec::new();
    let mut t = t_lo;
    pts.push(t);
    while t < t_hi {
        let h = if t < MONOTONE_FROM { DENSE_STEP } else { grid_step(t) };
        t = (t + h).min(t_hi);
        pts.push(t);
    }
    let vals: Vec<f64> = pts.par_iter().map(|&t| phi(t)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for i in 0..pts.len() - 1 {
        let (k0, k1) = (half_period_index(vals[i]), half_period_index(vals[i + 1]));
        if vals[i + 1] < vals[i] && pts[i] >= MONOTONE_FROM {
            log::warn!("phase not increasing on [{}, {}]", pts[i], pts[i + 1]);
        }
        if k0 == k1 {
            continue;
        }
        if (k1 - k0).abs() > 1 {
            return Err(Error::Domain(format!(
                "phase jumps {} half periods on [{}, {}]",
                k1 - k0,
                pts[i],
                pts[i + 1]
            )));
        }
        let target = (k0.max(k1) as f64 + 0.5) * PI;
        let g = |t: f64| Ok(phi(t)? - target);
        let (lo, hi) = bisect(&g, pts[i], pts[i + 1], vals[i] - target)?;
        let mut t = 0.5 * (lo + hi);
        let slope = la + branch.psi_prime(t)?;
        let polished = t - g(t)? / slope;
        if polished >= lo - BRACKET_TOL && polished <= hi + BRACKET_TOL {
            t = polished;
        }
        out.push(ZeroRecord {
            kind: ZeroKind::ConstantTerm,
            t,
            a: Some(a.get()),
            residual: phi(t)?.cos().abs(),
            bracket: (lo.min(t), hi.max(t)),
            slope: Some(slope),
        });
    }
    Ok(out)
}

/// Z_θ(t) = e^{iψ(t)}θE_{½+it}, returned whole so that callers can check realness.
pub fn rotated_theta(theta: &ThetaCombination, t: f64, branch: &PhaseBranch) -> Result<Complex64> {
    let psi = branch.psi(t)?;
    Ok(Complex64::from_polar(1.0, psi) * theta_coefficient(theta, Complex64::new(0.5, t))?)
}

/// Re Z_θ(t), failing when |Im Z_θ| ≥ [`REALNESS_TOL`].
pub fn z_theta(theta: &ThetaCombination, t: f64, branch: &PhaseBranch) -> Result<f64> {
    let z = rotated_theta(theta, t, branch)?;
    if z.im.abs() >= REALNESS_TOL {
        return Err(Error::Realness(z.im));
    }
    Ok(z.re)
}

/// Zeros of θE on the line, via sign changes of Z_θ.
pub fn theta_line_zeros(
    theta: &ThetaCombination,
    t_lo: f64,
    t_hi: f64,
    branch: &PhaseBranch,
) -> Result<Vec<ZeroRecord>> {
    check_window(t_lo, t_hi)?;
    let f = |t: f64| z_theta(theta, t, branch);
    let roots = isolate_sign_changes(&f, &line_grid(t_lo, t_hi, 1))?;
    roots
        .into_iter()
        .map(|(lo, hi)| {
            let t = 0.5 * (lo + hi);
            Ok(ZeroRecord {
                kind: ZeroKind::ThetaE,
                t,
                a: None,
                residual: f(t)?.abs(),
                bracket: (lo, hi),
                slope: None,
            })
        })
        .collect()
}

/// Hardy's Z(t) = e^{iθ_R(t)}ζ(½+it).
pub fn hardy_z(t: f64) -> Result<f64> {
    let z = Complex64::from_polar(1.0, riemann_siegel_theta(t)?) * riemann_zeta(Complex64::new(0.5, t))?;
    if z.im.abs() >= REALNESS_TOL * (1.0 + z.re.abs()) {
        return Err(Error::Realness(z.im));
    }
    Ok(z.re)
}

/// Zeros of ζ on the line up to t = 200 via sign changes of Hardy's Z.
pub fn zeta_zeros(t_lo: f64, t_hi: f64) -> Result<Vec<ZeroRecord>> {
    check_window(t_lo, t_hi)?;
    if t_hi > 200.0 {
        return Err(Error::Domain(format!(
            "zeta zeros are supported up to t = 200, got {t_hi}"
        )));
    }
    let roots = isolate_sign_changes(&hardy_z, &line_grid(t_lo, t_hi, 1))?;
    let mut out = Vec::with_capacity(roots.len());
    for (lo, hi) in roots {
        let t = 0.5 * (lo + hi);
        if let Some(prev) = out.last().map(|r: &ZeroRecord| r.t) {
            if t - prev < 2.0 * grid_step(t) {
                log::warn!("zeta zeros at {prev} and {t} are closer than two grid steps");
            }
        }
        out.push(ZeroRecord {
            kind: ZeroKind::Zeta,
            t,
            a: None,
            residual: hardy_z(t)?.abs(),
            bracket: (lo, hi),
            slope: None,
        });
    }
    Ok(out)
}

/// Zeros of J_{θ,½+iτ}, each with the central-difference slope of J.
pub fn j_zeros(sampler: &ThetaSampler, t_lo: f64, t_hi: f64, q: &QuadratureSpec) -> Result<Vec<ZeroRecord>> {
    check_window(t_lo, t_hi)?;
    let f = |t: f64| sampler.j_online(t, q);
    let roots = isolate_sign_changes(&f, &line_grid(t_lo, t_hi, 1))?;
    let h = 1e-3;
    roots
        .into_iter()
        .map(|(lo, hi)| {
            let t = 0.5 * (lo + hi);
            let slope = (f(t + h)? - f(t - h)?) / (2.0 * h);
            Ok(ZeroRecord {
                kind: ZeroKind::JFn,
                t,
                a: None,
                residual: f(t)?.abs(),
                bracket: (lo, hi),
                slope: Some(slope),
            })
        })
        .collect()
}

/// Pieces of the eigenvalue condition at one ordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionTerms {
    pub phi: f64,
    pub j: f64,
    /// |θE_{½+iτ}|² = θE_{1−w}θE_w on the line.
    pub norm_sq: f64,
}

impl ConditionTerms {
    /// C(τ) = cos φ·J + sin φ·|θE|²/(4τ).
    pub fn value(&self, tau: f64) -> f64 {
        self.phi.cos() * self.j + self.phi.sin() * self.norm_sq / (4.0 * tau)
    }

    /// R(τ) = −4τJ/|θE|², so that the roots of C solve tan φ = R.
    pub fn r(&self, tau: f64) -> f64 {
        -4.0 * tau * self.j / self.norm_sq
    }
}

pub fn condition_terms(
    sampler: &ThetaSampler,
    a: TruncationHeight,
    tau: f64,
    q: &QuadratureSpec,
    branch: &PhaseBranch,
) -> Result<ConditionTerms> {
    let phi = constant_term_phase(tau, a, branch)?;
    let j = sampler.j_online(tau, q)?;
    let norm_sq = sampler.line_value(tau)?.norm_sqr();
    Ok(ConditionTerms { phi, j, norm_sq })
}

/// Sub-samples per constant-term interval used to count sign changes of C.
pub const INTERVAL_SAMPLES: usize = 8;

/// All roots of C in the open interval (lo, hi), one per sign change over
/// [`INTERVAL_SAMPLES`] equal steps.
pub fn eigenvalue_roots_between(
    sampler: &ThetaSampler,
    a: TruncationHeight,
    lo: f64,
    hi: f64,
    q: &QuadratureSpec,
    branch: &PhaseBranch,
) -> Result<Vec<ZeroRecord>> {
    let c = |t: f64| Ok(condition_terms(sampler, a, t, q, branch)?.value(t));
    let pts: Vec<f64> = (0..=INTERVAL_SAMPLES)
        .map(|k| lo + (hi - lo) * k as f64 / INTERVAL_SAMPLES as f64)
        .collect();
    let vals: Vec<f64> = pts.iter().map(|&t| c(t)).collect::<Result<_>>()?;
    (0..INTERVAL_SAMPLES)
        .filter(|&i| vals[i] * vals[i + 1] < 0.0)
        .map(|i| {
            let (blo, bhi) = bisect(&c, pts[i], pts[i + 1], vals[i])?;
            let t = 0.5 * (blo + bhi);
            Ok(ZeroRecord {
                kind: ZeroKind::Eigenvalue,
                t,
                a: Some(a.get()),
                residual: c(t)?.abs(),
                bracket: (blo, bhi),
                slope: None,
            })
        })
        .collect()
}

fn check_above_points(sampler: &ThetaSampler, a: TruncationHeight) -> Result<()> {
    if sampler.theta().max_height() >= a.get() {
        return Err(Error::Domain(format!(
            "truncation height {} is not above all Heegner points",
            a.get()
        )));
    }
    Ok(())
}

/// Roots of C between each pair of consecutive constant-term zeros in [t_lo, t_hi],
/// paired with the bracketing zeros.
pub fn eigenvalue_roots_by_interval(
    sampler: &ThetaSampler,
    a: TruncationHeight,
    t_lo: f64,
    t_hi: f64,
    q: &QuadratureSpec,
    branch: &PhaseBranch,
) -> Result<Vec<(ZeroRecord, ZeroRecord, Vec<ZeroRecord>)>> {
    check_above_points(sampler, a)?;
    let ct = constant_term_zeros(a, t_lo, t_hi, branch)?;
    ct.par_windows(2)
        .map(|pair| {
            Ok((
                pair[0],
                pair[1],
                eigenvalue_roots_between(sampler, a, pair[0].t, pair[1].t, q, branch)?,
            ))
        })
        .collect()
}

/// One root of C per open interval between consecutive constant-term zeros in
/// [t_lo, t_hi]; any other count is an interleaving violation.
pub fn eigenvalue_parameters(
    sampler: &ThetaSampler,
    a: TruncationHeight,
    t_lo: f64,
    t_hi: f64,
    q: &QuadratureSpec,
    branch: &PhaseBranch,
) -> Result<Vec<ZeroRecord>> {
    let mut out = Vec::new();
    for (lo, hi, roots) in eigenvalue_roots_by_interval(sampler, a, t_lo, t_hi, q, branch)? {
        if roots.len() != 1 {
            return Err(Error::Interleaving {
                lo: lo.t,
                hi: hi.t,
                count: roots.len(),
            });
        }
        out.push(roots[0]);
    }
    Ok(out)
}

/// Smallest |Z_θ| over the constant-term zeros of height a in [t_lo, t_hi].
pub fn min_theta_at_constant_term_zeros(
    theta: &ThetaCombination,
    a: TruncationHeight,
    t_lo: f64,
    t_hi: f64,
    branch: &PhaseBranch,
) -> Result<f64> {
    let ct = constant_term_zeros(a, t_lo, t_hi, branch)?;
    let vals: Vec<f64> = ct
        .par_iter()
        .map(|r| Ok(z_theta(theta, r.t, branch)?.abs()))
        .collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(f64::INFINITY, f64::min))
}

/// Raises a in steps of [`ADJUST_STEP`] (at most [`ADJUST_STEPS`]) until θE stays
/// above [`ADJUST_FLOOR`] at every constant-term zero in the window.
pub fn adjust_truncation_height(
    theta: &ThetaCombination,
    a: TruncationHeight,
    t_lo: f64,
    t_hi: f64,
    branch: &PhaseBranch,
) -> Result<TruncationHeight> {
    for k in 0..=ADJUST_STEPS {
        let candidate = TruncationHeight::new(a.get() + k as f64 * ADJUST_STEP)?;
        if min_theta_at_constant_term_zeros(theta, candidate, t_lo, t_hi, branch)? > ADJUST_FLOOR {
            return Ok(candidate);
        }
    }
    Err(Error::Degenerate("truncation-height adjustment"))
}

pub const CSV_HEADER: &str = "kind,t,a,residual,bracket_lo,bracket_hi";

/// x rounded to 15 significant digits.
pub fn round_sig15(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Shortest decimal form of x at 15 significant digits, in exponent form
/// outside 1e−4 ≤ |x| < 1e15.
pub fn format_sig15(x: f64) -> String {
    let r = round_sig15(x);
    if r == 0.0 || (1e-4..1e15).contains(&r.abs()) {
        r.to_string()
    } else {
        format!("{r:e}")
    }
}

pub fn write_csv<W: Write>(records: &[ZeroRecord], mut w: W) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        let a = r.a.map(format_sig15).unwrap_or_default();
        let f = format_sig15;
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.kind.as_str(),
            f(r.t),
            a,
            f(r.residual),
            f(r.bracket.0),
            f(r.bracket.1)
        )?;
    }
    Ok(())
}
