//! Statistics over zero lists: gaps, interleaving, sensitivity to the
//! truncation height, the pair-correlation density integral and the spacing
//! scenarios between adjacent zeros of θE.

use crate::specialfns::PhaseBranch;
use crate::spectral::{QuadratureSpec, ThetaSampler};
use crate::zeros::{
    condition_terms, constant_term_phase, eigenvalue_roots_by_interval, j_zeros, theta_line_zeros, ZeroRecord,
    BRACKET_TOL,
};
use crate::{Error, Result, TruncationHeight};
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpacingReport {
    pub window: (f64, f64),
    pub gaps: Vec<f64>,
    /// gap · log t / π, with t the lower zero of each pair.
    pub normalized_gaps: Vec<f64>,
    pub violations: Vec<(ZeroRecord, ZeroRecord)>,
}

impl SpacingReport {
    fn empty(window: (f64, f64)) -> Self {
        Self {
            window,
            gaps: vec![],
            normalized_gaps: vec![],
            violations: vec![],
        }
    }

    pub fn min_normalized(&self) -> Option<f64> {
        self.normalized_gaps.iter().copied().reduce(f64::min)
    }

    pub fn max_normalized(&self) -> Option<f64> {
        self.normalized_gaps.iter().copied().reduce(f64::max)
    }

    pub fn mean_normalized(&self) -> Option<f64> {
        (!self.normalized_gaps.is_empty())
            .then(|| self.normalized_gaps.iter().sum::<f64>() / self.normalized_gaps.len() as f64)
    }
}

/// Gaps between consecutive zeros, raw and in units of π/log t.
pub fn gap_statistics(zeros: &[ZeroRecord]) -> Result<SpacingReport> {
    if zeros.len() < 2 {
        return Err(Error::Domain(format!(
            "gap statistics need at least two zeros, got {}",
            zeros.len()
        )));
    }
    let mut gaps = Vec::with_capacity(zeros.len() - 1);
    let mut normalized = Vec::with_capacity(zeros.len() - 1);
    for w in zeros.windows(2) {
        let g = w[1].t - w[0].t;
        if !(g > 0.0) {
            return Err(Error::Domain(format!("zeros not increasing at t = {}", w[0].t)));
        }
        if w[0].t <= 1.0 {
            return Err(Error::Domain("normalized gaps need t > 1".into()));
        }
        gaps.push(g);
        normalized.push(g * w[0].t.ln() / PI);
    }
    Ok(SpacingReport {
        window: (zeros[0].t, zeros[zeros.len() - 1].t),
        gaps,
        normalized_gaps: normalized,
        violations: vec![],
    })
}

/// Eigenvalue parameters between consecutive constant-term zeros; every interval
/// whose root count is not exactly one is listed with its bracketing zeros.
pub fn interleave_check(
    sampler: &ThetaSampler,
    a: TruncationHeight,
    t_lo: f64,
    t_hi: f64,
    q: &QuadratureSpec,
    branch: &PhaseBranch,
) -> Result<SpacingReport> {
    let intervals = eigenvalue_roots_by_interval(sampler, a, t_lo, t_hi, q, branch)?;
    let mut report = SpacingReport::empty((t_lo, t_hi));
    let mut roots = Vec::new();
    for (lo, hi, found) in intervals {
        if found.len() != 1 {
            report.violations.push((lo, hi));
        }
        roots.extend(found);
    }
    if roots.len() >= 2 {
        let stats = gap_statistics(&roots)?;
        report.gaps = stats.gaps;
        report.normalized_gaps = stats.normalized_gaps;
    }
    Ok(report)
}

/// Number of eigenvalue roots in each constant-term interval of the window.
pub fn interval_counts(
    sampler: &ThetaSampler,
    a: TruncationHeight,
    t_lo: f64,
    t_hi: f64,
    q: &QuadratureSpec,
    branch: &PhaseBranch,
) -> Result<Vec<usize>> {
    Ok(eigenvalue_roots_by_interval(sampler, a, t_lo, t_hi, q, branch)?
        .into_iter()
        .map(|r| r.2.len())
        .collect())
}

/// ∂t/∂a = (−t/a)/(log a + ψ′(t)) at a constant-term zero t.
pub fn dt_da(t: f64, a: TruncationHeight, branch: &PhaseBranch) -> Result<f64> {
    let av = a.get();
    let den = av.ln() + branch.psi_prime(t)?;
    if !(den > 0.0) {
        return Err(Error::Degenerate("log a + ψ′(t)"));
    }
    Ok((-t / av) / den)
}

/// Root of f near `t0`, bracketed by stepping outward in increments of `step`.
fn track_root(f: &dyn Fn(f64) -> Result<f64>, t0: f64, step: f64) -> Result<f64> {
    let f0 = f(t0)?;
    if f0 == 0.0 {
        return Ok(t0);
    }
    for k in 1..=64 {
        for dir in [1.0, -1.0] {
            let t1 = t0 + dir * k as f64 * step;
            let f1 = f(t1)?;
            if f1 * f0 <= 0.0 {
                let (mut lo, mut hi, mut flo) = if dir > 0.0 { (t0, t1, f0) } else { (t1, t0, f1) };
                while hi - lo > BRACKET_TOL {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let fm = f(mid)?;
                    if (fm < 0.0) == (flo < 0.0) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                return Ok(0.5 * (lo + hi));
            }
        }
    }
    Err(Error::Domain(format!("no root found near t = {t0}")))
}

/// The constant-term zero near `t` (a zero for height `a`) followed to height `a_new`.
pub fn track_constant_term_zero(
    t: f64,
    a: TruncationHeight,
    a_new: TruncationHeight,
    branch: &PhaseBranch,
) -> Result<f64> {
    let phi = constant_term_phase(t, a, branch)?;
    let target = ((phi / PI - 0.5).round() + 0.5) * PI;
    let g = |s: f64| Ok(constant_term_phase(s, a_new, branch)? - target);
    track_root(&g, t, 1e-4)
}

/// The eigenvalue parameter near `tau` followed to height `a_new`.
pub fn track_eigenvalue_parameter(
    sampler: &ThetaSampler,
    tau: f64,
    a_new: TruncationHeight,
    q: &QuadratureSpec,
    branch: &PhaseBranch,
) -> Result<f64> {
    let c = |t: f64| Ok(condition_terms(sampler, a_new, t, q, branch)?.value(t));
    track_root(&c, tau, 1e-4)
}

/// Step in u = τ log τ for the central difference of R.
pub const R_PRIME_STEP: f64 = 1e-3;

/// Pieces of the ∂τ/∂a formula at one eigenvalue parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauSensitivity {
    pub tau: f64,
    pub r: f64,
    /// dR/du with u = τ log τ.
    pub r_prime: f64,
    pub psi_prime: f64,
    pub dtau_da: f64,
    /// R′ ≤ (log a + ψ′)/(log τ + 1)·(R² + 1).
    pub slope_bound_holds: bool,
}

/// ∂τ/∂a = (τ/a)(R²+1) / ((log τ+1)R′ − (log a+ψ′)(R²+1)) with R = −4τJ/|θE|²
/// as a function of u = τ log τ.
pub fn dtau_da(
    sampler: &ThetaSampler,
    tau: f64,
    a: TruncationHeight,
    q: &QuadratureSpec,
    branch: &PhaseBranch,
) -> Result<TauSensitivity> {
    let av = a.get();
    let r_at = |t: f64| -> Result<f64> { Ok(condition_terms(sampler, a, t, q, branch)?.r(t)) };
    let lt1 = tau.ln() + 1.0;
    let h = 0.5 * R_PRIME_STEP / lt1;
    let (tp, tm) = (tau + h, tau - h);
    let r_prime = (r_at(tp)? - r_at(tm)?) / (tp * tp.ln() - tm * tm.ln());
    let r = r_at(tau)?;
    let psi_prime = branch.psi_prime(tau)?;
    let sec2 = r * r + 1.0;
    let slope_cap = (av.ln() + psi_prime) * sec2;
    let den = lt1 * r_prime - slope_cap;
    let num = tau / av * sec2;
    if den.abs() <= 1e-9 * (lt1 * r_prime.abs() + slope_cap) {
        return Err(Error::Degenerate("dtau/da denominator"));
    }
    Ok(TauSensitivity {
        tau,
        r,
        r_prime,
        psi_prime,
        dtau_da: num / den,
        slope_bound_holds: r_prime <= slope_cap / lt1,
    })
}

/// Absolute tolerance of [`pair_correlation_fraction`].
pub const PAIR_CORRELATION_TOL: f64 = 1e-10;

fn one_minus_sinc2(u: f64) -> f64 {
    let x = PI * u;
    if x.abs() < 1e-4 {
        // 1 − (1 − x²/6 + x⁴/120)² to O(x⁶)
        let x2 = x * x;
        x2 / 3.0 - 2.0 * x2 * x2 / 45.0
    } else {
        let s = x.sin() / x;
        1.0 - s * s
    }
}

fn gl_panel(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    crate::spectral::gl_rule()
        .iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

fn adaptive(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let mid = 0.5 * (lo + hi);
    let (left, right) = (gl_panel(f, lo, mid), gl_panel(f, mid, hi));
    if (left + right - whole).abs() <= tol || depth == 0 {
        return left + right;
    }
    adaptive(f, lo, mid, left, 0.5 * tol, depth - 1) + adaptive(f, mid, hi, right, 0.5 * tol, depth - 1)
}

/// ∫_α^β (1 − (sin πu/πu)²) du.
pub fn pair_correlation_fraction(alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha >= 0.0 && beta >= alpha && beta.is_finite()) {
        return Err(Error::Domain(format!("need 0 ≤ α ≤ β, got ({alpha}, {beta})")));
    }
    if beta == alpha {
        return Ok(0.0);
    }
    let f = |u: f64| one_minus_sinc2(u);
    // unit panels keep the oscillation per panel bounded
    let mut acc = 0.0;
    let mut lo = alpha;
    while lo < beta {
        let hi = (lo.floor() + 1.0).min(beta);
        acc += adaptive(&f, lo, hi, gl_panel(&f, lo, hi), PAIR_CORRELATION_TOL, 30);
        lo = hi;
    }
    Ok(acc)
}

/// The density integral over (0, ½) and the share of zeros it leaves possible
/// as eigenvalue parameters when one zero of each close pair is excluded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairCorrelationReport {
    pub alpha: f64,
    pub beta: f64,
    pub fraction: f64,
    pub excluded_share: f64,
    pub max_eigenvalue_share: f64,
}

pub fn pair_correlation_report(alpha: f64, beta: f64) -> Result<PairCorrelationReport> {
    let fraction = pair_correlation_fraction(alpha, beta)?;
    Ok(PairCorrelationReport {
        alpha,
        beta,
        fraction,
        excluded_share: 0.5 * fraction,
        max_eigenvalue_share: 1.0 - 0.5 * fraction,
    })
}

/// Envelope standing in for the O(1/log log t) slack of the spacing bounds.
pub fn spacing_envelope(t: f64) -> f64 {
    3.0 / t.ln().ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// A unique on-line zero of J between the pair, with J′ > 0.
    UniqueRisingJZero,
    /// No on-line zero of J between the pair; the off-line pair of zeros
    /// assumed by the half-average bound is not verified.
    NoOnLineJZero,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioRecord {
    pub t: f64,
    pub t_next: f64,
    pub scenario: Scenario,
    pub j_zeros_between: usize,
    pub note: Option<String>,
    /// |t′ − t|·log t/π.
    pub normalized_gap: f64,
    pub bound: Option<f64>,
    pub margin: Option<f64>,
    pub satisfied: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpacingScanReport {
    pub window: (f64, f64),
    pub envelope: &'static str,
    pub t_max: f64,
    pub records: Vec<ScenarioRecord>,
    pub violations: usize,
}

/// Threshold on |J| at a θE zero below which the pair is not classified.
pub const J_ENDPOINT_FLOOR: f64 = 1e-8;

/// Adjacent on-line zeros of θE in the window, each pair classified by the
/// on-line zeros of J between them and compared with its spacing bound.
pub fn spacing_corollary_scan(
    sampler: &ThetaSampler,
    t_lo: f64,
    t_hi: f64,
    q: &QuadratureSpec,
    branch: &PhaseBranch,
) -> Result<SpacingScanReport> {
    let tz = theta_line_zeros(sampler.theta(), t_lo, t_hi, branch)?;
    let jz = if tz.len() >= 2 {
        j_zeros(sampler, tz[0].t, tz[tz.len() - 1].t, q)?
    } else {
        vec![]
    };
    let mut records = Vec::new();
    for pair in tz.windows(2) {
        let (t, t_next) = (pair[0].t, pair[1].t);
        let between: Vec<&ZeroRecord> = jz.iter().filter(|z| z.t > t && z.t < t_next).collect();
        let normalized_gap = (t_next - t) * t.ln() / PI;
        let endpoint_j = sampler.j_online(t, q)?.abs().min(sampler.j_online(t_next, q)?.abs());
        let (scenario, note) = if endpoint_j < J_ENDPOINT_FLOOR {
            (Scenario::Inconclusive, Some("θE zero is also a zero of J".to_string()))
        } else {
            match between.as_slice() {
                [z] if z.slope.is_some_and(|s| s > 0.0) => (Scenario::UniqueRisingJZero, None),
                [_] => (Scenario::Inconclusive, Some("unique J zero with J′ ≤ 0".to_string())),
                [] => (
                    Scenario::NoOnLineJZero,
                    Some("off-line J zeros not verified".to_string()),
                ),
                _ => (
                    Scenario::Inconclusive,
                    Some(format!("{} J zeros between", between.len())),
                ),
            }
        };
        let bound = match scenario {
            Scenario::UniqueRisingJZero => Some(1.0 - spacing_envelope(t)),
            Scenario::NoOnLineJZero => Some(0.5 - spacing_envelope(t)),
            Scenario::Inconclusive => None,
        };
        let margin = bound.map(|b| normalized_gap - b);
        records.push(ScenarioRecord {
            t,
            t_next,
            scenario,
            j_zeros_between: between.len(),
            note,
            normalized_gap,
            bound,
            margin,
            satisfied: margin.map(|m| m >= 0.0),
        });
    }
    let violations = records.iter().filter(|r| r.satisfied == Some(false)).count();
    Ok(SpacingScanReport {
        window: (t_lo, t_hi),
        envelope: "3/log log t",
        t_max: q.t_max,
        records,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeros::{constant_term_zeros, ZeroKind};
    use crate::ThetaCombination;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn branch() -> &'static PhaseBranch {
        static B: OnceLock<PhaseBranch> = OnceLock::new();
        B.get_or_init(|| PhaseBranch::build(160.0).unwrap())
    }

    fn sampler() -> &'static ThetaSampler {
        static S: OnceLock<ThetaSampler> = OnceLock::new();
        S.get_or_init(|| {
            let mut s = ThetaSampler::new(ThetaCombination::single(-7).unwrap());
            s.warm(&QuadratureSpec::default().with_t_max(800.0)).unwrap();
            s
        })
    }

    fn ta(a: f64) -> TruncationHeight {
        TruncationHeight::new(a).unwrap()
    }

    fn record(t: f64) -> ZeroRecord {
        ZeroRecord {
            kind: ZeroKind::ConstantTerm,
            t,
            a: None,
            residual: 0.0,
            bracket: (t, t),
            slope: None,
        }
    }

    /// ∫_0^x (sin πu/πu)² du = (Si(2πx) − sin²(πx)/(πx))/π, with Si by its power series.
    fn sinc2_integral(x: f64) -> f64 {
        let z = 2.0 * PI * x;
        let mut term = z;
        let mut si = 0.0;
        for k in 0..80 {
            si += term / (2 * k + 1) as f64;
            term *= -z * z / (((2 * k + 2) * (2 * k + 3)) as f64);
        }
        let s = (PI * x).sin();
        (si - s * s / (PI * x)) / PI
    }

    #[test]
    fn pair_correlation_values() {
        let half = pair_correlation_fraction(0.0, 0.5).unwrap();
        assert!((half - 0.11315249504859190777).abs() < 1e-12);
        assert!((half - 0.11315).abs() < 5e-5);
        assert_eq!(pair_correlation_fraction(0.0, 0.0).unwrap(), 0.0);
        let three = pair_correlation_fraction(0.0, 3.0).unwrap();
        assert!((three - 2.5167947825022528675).abs() < 1e-12);
        assert!((three - (3.0 - sinc2_integral(3.0))).abs() < 1e-6);
        assert!(pair_correlation_fraction(0.5, 0.2).is_err());
        let r = pair_correlation_report(0.0, 0.5).unwrap();
        assert!((r.max_eigenvalue_share - (1.0 - 0.5 * half)).abs() < 1e-15);
        assert!((r.max_eigenvalue_share - 0.943).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn pair_correlation_monotone_and_additive(a in 0.0f64..2.0, d1 in 0.0f64..2.0, d2 in 0.0f64..2.0) {
            let (b, c) = (a + d1, a + d1 + d2);
            let ab = pair_correlation_fraction(a, b).unwrap();
            let bc = pair_correlation_fraction(b, c).unwrap();
            let ac = pair_correlation_fraction(a, c).unwrap();
            prop_assert!((ab + bc - ac).abs() < 1e-8);
            prop_assert!(ac >= ab - 1e-15);
        }
    }

    #[test]
    fn gap_statistics_basics() {
        assert!(gap_statistics(&[record(5.0)]).is_err());
        let r = gap_statistics(&[record(5.0), record(6.0)]).unwrap();
        assert_eq!(r.gaps, vec![1.0]);
        assert!((r.normalized_gaps[0] - 5f64.ln() / PI).abs() < 1e-15);
        assert!(gap_statistics(&[record(6.0), record(5.0)]).is_err());
    }

    #[test]
    fn mean_gap_follows_phase_density() {
        let a = ta(2.0);
        let zs: Vec<ZeroRecord> = constant_term_zeros(a, 0.5, 160.0, branch())
            .unwrap()
            .into_iter()
            .filter(|z| z.t > 50.0 && z.t < 150.0)
            .collect();
        let r = gap_statistics(&zs).unwrap();
        assert!(r.gaps.iter().all(|&g| g > 0.0));
        // mean of ψ′ is log(t/π), so the mean gap is π/(log a + log(t/π))
        let predicted = zs
            .windows(2)
            .map(|w| w[0].t.ln() / (2f64.ln() + (w[0].t / PI).ln()))
            .sum::<f64>()
            / (zs.len() - 1) as f64;
        let mean = r.mean_normalized().unwrap();
        assert!((mean - predicted).abs() < 0.02 * predicted, "{mean} vs {predicted}");
    }

    #[test]
    fn dt_da_matches_tracking() {
        let a = ta(2.0);
        let h = 1e-5;
        let zs = constant_term_zeros(a, 5.0, 150.0, branch()).unwrap();
        for z in zs.iter().step_by(zs.len() / 10).take(10) {
            let d = dt_da(z.t, a, branch()).unwrap();
            assert!(d < 0.0);
            let moved = track_constant_term_zero(z.t, a, ta(2.0 + h), branch()).unwrap();
            let fd = (moved - z.t) / h;
            assert!(((fd - d) / d).abs() < 1e-3, "t = {}: {fd} vs {d}", z.t);
        }
    }

    #[test]
    fn dt_da_magnitude_on_average() {
        let a = ta(2.0);
        let zs = constant_term_zeros(a, 50.0, 150.0, branch()).unwrap();
        let ratios: Vec<f64> = zs
            .iter()
            .map(|z| -dt_da(z.t, a, branch()).unwrap() / ((z.t / 2.0) / z.t.ln()))
            .collect();
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        assert!((mean - 1.0).abs() < 0.25, "{mean}");
    }

    #[test]
    fn interleaving_and_stability_under_perturbation() {
        let q = QuadratureSpec::default();
        let r = interleave_check(sampler(), ta(2.0), 15.0, 40.0, &q, branch()).unwrap();
        assert!(r.violations.is_empty());
        assert!(!r.gaps.is_empty());
        let base = interval_counts(sampler(), ta(2.0), 15.0, 40.0, &q, branch()).unwrap();
        let moved = interval_counts(sampler(), ta(2.001), 15.0, 40.0, &q, branch()).unwrap();
        assert!(base.iter().all(|&c| c == 1));
        assert_eq!(base, moved);
        let empty = interleave_check(sampler(), ta(2.0), 15.0, 15.05, &q, branch()).unwrap();
        assert!(empty.violations.is_empty() && empty.gaps.is_empty());
    }

    #[test]
    fn dtau_da_matches_root_tracking() {
        let q = QuadratureSpec::default();
        let a = ta(2.0);
        let roots = crate::zeros::eigenvalue_parameters(sampler(), a, 18.0, 23.0, &q, branch()).unwrap();
        let tau = roots
            .iter()
            .map(|r| r.t)
            .min_by(|x, y| (x - 20.0).abs().total_cmp(&(y - 20.0).abs()))
            .unwrap();
        let sens = dtau_da(sampler(), tau, a, &q, branch()).unwrap();
        let h = 1e-4;
        let up = track_eigenvalue_parameter(sampler(), tau, ta(2.0 + h), &q, branch()).unwrap();
        let down = track_eigenvalue_parameter(sampler(), tau, ta(2.0 - h), &q, branch()).unwrap();
        let fd = (up - down) / (2.0 * h);
        assert!(((fd - sens.dtau_da) / fd).abs() < 5e-2, "{fd} vs {}", sens.dtau_da);
        for r in &roots {
            let s = dtau_da(sampler(), r.t, a, &q, branch()).unwrap();
            assert!(s.dtau_da <= 0.0);
            assert!(s.slope_bound_holds);
        }
    }

    #[test]
    fn spacing_scan_classifies_reproducibly() {
        let q = QuadratureSpec::default();
        let r1 = spacing_corollary_scan(sampler(), 20.0, 40.0, &q, branch()).unwrap();
        let r2 = spacing_corollary_scan(sampler(), 20.0, 40.0, &q.with_t_max(800.0), branch()).unwrap();
        assert_eq!(r1.records.len(), r2.records.len());
        for (a, b) in r1.records.iter().zip(&r2.records) {
            assert_eq!(a.scenario, b.scenario, "pair at {}", a.t);
        }
        assert_eq!(r1.violations, 0);
        assert!(r1.records.iter().any(|r| r.scenario == Scenario::UniqueRisingJZero));
        for r in &r1.records {
            match r.scenario {
                Scenario::Inconclusive => assert!(r.margin.is_none()),
                _ => assert!(r.margin.unwrap() >= 0.0),
            }
        }
        let none = spacing_corollary_scan(sampler(), 20.0, 20.5, &q, branch()).unwrap();
        assert!(none.records.is_empty() && none.violations == 0);
    }

    #[test]
    fn envelope_values() {
        assert!(1.0 - spacing_envelope(20.0) < 0.0);
        assert!(1.0 - spacing_envelope(1e6) < 0.0);
        assert!(1.0 - spacing_envelope(1e10) > 0.0);
    }
}
