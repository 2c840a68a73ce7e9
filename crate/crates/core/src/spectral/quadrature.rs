use crate::{Error, Result};
use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;

const PANEL_ORDER: usize = 16;
const FIT_FROM: f64 = 0.25;

/// How the part of the line integral beyond ±T_max is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum TailMode {
    /// Plain truncation at ±T_max.
    None,
    /// Extrapolate beyond T_max. Numerators with a bounded local mean are
    /// handled by fitting the partial integrals P(T′) = I − c₀∫_{T′}^∞ dt/(t²+b²)
    /// over T′ ∈ [T_max/2, T_max]. Numerators of |θE_s|² type get a fitted mean
    /// c₀ + c₁ log t on [T_max/4, T_max], integrated analytically beyond each
    /// T′ ∈ [T_max/2, T_max] and averaged over T′.
    InversePowerFit,
}

/// Discretization of integrals over the critical line s = ½ + it.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadratureSpec {
    pub t_max: f64,
    pub nodes_per_unit: usize,
    pub delta: f64,
    pub tail_mode: TailMode,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            t_max: 400.0,
            nodes_per_unit: 32,
            delta: 0.05,
            tail_mode: TailMode::InversePowerFit,
        }
    }
}

impl QuadratureSpec {
    pub fn new(t_max: f64, nodes_per_unit: usize, delta: f64, tail_mode: TailMode) -> Result<Self> {
        let q = Self {
            t_max,
            nodes_per_unit,
            delta,
            tail_mode,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::Domain(format!("t_max must be positive, got {}", self.t_max)));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::Domain(format!("delta must be positive, got {}", self.delta)));
        }
        if self.nodes_per_unit < PANEL_ORDER {
            return Err(Error::Domain(format!("nodes_per_unit must be at least {PANEL_ORDER}")));
        }
        Ok(())
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_tail_mode(mut self, tail_mode: TailMode) -> Self {
        self.tail_mode = tail_mode;
        self
    }

    /// Width of an unrefined panel.
    pub fn panel_width(&self) -> f64 {
        PANEL_ORDER as f64 / self.nodes_per_unit as f64
    }

    fn panel_count(&self) -> usize {
        (self.t_max / self.panel_width()).ceil() as usize
    }

    /// Nodes t > 0 of the unrefined grid on (0, T_max].
    pub fn base_nodes(&self) -> Vec<f64> {
        let n = self.panel_count();
        let h = self.t_max / n as f64;
        let mut out = Vec::with_capacity(n * PANEL_ORDER);
        for k in 0..n {
            let (lo, hi) = (k as f64 * h, (k + 1) as f64 * h);
            out.extend(rule().iter().map(|&(x, _)| map_node(x, lo, hi)));
        }
        out
    }
}

/// Quadrature value with its tail estimate and the number of integrand evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingResult {
    pub value: Complex64,
    pub tail_estimate: f64,
    pub nodes_used: usize,
}

pub(crate) fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let gl = GaussLegendre::new(PANEL_ORDER).expect("panel order is at least 2");
        let mut pairs = gl.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    })
}

fn map_node(x: f64, lo: f64, hi: f64) -> f64 {
    0.5 * (hi - lo) * x + 0.5 * (hi + lo)
}

fn distance_to_segment(p: Complex64, lo: f64, hi: f64) -> f64 {
    let x = p.re.clamp(lo, hi);
    Complex64::new(p.re - x, p.im).norm()
}

/// Panels on [0, T]: uniform, split at `breaks`, then bisected while wider
/// than 0.75 times their distance to any of `poles`.
fn build_panels(q: &QuadratureSpec, breaks: &[f64], poles: &[Complex64]) -> Vec<(f64, f64)> {
    let n = q.panel_count();
    let h = q.t_max / n as f64;
    let mut panels = Vec::with_capacity(n + 64);
    for k in 0..n {
        let (lo, hi) = (k as f64 * h, (k + 1) as f64 * h);
        let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&b| b > lo && b < hi).collect();
        cuts.sort_by(f64::total_cmp);
        let mut start = lo;
        for c in cuts {
            panels.push((start, c));
            start = c;
        }
        panels.push((start, hi));
    }
    if poles.is_empty() {
        return panels;
    }
    let mut out = Vec::with_capacity(panels.len());
    let mut stack: Vec<(f64, f64)> = Vec::new();
    for p in panels {
        stack.push(p);
        while let Some((lo, hi)) = stack.pop() {
            let dist = poles
                .iter()
                .map(|&z| distance_to_segment(z, lo, hi))
                .fold(f64::INFINITY, f64::min);
            if hi - lo > 0.75 * dist && hi - lo > 1e-10 {
                let mid = 0.5 * (lo + hi);
                stack.push((mid, hi));
                stack.push((lo, mid));
            } else {
                out.push((lo, hi));
            }
        }
    }
    out
}

/// Cubic through four (t, f) samples, evaluated at x.
fn lagrange4(pts: &[(f64, Complex64); 4], x: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..4 {
        let mut l = 1.0;
        for j in 0..4 {
            if i != j {
                l *= (x - pts[j].0) / (pts[i].0 - pts[j].0);
            }
        }
        acc += pts[i].1 * l;
    }
    acc
}

/// Integral of t^{-2k-2} (and log t · t^{-2k-2}) from T to ∞, summed against (−b²)^k.
fn tail_moments(b2: Complex64, t: f64) -> Result<(Complex64, Complex64)> {
    if b2.norm() >= 0.25 * t * t {
        return Err(Error::UnresolvedTail(format!(
            "|b| = {} too large for T = {t}",
            b2.norm().sqrt()
        )));
    }
    let lt = t.ln();
    let ratio = -b2 / (t * t);
    let mut pw = Complex64::new(1.0 / t, 0.0);
    let (mut m0, mut m1) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for k in 0..200 {
        let n1 = (2 * k + 1) as f64;
        let a0 = pw / n1;
        let a1 = pw * (lt / n1 + 1.0 / (n1 * n1));
        m0 += a0;
        m1 += a1;
        if a1.norm() < 1e-18 * m1.norm().max(1e-300) && a0.norm() < 1e-18 * m0.norm() {
            break;
        }
        pw *= ratio;
    }
    Ok((m0, m1))
}

/// Weighted least squares with a real design and complex data, by normal equations.
fn least_squares(rows: &[(Vec<f64>, f64, Complex64)]) -> Result<Vec<Complex64>> {
    let k = rows.first().map_or(0, |r| r.0.len());
    let mut g = vec![vec![0.0; k]; k];
    let mut r = vec![Complex64::new(0.0, 0.0); k];
    for (x, w, y) in rows {
        for i in 0..k {
            for j in 0..k {
                g[i][j] += w * x[i] * x[j];
            }
            r[i] += y * (w * x[i]);
        }
    }
    for i in 0..k {
        let p = g[i][i];
        if !(p.abs() > 1e-300) {
            return Err(Error::UnresolvedTail("singular tail fit".into()));
        }
        for j in i + 1..k {
            let f = g[j][i] / p;
            let (top, rest) = g.split_at_mut(j);
            for (x, y) in rest[0][i..].iter_mut().zip(&top[i][i..]) {
                *x -= f * y;
            }
            let ri = r[i];
            r[j] -= ri * f;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); k];
    for i in (0..k).rev() {
        let mut acc = r[i];
        for l in i + 1..k {
            acc -= x[l] * g[i][l];
        }
        x[i] = acc / g[i][i];
    }
    if x.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::UnresolvedTail("non-finite tail fit".into()));
    }
    Ok(x)
}

/// Large-t behaviour assumed for the local mean of the symmetrized numerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum MeanModel {
    /// Bounded mean: oscillatory numerators, or a constant plus oscillation.
    Constant,
    /// Mean c₀ + c₁ log t, as for |θE_s|².
    LogLinear,
}

/// Integrand layout for [`line_integral`].
pub(crate) struct LineIntegrand<'a> {
    /// b = w − ½, so that λ_s − λ_w = t² + b² on s = ½ + it.
    pub b: Complex64,
    /// Numerator N(t); the integral uses N(t) + N(−t) over t ∈ [0, T].
    pub numerator: &'a (dyn Fn(f64) -> Result<Complex64> + Sync),
    /// Removable singularity at t = tp > 0: the integrand on |t − tp| < δ is
    /// replaced by the cubic through tp ± δ and tp ± 2δ.
    pub excise: Option<f64>,
    pub mean: MeanModel,
}

/// (1/4π) ∫_{−T}^{T} N(t) / (t² + b²) dt with the tail treatment of `q`.
pub(crate) fn line_integral(q: &QuadratureSpec, f: &LineIntegrand<'_>) -> Result<PairingResult> {
    q.validate()?;
    let b2 = f.b * f.b;
    let delta = q.delta;
    let (breaks, poles) = match f.excise {
        Some(tp) => {
            if !(tp > 3.0 * delta && tp + 3.0 * delta < q.t_max) {
                return Err(Error::Domain(format!("excision point {tp} too close to 0 or T_max")));
            }
            (vec![tp - delta, tp + delta], vec![])
        }
        None => {
            let ib = Complex64::new(-f.b.im, f.b.re);
            (vec![], vec![ib, -ib])
        }
    };
    let panels = build_panels(q, &breaks, &poles);
    let excised = |lo: f64, hi: f64| match f.excise {
        Some(tp) => lo >= tp - delta - 1e-12 && hi <= tp + delta + 1e-12,
        None => false,
    };

    let mut ts: Vec<f64> = Vec::with_capacity(panels.len() * PANEL_ORDER);
    for &(lo, hi) in &panels {
        if !excised(lo, hi) {
            ts.extend(rule().iter().map(|&(x, _)| map_node(x, lo, hi)));
        }
    }
    let interp_ts: Vec<f64> = match f.excise {
        Some(tp) => vec![tp - 2.0 * delta, tp - delta, tp + delta, tp + 2.0 * delta],
        None => vec![],
    };
    ts.extend_from_slice(&interp_ts);
    let sym: Vec<Complex64> = ts
        .par_iter()
        .map(|&t| Ok((f.numerator)(t)? + (f.numerator)(-t)?))
        .collect::<Result<Vec<_>>>()?;
    let integrand = |t: f64, s: Complex64| s / (t * t + b2);
    let interp: Option<[(f64, Complex64); 4]> = (interp_ts.len() == 4).then(|| {
        let base = sym.len() - 4;
        let mut pts = [(0.0, Complex64::new(0.0, 0.0)); 4];
        for k in 0..4 {
            pts[k] = (interp_ts[k], integrand(interp_ts[k], sym[base + k]));
        }
        pts
    });

    // partial integrals at panel ends and numerator samples, both over the fitting window
    let fit_lo = FIT_FROM * q.t_max;
    let mut ends: Vec<(f64, Complex64)> = Vec::new();
    let mut samples: Vec<(f64, f64, Complex64)> = Vec::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut cursor = 0;
    for &(lo, hi) in &panels {
        let half = 0.5 * (hi - lo);
        let mut acc = Complex64::new(0.0, 0.0);
        if excised(lo, hi) {
            let pts = interp.as_ref().expect("interpolation points for excised panel");
            for &(x, wgt) in rule() {
                acc += lagrange4(pts, map_node(x, lo, hi)) * wgt;
            }
        } else {
            for &(x, wgt) in rule() {
                let t = map_node(x, lo, hi);
                let s = sym[cursor];
                cursor += 1;
                acc += integrand(t, s) * wgt;
                if t >= fit_lo {
                    samples.push((t, wgt * half, s));
                }
            }
        }
        total += acc * half;
        if hi >= fit_lo - 1e-12 {
            ends.push((hi, total));
        }
    }
    let scale = 1.0 / (4.0 * PI);
    let nodes_used = 2 * ts.len();
    let avg_lo = 0.5 * q.t_max;

    let (value, tail, spread) = match (q.tail_mode, f.mean) {
        (TailMode::None, _) => {
            let window: Vec<Complex64> = ends.iter().filter(|e| e.0 >= avg_lo).map(|e| e.1).collect();
            let spread = (window.iter().map(|p| (p - total).norm_sqr()).sum::<f64>() / window.len() as f64).sqrt();
            (total, Complex64::new(0.0, 0.0), spread)
        }
        (TailMode::InversePowerFit, MeanModel::Constant) => {
            // P(T') = I − c₀·M₀(T') over the upper half of the window
            let rows: Vec<(Vec<f64>, f64, Complex64)> = ends
                .iter()
                .filter(|e| e.0 >= avg_lo)
                .map(|&(t, p)| Ok((vec![1.0, -tail_moments(b2, t)?.0.re], 1.0, p)))
                .collect::<Result<_>>()?;
            let x = least_squares(&rows)?;
            let m0 = tail_moments(b2, q.t_max)?.0;
            let tail = x[1] * m0;
            let spread = (rows
                .iter()
                .map(|r| (r.2 - x[0] - x[1] * r.0[1]).norm_sqr())
                .sum::<f64>()
                / rows.len() as f64)
                .sqrt();
            (x[0], tail, spread)
        }
        (TailMode::InversePowerFit, MeanModel::LogLinear) => {
            let rows: Vec<(Vec<f64>, f64, Complex64)> =
                samples.iter().map(|&(t, w, s)| (vec![1.0, t.ln()], w, s)).collect();
            let c = least_squares(&rows)?;
            let mut est: Vec<(f64, Complex64)> = Vec::new();
            let mut tail = Complex64::new(0.0, 0.0);
            for &(t, p) in ends.iter().filter(|e| e.0 >= avg_lo) {
                let (m0, m1) = tail_moments(b2, t)?;
                tail = c[0] * m0 + c[1] * m1;
                est.push((t, p + tail));
            }
            let mean = est.iter().map(|e| e.1).sum::<Complex64>() / est.len() as f64;
            let spread = (est.iter().map(|e| (e.1 - mean).norm_sqr()).sum::<f64>() / est.len() as f64).sqrt();
            (mean, tail, spread)
        }
    };
    let tail_estimate = spread * scale;
    log::debug!(
        "line integral: T = {}, fitted tail {:.3e}, spread {:.3e}",
        q.t_max,
        tail.norm() * scale,
        tail_estimate
    );
    if !tail_estimate.is_finite() || spread * scale > 1e-2 * (1.0 + value.norm() * scale) {
        return Err(Error::UnresolvedTail(format!("tail spread {:.3e}", spread * scale)));
    }
    Ok(PairingResult {
        value: value * scale,
        tail_estimate,
        nodes_used,
    })
}
