//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use gauss_quad::legendre::GaussLegendre;
use pseudolap::analysis::{
    dt_da, dtau_da, gap_statistics, interleave_check, pair_correlation_fraction, spacing_corollary_scan,
    spacing_envelope, track_constant_term_zero, track_eigenvalue_parameter, Scenario,
};
use pseudolap::eisenstein::{eisenstein_value, maass_selberg_norm, truncation_jump_coefficient, FourierExpansion};
use pseudolap::heegner::heegner_set;
use pseudolap::specialfns::{dirichlet_l, riemann_zeta, scattering_c, scattering_c_xi, xi_completed};
use pseudolap::spectral::{eta_v_closed, kernel_pairing, rd_correction, theta_v_closed, ThetaSampler};
use pseudolap::zeros::{adjust_truncation_height, constant_term_zeros, eigenvalue_parameters};
use pseudolap::{
    Complex64, FundamentalDiscriminant, PhaseBranch, QuadratureSpec, Result, ThetaCombination, TruncationHeight,
    UpperHalfPoint,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

struct Ctx {
    branch: PhaseBranch,
    sampler: ThetaSampler,
}

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ta(a: f64) -> TruncationHeight {
    TruncationHeight::new(a).expect("valid truncation height")
}

fn fine() -> QuadratureSpec {
    QuadratureSpec::default().with_t_max(1600.0)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn scattering_identities(_: &Ctx) -> Result<Outcome> {
    let mut grid = Vec::new();
    for i in 0..10 {
        for k in 0..10 {
            grid.push(cx(0.1 + 0.1 * i as f64 + 0.013, 0.7 + 3.1 * k as f64));
        }
    }
    let (mut refl, mut xi_sym, mut forms) = (0.0f64, 0.0f64, 0.0f64);
    for &s in &grid {
        refl = refl.max((scattering_c(s)? * scattering_c(1.0 - s)? - 1.0).norm());
        xi_sym = xi_sym.max(rel(xi_completed(1.0 - s)?, xi_completed(s)?));
        forms = forms.max(rel(scattering_c(s)?, scattering_c_xi(s)?));
    }
    Ok(Outcome::new(
        refl < 1e-10 && xi_sym < 1e-10 && forms < 1e-9,
        format!("max |c_s c_(1-s) - 1| = {refl:.1e}, xi symmetry {xi_sym:.1e}, gamma-zeta vs xi form {forms:.1e}"),
    ))
}

fn residue(_: &Ctx) -> Result<Outcome> {
    let i = UpperHalfPoint::new(0.0, 1.0)?;
    let f = |k: i32| -> Result<f64> {
        let h = 10f64.powi(-k);
        Ok((eisenstein_value(i, cx(1.0 + h, 0.0))? * h).re)
    };
    let (f3, f4, f5) = (f(3)?, f(4)?, f(5)?);
    // f(h) = R + αh + βh², Richardson on h = 10⁻³, 10⁻⁴, 10⁻⁵
    let r45 = (10.0 * f5 - f4) / 9.0;
    let r34 = (10.0 * f4 - f3) / 9.0;
    let r = (100.0 * r45 - r34) / 99.0;
    let err = (r - 3.0 / PI).abs();
    Ok(Outcome::new(
        err < 1e-4,
        format!("extrapolated {r:.10} vs 3/pi, error {err:.1e}"),
    ))
}

fn heegner_identity(_: &Ctx) -> Result<Outcome> {
    let set = heegner_set(FundamentalDiscriminant::new(-7)?);
    let s = cx(2.5, 0.0);
    let mut lhs = cx(0.0, 0.0);
    for &z in &set.points {
        lhs += eisenstein_value(z, s)?;
    }
    let rhs = (s * (7f64.sqrt() / 2.0).ln()).exp() * riemann_zeta(s)? * dirichlet_l(s, -7)? / riemann_zeta(s * 2.0)?;
    let err = (lhs - rhs).norm();
    Ok(Outcome::new(
        err < 1e-7,
        format!("h = {}, sum {:.12} vs {:.12}, error {err:.1e}", set.h, lhs.re, rhs.re),
    ))
}

fn closed_vs_quadrature(ctx: &Ctx) -> Result<Outcome> {
    let s = &ctx.sampler;
    let y = s.theta().max_height();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = [0.0f64; 3];
    let mut below = 0;
    for k in 0..5 {
        let w = cx(rng.gen_range(0.6..0.95), rng.gen_range(0.2..12.0));
        // the slow (a/y)^{it} oscillation needs |log(y/a)| bounded away from zero
        let a = loop {
            let a = if k == 0 {
                rng.gen_range(1.05..1.25)
            } else {
                rng.gen_range(1.05..4.0)
            };
            if (a / y).ln().abs() > 0.05 {
                break ta(a);
            }
        };
        if a.get() < y {
            below += 1;
            if rd_correction(s.theta(), w, a)?.norm() < 1e-3 {
                return Ok(Outcome::new(
                    false,
                    format!("correction term negligible at a = {}", a.get()),
                ));
            }
        }
        let tv_closed = theta_v_closed(s.theta(), w, a)?;
        worst[0] = worst[0].max((s.eta_v(w, a, &fine())?.value - eta_v_closed(w, a)?).norm());
        worst[1] = worst[1].max((s.theta_v(w, a, &fine())?.value - tv_closed).norm());
        worst[2] = worst[2].max((s.eta_u(w, a, &fine())?.value - tv_closed).norm());
    }
    Ok(Outcome::new(
        worst.iter().all(|&e| e < 1e-5) && below > 0,
        format!(
            "max errors eta(v) {:.1e}, theta(v) {:.1e}, eta(u) vs theta(v) {:.1e}; {below} of 5 with a below the Heegner point",
            worst[0], worst[1], worst[2]
        ),
    ))
}

fn kernel_calibration(_: &Ctx) -> Result<Outcome> {
    let one = |_: f64| Ok(cx(1.0, 0.0));
    let q = QuadratureSpec::default();
    let mut worst = 0.0f64;
    for k in 0..10 {
        let w = cx(0.58 + 0.14 * (k % 5) as f64, -15.0 + 3.3 * k as f64);
        let r = kernel_pairing(&one, &one, cx(0.0, 0.0), w, &q)?;
        worst = worst.max((r.value - 1.0 / (2.0 * (2.0 * w - 1.0))).norm());
    }
    Ok(Outcome::new(worst < 1e-6, format!("max error {worst:.1e} over 10 w")))
}

fn functional_equation(ctx: &Ctx) -> Result<Outcome> {
    let s = &ctx.sampler;
    let q = QuadratureSpec::default();
    let mut fe = 0.0f64;
    for (w, a) in [(cx(0.52, 8.0), 3.0), (cx(0.51, 13.3), 2.0), (cx(0.53, 4.4), 2.5)] {
        let g1 = s.determinant_fg(ta(a), w, &q)?.g;
        let g2 = s.determinant_fg(ta(a), 1.0 - w, &q)?.g;
        fe = fe.max((g1 - g2).norm());
    }
    let mut min_g = f64::INFINITY;
    for i in 0..5 {
        for k in 0..5 {
            let w = cx(0.55 + 0.35 * i as f64 / 4.0, 2.0 + 8.0 * k as f64 / 4.0);
            min_g = min_g.min(s.determinant_fg(ta(2.0), w, &q)?.g.norm());
        }
    }
    Ok(Outcome::new(
        fe < 1e-5 && min_g > 0.0,
        format!("max |G(w) - G(1-w)| = {fe:.1e}, min |G| on 5x5 grid = {min_g:.3e}"),
    ))
}

fn on_line_structure(ctx: &Ctx) -> Result<Outcome> {
    let s = &ctx.sampler;
    let q = QuadratureSpec::default();
    let (mut re_err, mut im_err) = (0.0f64, 0.0f64);
    for tau in [4.3, 9.0, 15.7, 22.2, 31.9] {
        let limit = s.theta_u_line_limit(tau, &q)?;
        re_err = re_err.max((limit.re - s.j_online(tau, &q)?).abs());
        im_err = im_err.max((limit.im + s.line_value(tau)?.norm_sqr() / (4.0 * tau)).abs());
    }
    Ok(Outcome::new(
        re_err < 1e-4 && im_err < 1e-4,
        format!("max |Re - J| = {re_err:.1e}, max |Im + |thetaE|^2/4tau| = {im_err:.1e}"),
    ))
}

fn exotic_identity(ctx: &Ctx) -> Result<Outcome> {
    let a = ta(2.0);
    let zeros = constant_term_zeros(a, 3.0, 20.0, &ctx.branch)?;
    let mut worst = 0.0f64;
    let mut ratio = cx(0.0, 0.0);
    for z in zeros.iter().take(3) {
        let w = cx(0.5, z.t);
        let measured = truncation_jump_coefficient(w, a, 1e-4)?;
        let reference = (1.0 - 2.0 * w) * 2.0 * ((w + 1.0) * a.get().ln()).exp();
        let e = rel(measured, reference);
        if e > worst {
            worst = e;
            ratio = measured / reference;
        }
    }
    Ok(Outcome::new(
        worst < 1e-2,
        format!(
            "max relative error {worst:.2e}, measured/reference = {:.6}{:+.6}i",
            ratio.re, ratio.im
        ),
    ))
}

/// ‖∧^aE_s‖² over the standard fundamental domain by product Gauss–Legendre:
/// x ∈ [0, ½] outside, y from the unit circle to a and from a to a + 4 inside.
fn truncated_norm_by_quadrature(s: Complex64, a: f64) -> Result<f64> {
    let e = FourierExpansion::new(s)?;
    let rule = GaussLegendre::new(24)
        .expect("order 24")
        .as_node_weight_pairs()
        .to_vec();
    let panel = |lo: f64, hi: f64, f: &dyn Fn(f64) -> f64| -> f64 {
        rule.iter()
            .map(|&(x, w)| w * f(lo + 0.5 * (hi - lo) * (x + 1.0)))
            .sum::<f64>()
            * 0.5
            * (hi - lo)
    };
    let inner = |x: f64| -> f64 {
        let at = |y: f64, with_ct: bool| {
            let mut v = FourierExpansion::sum_modes(&e.modes(y), x);
            if with_ct {
                v += e.constant_term(y);
            }
            v.norm_sqr() / (y * y)
        };
        let y0 = (1.0 - x * x).sqrt();
        let n_low = 6;
        let mut acc = 0.0;
        for k in 0..n_low {
            let lo = y0 + (a - y0) * k as f64 / n_low as f64;
            let hi = y0 + (a - y0) * (k + 1) as f64 / n_low as f64;
            acc += panel(lo, hi, &|y| at(y, true));
        }
        for k in 0..8 {
            acc += panel(a + 0.5 * k as f64, a + 0.5 * (k + 1) as f64, &|y| at(y, false));
        }
        acc
    };
    let mut total = 0.0;
    for k in 0..4 {
        total += panel(0.125 * k as f64, 0.125 * (k + 1) as f64, &inner);
    }
    Ok(2.0 * total)
}

fn maass_selberg(ctx: &Ctx) -> Result<Outcome> {
    let a = ta(2.0);
    let zeros = constant_term_zeros(a, 0.5, 50.0, &ctx.branch)?;
    let t = zeros.iter().find(|z| z.t > 5.0).expect("constant-term zero above 5").t;
    let formula = maass_selberg_norm(t, a, &ctx.branch)?;
    let direct = truncated_norm_by_quadrature(cx(0.5, t), a.get())?;
    let err = ((formula - direct) / direct).abs();
    let mut min_norm = f64::INFINITY;
    for z in &zeros {
        min_norm = min_norm.min(maass_selberg_norm(z.t, a, &ctx.branch)?);
    }
    Ok(Outcome::new(
        err < 1e-2 && min_norm > 0.0,
        format!(
            "t* = {t:.6}: formula {formula:.8} vs quadrature {direct:.8} (rel {err:.1e}); min norm over {} zeros to 50 = {min_norm:.4}",
            zeros.len()
        ),
    ))
}

fn zero_statistics(ctx: &Ctx) -> Result<Outcome> {
    let a = ta(2.0);
    let zeros = constant_term_zeros(a, 0.5, 110.0, &ctx.branch)?;
    let count = zeros.iter().filter(|z| z.t <= 100.0).count() as f64;
    let scale = 100.0 / PI * 100f64.ln();
    let count_ok = ((count - scale) / scale).abs() <= 0.2;
    let near: Vec<_> = zeros.iter().copied().filter(|z| z.t >= 95.0 && z.t <= 105.0).collect();
    let stats = gap_statistics(&near)?;
    let (lo, hi) = (
        stats.min_normalized().unwrap_or(f64::NAN),
        stats.max_normalized().unwrap_or(f64::NAN),
    );
    let gaps_ok = lo >= 0.75 && hi <= 1.25;
    Ok(Outcome::new(
        count_ok && gaps_ok,
        format!("count on (0,100] = {count} vs {scale:.1}; normalized gaps in [95,105] span [{lo:.3}, {hi:.3}]"),
    ))
}

fn interleaving(ctx: &Ctx) -> Result<Outcome> {
    let q = QuadratureSpec::default();
    let a = adjust_truncation_height(ctx.sampler.theta(), ta(2.0), 15.0, 40.0, &ctx.branch)?;
    let r = interleave_check(&ctx.sampler, a, 15.0, 40.0, &q, &ctx.branch)?;
    let roots = r.gaps.len() + 1;
    Ok(Outcome::new(
        r.violations.is_empty(),
        format!("a = {}, {roots} roots, {} violations", a.get(), r.violations.len()),
    ))
}

fn derivatives(ctx: &Ctx) -> Result<Outcome> {
    let a = ta(2.0);
    let h = 1e-5;
    let zeros = constant_term_zeros(a, 5.0, 150.0, &ctx.branch)?;
    let mut dt_err = 0.0f64;
    for z in zeros.iter().step_by(zeros.len() / 10).take(10) {
        let d = dt_da(z.t, a, &ctx.branch)?;
        let fd = (track_constant_term_zero(z.t, a, ta(2.0 + h), &ctx.branch)? - z.t) / h;
        dt_err = dt_err.max(((fd - d) / d).abs());
    }
    let q = QuadratureSpec::default();
    let roots = eigenvalue_parameters(&ctx.sampler, a, 18.0, 23.0, &q, &ctx.branch)?;
    let h = 1e-4;
    let mut tau_err = 0.0f64;
    for r in roots.iter().take(3) {
        let sens = dtau_da(&ctx.sampler, r.t, a, &q, &ctx.branch)?;
        let up = track_eigenvalue_parameter(&ctx.sampler, r.t, ta(2.0 + h), &q, &ctx.branch)?;
        let down = track_eigenvalue_parameter(&ctx.sampler, r.t, ta(2.0 - h), &q, &ctx.branch)?;
        let fd = (up - down) / (2.0 * h);
        tau_err = tau_err.max(((fd - sens.dtau_da) / fd).abs());
    }
    Ok(Outcome::new(
        dt_err < 1e-3 && tau_err < 5e-2,
        format!(
            "dt/da max rel error {dt_err:.1e} at 10 zeros; dtau/da max rel error {tau_err:.1e} at {} roots",
            roots.len().min(3)
        ),
    ))
}

fn pair_correlation(_: &Ctx) -> Result<Outcome> {
    let f = pair_correlation_fraction(0.0, 0.5)?;
    Ok(Outcome::new(
        (f - 0.11315).abs() < 5e-5,
        format!("integral over (0, 1/2) = {f:.12}"),
    ))
}

fn spacing_corollaries(ctx: &Ctx) -> Result<Outcome> {
    let q = QuadratureSpec::default();
    let r = spacing_corollary_scan(&ctx.sampler, 20.0, 60.0, &q, &ctx.branch)?;
    let detected: Vec<_> = r
        .records
        .iter()
        .filter(|x| x.scenario != Scenario::Inconclusive)
        .collect();
    let min_margin = detected.iter().filter_map(|x| x.margin).fold(f64::INFINITY, f64::min);
    let ok = r.violations == 0 && detected.iter().all(|x| x.margin.is_some_and(|m| m > 0.0));
    let rising = detected
        .iter()
        .filter(|x| x.scenario == Scenario::UniqueRisingJZero)
        .count();
    Ok(Outcome::new(
        ok,
        format!(
            "{} pairs: {rising} rising J zero, {} no on-line J zero, {} inconclusive; min margin {min_margin:.3}, envelope at 60 = {:.3}",
            r.records.len(),
            detected.len() - rising,
            r.records.len() - detected.len(),
            spacing_envelope(60.0)
        ),
    ))
}

type Check = fn(&Ctx) -> Result<Outcome>;

fn main() {
    let setup = Instant::now();
    let branch = PhaseBranch::build(200.0).expect("phase branch");
    let mut sampler = ThetaSampler::new(ThetaCombination::single(-7).expect("d = -7"));
    sampler.warm(&QuadratureSpec::default()).expect("warm T = 400");
    sampler.warm(&fine()).expect("warm T = 1600");
    let ctx = Ctx { branch, sampler };
    println!(
        "setup: phase branch to 200, theta_-7 samples to T = 1600 ({:.1}s)",
        setup.elapsed().as_secs_f64()
    );

    let checks: [(u32, &str, u64, Check); 14] = [
        (1, "scattering identities", 10, scattering_identities),
        (2, "residue at s = 1", 5, residue),
        (3, "Heegner identity d = -7", 5, heegner_identity),
        (4, "closed forms vs quadrature", 300, closed_vs_quadrature),
        (5, "kernel calibration", 60, kernel_calibration),
        (6, "functional equation and nonvanishing of G", 600, functional_equation),
        (7, "on-line structure of theta(u)", 300, on_line_structure),
        (8, "exotic eigenfunction identity", 120, exotic_identity),
        (9, "Maass-Selberg norm", 600, maass_selberg),
        (10, "constant-term zero statistics", 300, zero_statistics),
        (11, "interleaving on [15, 40]", 900, interleaving),
        (12, "derivatives of spectral parameters", 600, derivatives),
        (13, "pair correlation", 1, pair_correlation),
        (14, "spacing corollaries on [20, 60]", 1200, spacing_corollaries),
    ];
    let mut failed = 0;
    for (n, name, limit, check) in checks {
        let start = Instant::now();
        let outcome = check(&ctx).unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let pass = outcome.pass && in_time;
        if !pass {
            failed += 1;
        }
        let timing = if in_time {
            String::new()
        } else {
            " (over time limit)".to_string()
        };
        println!(
            "[{}] {n:>2} {name}: {} [{:.2}s / {limit}s]{timing}",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of 14 criteria passed", 14 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
