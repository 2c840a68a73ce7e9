use pseudolap::analysis::{dt_da, interval_counts, pair_correlation_fraction, spacing_corollary_scan};
use pseudolap::eisenstein::{eisenstein_value, maass_selberg_norm};
use pseudolap::heegner::{class_number, heegner_set};
use pseudolap::specialfns::{dirichlet_l, riemann_zeta, scattering_c, scattering_c_xi, xi_completed};
use pseudolap::spectral::{kernel_pairing, theta_v_closed, ThetaSampler};
use pseudolap::zeros::{
    adjust_truncation_height, constant_term_phase, constant_term_zeros, rotated_theta, zeta_zeros, REALNESS_TOL,
};
use pseudolap::{
    Complex64, FundamentalDiscriminant, PhaseBranch, QuadratureSpec, Result, TruncationHeight, UpperHalfPoint,
};
use serde_json::{json, Value};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub module: &'static str,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn to_json(&self) -> Value {
        json!({ "module": self.module, "name": self.name, "pass": self.pass, "detail": self.detail })
    }
}

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

type Outcome = Result<(bool, String)>;

struct Env<'a> {
    sampler: &'a ThetaSampler,
    branch: &'a PhaseBranch,
    a: TruncationHeight,
    q: &'a QuadratureSpec,
}

fn grid() -> Vec<Complex64> {
    (0..25)
        .map(|k| cx(0.15 + 0.15 * (k % 5) as f64, 0.9 + 4.3 * (k / 5) as f64))
        .collect()
}

fn scattering_reflection(_: &Env) -> Outcome {
    let mut worst = 0.0f64;
    for s in grid() {
        worst = worst.max((scattering_c(s)? * scattering_c(1.0 - s)? - 1.0).norm());
    }
    Ok((worst < 1e-10, format!("max |c_s c_(1-s) - 1| = {worst:.1e}")))
}

fn xi_symmetry(_: &Env) -> Outcome {
    let mut worst = 0.0f64;
    for s in grid() {
        worst = worst.max(rel(xi_completed(1.0 - s)?, xi_completed(s)?));
    }
    Ok((worst < 1e-10, format!("max relative asymmetry {worst:.1e}")))
}

fn scattering_forms_agree(_: &Env) -> Outcome {
    let mut worst = 0.0f64;
    for s in grid() {
        worst = worst.max(rel(scattering_c(s)?, scattering_c_xi(s)?));
    }
    Ok((worst < 1e-9, format!("max relative difference {worst:.1e}")))
}

fn phase_matches_scattering(env: &Env) -> Outcome {
    let mut worst = 0.0f64;
    for t in [1.0, 5.0, 20.0, 100.0] {
        if t > env.branch.t_max() {
            continue;
        }
        let c = scattering_c(cx(0.5, t))?;
        worst = worst.max((c - Complex64::from_polar(1.0, -2.0 * env.branch.psi(t)?)).norm());
    }
    Ok((worst < 1e-10, format!("max |c - exp(-2i psi)| = {worst:.1e}")))
}

fn phase_increasing(env: &Env) -> Outcome {
    let hi = env.branch.t_max().min(200.0);
    let mut min = f64::INFINITY;
    let mut t = 10.0;
    while t <= hi {
        min = min.min(env.branch.psi_prime(t)?);
        t += 0.5;
    }
    Ok((min > 0.0, format!("min psi' on [10, {hi}] = {min:.4}")))
}

fn class_numbers(_: &Env) -> Outcome {
    let table = [
        (-3, 1),
        (-4, 1),
        (-7, 1),
        (-8, 1),
        (-15, 2),
        (-20, 2),
        (-23, 3),
        (-47, 5),
        (-71, 7),
        (-104, 6),
    ];
    let mut bad = Vec::new();
    for (d, h) in table {
        if class_number(FundamentalDiscriminant::new(d)?) != h {
            bad.push(d);
        }
    }
    Ok((
        bad.is_empty(),
        if bad.is_empty() {
            "10 discriminants".into()
        } else {
            format!("mismatch at {bad:?}")
        },
    ))
}

fn heegner_points_reduced(_: &Env) -> Outcome {
    let mut count = 0;
    for d in [-3, -4, -7, -15, -23, -47, -71, -104] {
        for p in heegner_set(FundamentalDiscriminant::new(d)?).points {
            if !p.in_fundamental_domain() {
                return Ok((false, format!("d = {d}: ({}, {}) outside", p.x, p.y)));
            }
            count += 1;
        }
    }
    Ok((true, format!("{count} points")))
}

fn residue_at_one(_: &Env) -> Outcome {
    let h = 1e-6;
    let r = (eisenstein_value(UpperHalfPoint::new(0.0, 1.0)?, cx(1.0 + h, 0.0))? * h).re;
    let err = (r - 3.0 / PI).abs();
    Ok((err < 1e-4, format!("(s-1)E_s(i) at s = 1 + 1e-6: error {err:.1e}")))
}

fn heegner_identity(_: &Env) -> Outcome {
    let s = cx(2.5, 0.0);
    let mut lhs = cx(0.0, 0.0);
    for z in heegner_set(FundamentalDiscriminant::new(-7)?).points {
        lhs += eisenstein_value(z, s)?;
    }
    let rhs = (s * (7f64.sqrt() / 2.0).ln()).exp() * riemann_zeta(s)? * dirichlet_l(s, -7)? / riemann_zeta(s * 2.0)?;
    let err = (lhs - rhs).norm();
    Ok((err < 1e-7, format!("d = -7, s = 2.5: error {err:.1e}")))
}

fn eisenstein_functional_equation(_: &Env) -> Outcome {
    let z = UpperHalfPoint::new(0.2, 1.3)?;
    let s = cx(0.7, 3.0);
    let err = rel(
        eisenstein_value(z, s)?,
        scattering_c(s)? * eisenstein_value(z, 1.0 - s)?,
    );
    Ok((err < 1e-7, format!("relative error {err:.1e}")))
}

fn maass_selberg_positive(env: &Env) -> Outcome {
    let hi = env.branch.t_max().min(50.0);
    let zeros = constant_term_zeros(env.a, 0.5, hi, env.branch)?;
    let mut min = f64::INFINITY;
    for z in &zeros {
        min = min.min(maass_selberg_norm(z.t, env.a, env.branch)?);
    }
    Ok((min > 0.0, format!("min over {} zeros = {min:.4}", zeros.len())))
}

fn kernel_calibration(env: &Env) -> Outcome {
    let one = |_: f64| Ok(cx(1.0, 0.0));
    let mut worst = 0.0f64;
    for w in [cx(0.8, 2.0), cx(0.6, -7.5), cx(1.4, 12.0)] {
        let r = kernel_pairing(&one, &one, cx(0.0, 0.0), w, env.q)?;
        worst = worst.max((r.value - 1.0 / (2.0 * (2.0 * w - 1.0))).norm());
    }
    Ok((worst < 1e-6, format!("max error {worst:.1e}")))
}

fn reciprocity(env: &Env) -> Outcome {
    let (w, a) = (cx(0.8, 2.0), TruncationHeight::new(3.0)?);
    let closed = theta_v_closed(env.sampler.theta(), w, a)?;
    let eu = env.sampler.eta_u(w, a, env.q)?.value;
    let tv = env.sampler.theta_v(w, a, env.q)?.value;
    let err = (eu - closed).norm().max((tv - closed).norm());
    Ok((err < 1e-5, format!("w = 0.8+2i, a = 3: max error {err:.1e}")))
}

fn on_line_imaginary_part(env: &Env) -> Outcome {
    let tau = 9.0;
    let limit = env.sampler.theta_u_line_limit(tau, env.q)?;
    let err = (limit.im + env.sampler.line_value(tau)?.norm_sqr() / (4.0 * tau)).abs();
    let re_err = (limit.re - env.sampler.j_online(tau, env.q)?).abs();
    Ok((
        err < 1e-4 && re_err < 1e-4,
        format!("tau = 9: imaginary part {err:.1e}, real part vs J {re_err:.1e}"),
    ))
}

fn constant_term_records(env: &Env) -> Outcome {
    let hi = env.branch.t_max().min(50.0);
    let zeros = constant_term_zeros(env.a, 10.0, hi, env.branch)?;
    let ok_records = zeros
        .iter()
        .all(|z| z.residual < 1e-8 && z.bracket.0 <= z.t && z.t <= z.bracket.1);
    let phase = |t| constant_term_phase(t, env.a, env.branch);
    let expected = ((phase(hi)? / PI - 0.5).floor() - (phase(10.0)? / PI - 0.5).floor()) as usize;
    Ok((
        ok_records && zeros.len() == expected,
        format!(
            "{} zeros on [10, {hi}], phase increment predicts {expected}",
            zeros.len()
        ),
    ))
}

fn zeta_zero_count(_: &Env) -> Outcome {
    let zeros = zeta_zeros(1.0, 100.0)?;
    let first = zeros.first().map(|z| z.t).unwrap_or(f64::NAN);
    Ok((
        zeros.len() == 29 && (first - 14.1347).abs() < 1e-3,
        format!("{} zeros on [1, 100], first {first:.6}", zeros.len()),
    ))
}

fn theta_realness(env: &Env) -> Outcome {
    let hi = env.branch.t_max().min(60.0);
    let mut worst = 0.0f64;
    for k in 0..200 {
        let t = 0.5 + (hi - 0.5) * k as f64 / 199.0;
        let rotated = rotated_theta(env.sampler.theta(), t, env.branch)?;
        worst = worst.max(rotated.im.abs() / rotated.norm().max(1.0));
    }
    Ok((
        worst < REALNESS_TOL,
        format!("max |Im Z| = {worst:.1e} over 200 points"),
    ))
}

fn interleaving(env: &Env) -> Outcome {
    let a = adjust_truncation_height(env.sampler.theta(), env.a, 15.0, 25.0, env.branch)?;
    let counts = interval_counts(env.sampler, a, 15.0, 25.0, env.q, env.branch)?;
    let bad = counts.iter().filter(|&&c| c != 1).count();
    Ok((
        bad == 0,
        format!(
            "{} intervals on [15, 25] at a = {}, {bad} violations",
            counts.len(),
            a.get()
        ),
    ))
}

fn pair_correlation(_: &Env) -> Outcome {
    let f = pair_correlation_fraction(0.0, 0.5)?;
    Ok(((f - 0.11315).abs() < 5e-5, format!("{f:.12}")))
}

fn zeros_move_down(env: &Env) -> Outcome {
    let hi = env.branch.t_max().min(50.0);
    let zeros = constant_term_zeros(env.a, 10.0, hi, env.branch)?;
    for z in &zeros {
        if dt_da(z.t, env.a, env.branch)? >= 0.0 {
            return Ok((false, format!("dt/da >= 0 at t = {}", z.t)));
        }
    }
    Ok((true, format!("dt/da < 0 at {} zeros", zeros.len())))
}

fn spacing_scan(env: &Env) -> Outcome {
    let r = spacing_corollary_scan(env.sampler, 20.0, 30.0, env.q, env.branch)?;
    Ok((
        r.violations == 0,
        format!("{} pairs on [20, 30], {} violations", r.records.len(), r.violations),
    ))
}

type Check = (&'static str, &'static str, fn(&Env) -> Outcome);

const CHECKS: &[Check] = &[
    ("specialfns", "scattering reflection", scattering_reflection),
    ("specialfns", "xi symmetry", xi_symmetry),
    ("specialfns", "scattering forms agree", scattering_forms_agree),
    ("specialfns", "phase matches scattering", phase_matches_scattering),
    ("specialfns", "phase increasing above 10", phase_increasing),
    ("heegner", "class numbers", class_numbers),
    ("heegner", "Heegner points reduced", heegner_points_reduced),
    ("eisenstein", "residue at s = 1", residue_at_one),
    ("eisenstein", "Heegner identity", heegner_identity),
    ("eisenstein", "functional equation", eisenstein_functional_equation),
    ("eisenstein", "Maass-Selberg positivity", maass_selberg_positive),
    ("spectral", "kernel calibration", kernel_calibration),
    ("spectral", "reciprocity", reciprocity),
    ("spectral", "on-line structure", on_line_imaginary_part),
    ("zeros", "constant-term records", constant_term_records),
    ("zeros", "zeta zero count", zeta_zero_count),
    ("zeros", "theta realness", theta_realness),
    ("zeros", "interleaving", interleaving),
    ("analysis", "pair correlation", pair_correlation),
    ("analysis", "dt/da sign", zeros_move_down),
    ("analysis", "spacing scan", spacing_scan),
];

/// Runs every invariant check; errors count as failures.
pub fn selfcheck(
    sampler: &ThetaSampler,
    branch: &PhaseBranch,
    a: TruncationHeight,
    q: &QuadratureSpec,
) -> Vec<CheckResult> {
    let env = Env { sampler, branch, a, q };
    CHECKS
        .iter()
        .map(|&(module, name, check)| {
            let (pass, detail) = check(&env).unwrap_or_else(|e| (false, format!("error: {e}")));
            log::info!("{module}/{name}: {pass} ({detail})");
            CheckResult {
                module,
                name,
                pass,
                detail,
            }
        })
        .collect()
}
