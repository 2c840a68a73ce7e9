use crate::args::{CacheCommand, Cli, Command, Format};
use crate::cache::{cache_admin, CacheAction};
use crate::error::{CliError, EXIT_INVARIANT, EXIT_NUMERIC, EXIT_OK};
use crate::report::{emit_report, Report, Table};
use crate::selfcheck::selfcheck;
use pseudolap::analysis::{interleave_check, pair_correlation_report, spacing_corollary_scan};
use pseudolap::spectral::ThetaSampler;
use pseudolap::zeros::{
    adjust_truncation_height, constant_term_zeros, eigenvalue_parameters, format_sig15, theta_line_zeros, zeta_zeros,
};
use pseudolap::{Complex64, PhaseBranch, QuadratureSpec, TailMode, ThetaCombination, TruncationHeight};
use serde_json::json;
use std::io::Write;
use std::path::PathBuf;

/// Phase-branch coverage used when a command does not need more.
const BRANCH_FLOOR: f64 = 200.0;

/// Validated settings for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub theta: ThetaCombination,
    pub a: TruncationHeight,
    pub window: (f64, f64),
    pub quadrature: QuadratureSpec,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub cache_dir: PathBuf,
    pub allow_empty: bool,
}

fn parse_disc(spec: &str) -> Result<(i64, f64), CliError> {
    let (d, nu) = match spec.split_once(':') {
        Some((d, nu)) => (d, Some(nu)),
        None => (spec, None),
    };
    let d: i64 = d
        .trim()
        .parse()
        .map_err(|_| CliError::config(format!("bad discriminant in --disc {spec:?}")))?;
    let nu = match nu {
        Some(nu) => nu
            .trim()
            .parse()
            .map_err(|_| CliError::config(format!("bad weight in --disc {spec:?}")))?,
        None => 1.0,
    };
    Ok((d, nu))
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let c = &cli.common;
        let command = cli.command.clone().unwrap_or(Command::Selfcheck);
        let terms = if c.disc.is_empty() {
            vec![(-7, 1.0)]
        } else {
            c.disc.iter().map(|s| parse_disc(s)).collect::<Result<_, _>>()?
        };
        let theta = if c.unit_correction {
            ThetaCombination::with_unit_correction(&terms)?
        } else {
            ThetaCombination::new(&terms)?
        };
        let a = TruncationHeight::new(c.a)?;
        let window = match &c.window {
            Some(w) => (w[0], w[1]),
            None => command.default_window(),
        };
        if !(window.0 > 0.0 && window.0 < window.1 && window.1.is_finite()) {
            return Err(CliError::config(format!(
                "window must satisfy 0 < lo < hi, got {} {}",
                window.0, window.1
            )));
        }
        let quadrature = QuadratureSpec::new(
            c.tmax,
            QuadratureSpec::default().nodes_per_unit,
            c.delta,
            TailMode::InversePowerFit,
        )?;
        if let Some(out) = &c.out {
            let parent = out
                .parent()
                .filter(|p| !p.as_os_str().is_empty())
                .unwrap_or(std::path::Path::new("."));
            if !parent.is_dir() {
                return Err(CliError::config(format!(
                    "output directory {} does not exist",
                    parent.display()
                )));
            }
        }
        let format = c.format.unwrap_or(if command.lists_zeros() {
            Format::Csv
        } else {
            Format::Json
        });
        Ok(Self {
            command,
            theta,
            a,
            window,
            quadrature,
            out: c.out.clone(),
            format,
            cache_dir: c.cache_dir.clone(),
            allow_empty: c.allow_empty,
        })
    }

    fn branch(&self) -> Result<PhaseBranch, CliError> {
        let t_max = BRANCH_FLOOR.max(self.window.1 + 1.0);
        Ok(PhaseBranch::load_or_build(&self.cache_dir, t_max)?)
    }

    fn sampler(&self) -> Result<ThetaSampler, CliError> {
        Ok(ThetaSampler::load_or_warm(
            &self.cache_dir,
            self.theta.clone(),
            &self.quadrature,
        )?)
    }

    fn settings(&self) -> serde_json::Value {
        json!({
            "theta": self.theta.spec(),
            "unit_correction": self.theta.unit_correction(),
            "a": self.a.get(),
            "window": [self.window.0, self.window.1],
            "t_max": self.quadrature.t_max,
            "delta": self.quadrature.delta,
        })
    }
}

fn complex(z: Complex64) -> serde_json::Value {
    json!([z.re, z.im])
}

/// Executes the command, writes its report, and returns the exit status.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = RunConfig::from_cli(cli)?;
    let (lo, hi) = cfg.window;
    let mut status = EXIT_OK;
    let report = match &cfg.command {
        Command::Selfcheck => {
            let branch = cfg.branch()?;
            let sampler = cfg.sampler()?;
            let results = selfcheck(&sampler, &branch, cfg.a, &cfg.quadrature);
            let failed = results.iter().filter(|r| !r.pass).count();
            if failed > 0 {
                status = EXIT_INVARIANT;
            }
            let mut table = Table::new(&["module", "name", "pass", "detail"]);
            for r in &results {
                table.rows.push(vec![
                    r.module.into(),
                    r.name.into(),
                    r.pass.to_string(),
                    r.detail.clone(),
                ]);
            }
            Report {
                command: "selfcheck",
                body: json!({
                    "command": "selfcheck",
                    "settings": cfg.settings(),
                    "passed": results.len() - failed,
                    "failed": failed,
                    "checks": results.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
                }),
                table: Some(table),
                items: results.len(),
            }
        }
        Command::CtZeros => {
            let zeros = constant_term_zeros(cfg.a, lo, hi, &cfg.branch()?)?;
            Report::zeros("ct-zeros", &zeros, json!({ "settings": cfg.settings() }))
        }
        Command::ThetaZeros => {
            let zeros = theta_line_zeros(&cfg.theta, lo, hi, &cfg.branch()?)?;
            Report::zeros("theta-zeros", &zeros, json!({ "settings": cfg.settings() }))
        }
        Command::ZetaZeros => Report::zeros(
            "zeta-zeros",
            &zeta_zeros(lo, hi)?,
            json!({ "settings": cfg.settings() }),
        ),
        Command::Eigen => {
            let branch = cfg.branch()?;
            let sampler = cfg.sampler()?;
            let a = adjust_truncation_height(&cfg.theta, cfg.a, lo, hi, &branch)?;
            let roots = eigenvalue_parameters(&sampler, a, lo, hi, &cfg.quadrature, &branch)?;
            Report::zeros(
                "eigen",
                &roots,
                json!({ "settings": cfg.settings(), "a_used": a.get() }),
            )
        }
        Command::Interleave => {
            let branch = cfg.branch()?;
            let sampler = cfg.sampler()?;
            let a = adjust_truncation_height(&cfg.theta, cfg.a, lo, hi, &branch)?;
            let r = interleave_check(&sampler, a, lo, hi, &cfg.quadrature, &branch)?;
            if !r.violations.is_empty() {
                status = EXIT_INVARIANT;
            }
            let mut table = Table::new(&["index", "gap", "normalized_gap"]);
            for (i, (g, n)) in r.gaps.iter().zip(&r.normalized_gaps).enumerate() {
                table.rows.push(vec![i.to_string(), format_sig15(*g), format_sig15(*n)]);
            }
            Report {
                command: "interleave",
                body: json!({
                    "command": "interleave",
                    "settings": cfg.settings(),
                    "a_used": a.get(),
                    "roots": if r.gaps.is_empty() { 0 } else { r.gaps.len() + 1 },
                    "violations": r.violations.iter().map(|(l, h)| json!({ "lo": l.t, "hi": h.t })).collect::<Vec<_>>(),
                    "gaps": r.gaps,
                    "normalized_gaps": r.normalized_gaps,
                }),
                table: Some(table),
                items: 1,
            }
        }
        Command::Determinant { w } => {
            let w = Complex64::new(w[0], w[1]);
            let v = cfg.sampler()?.determinant_fg(cfg.a, w, &cfg.quadrature)?;
            let route = format!("{:?}", v.route).to_lowercase();
            let mut table = Table::new(&[
                "w_re",
                "w_im",
                "a",
                "f_re",
                "f_im",
                "g_re",
                "g_im",
                "route",
                "tail_estimate",
            ]);
            table.rows.push(
                [w.re, w.im, cfg.a.get(), v.f.re, v.f.im, v.g.re, v.g.im]
                    .iter()
                    .map(|&x| format_sig15(x))
                    .chain([route.clone(), format_sig15(v.tail_estimate)])
                    .collect(),
            );
            Report {
                command: "determinant",
                body: json!({
                    "command": "determinant",
                    "settings": cfg.settings(),
                    "w": complex(w),
                    "f": complex(v.f),
                    "g": complex(v.g),
                    "route": route,
                    "tail_estimate": v.tail_estimate,
                }),
                table: Some(table),
                items: 1,
            }
        }
        Command::PairCorr { alpha, beta } => {
            let r = pair_correlation_report(*alpha, *beta)?;
            let mut table = Table::new(&["alpha", "beta", "fraction", "excluded_share", "max_eigenvalue_share"]);
            table.rows.push(
                [r.alpha, r.beta, r.fraction, r.excluded_share, r.max_eigenvalue_share]
                    .iter()
                    .map(|&x| format_sig15(x))
                    .collect(),
            );
            let mut body = json!({ "command": "pair-corr" });
            body.as_object_mut().expect("object").extend(
                serde_json::to_value(r)
                    .expect("report serialises")
                    .as_object()
                    .cloned()
                    .unwrap_or_default(),
            );
            Report {
                command: "pair-corr",
                body,
                table: Some(table),
                items: 1,
            }
        }
        Command::SpacingScan => {
            let r = spacing_corollary_scan(&cfg.sampler()?, lo, hi, &cfg.quadrature, &cfg.branch()?)?;
            if r.violations > 0 {
                status = EXIT_INVARIANT;
            }
            let opt = |x: Option<f64>| x.map(format_sig15).unwrap_or_default();
            let mut table = Table::new(&[
                "t",
                "t_next",
                "scenario",
                "j_zeros_between",
                "normalized_gap",
                "bound",
                "margin",
                "satisfied",
                "note",
            ]);
            for x in &r.records {
                let scenario = serde_json::to_value(x.scenario).expect("scenario serialises");
                table.rows.push(vec![
                    format_sig15(x.t),
                    format_sig15(x.t_next),
                    scenario.as_str().unwrap_or_default().to_string(),
                    x.j_zeros_between.to_string(),
                    format_sig15(x.normalized_gap),
                    opt(x.bound),
                    opt(x.margin),
                    x.satisfied.map(|b| b.to_string()).unwrap_or_default(),
                    x.note.clone().unwrap_or_default(),
                ]);
            }
            let mut body = json!({ "command": "spacing-scan", "settings": cfg.settings() });
            body.as_object_mut().expect("object").extend(
                serde_json::to_value(&r)
                    .expect("report serialises")
                    .as_object()
                    .cloned()
                    .unwrap_or_default(),
            );
            // the report is emitted even when no pair is classified
            Report {
                command: "spacing-scan",
                body,
                table: Some(table),
                items: 1,
            }
        }
        Command::Cache { action } => {
            let action = match action {
                CacheCommand::Status => CacheAction::Status,
                CacheCommand::Clear => CacheAction::Clear,
                CacheCommand::Warm => CacheAction::Warm,
            };
            let summary = cache_admin(&cfg.cache_dir, action, &cfg.theta, &cfg.quadrature)?;
            if summary.corrupt() > 0 {
                status = EXIT_NUMERIC;
            }
            let mut table = Table::new(&["file", "kind", "count", "detail"]);
            for e in &summary.entries {
                let j = e.to_json();
                let count = j
                    .get("anchors")
                    .or_else(|| j.get("samples"))
                    .map(|v| v.to_string())
                    .unwrap_or_default();
                let detail = j
                    .get("t_max")
                    .or_else(|| j.get("key"))
                    .or_else(|| j.get("reason"))
                    .map(|v| v.as_str().map(String::from).unwrap_or_else(|| v.to_string()))
                    .unwrap_or_default();
                table.rows.push(vec![
                    j["file"].as_str().unwrap_or_default().to_string(),
                    j["kind"].as_str().unwrap_or_default().to_string(),
                    count,
                    detail,
                ]);
            }
            Report {
                command: "cache",
                body: summary.to_json(),
                table: Some(table),
                items: 1,
            }
        }
    };
    emit_report(&report, cfg.format, cfg.allow_empty, cfg.out.as_deref(), stdout)?;
    Ok(status)
}
