use super::{gamma::log_gamma, zeta::riemann_zeta};
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};
use std::io::{Read, Write};
use std::path::Path;

pub const PSI_MAGIC: &[u8; 8] = b"PSIBR001";
const ANCHOR_START: f64 = 0.5;
const ANCHOR_STEP: f64 = 0.05;
const BRANCH_FILE: &str = "psi_branch.psibr";

fn smooth_part(t: f64) -> Result<f64> {
    Ok(-t * PI.ln() + log_gamma(Complex64::new(0.5, t))?.im)
}

fn arg_zeta(t: f64) -> Result<f64> {
    Ok(riemann_zeta(Complex64::new(1.0, 2.0 * t))?.arg())
}

/// −t log π + Im log Γ(½+it) + Arg ζ(1+2it) with the principal argument of ζ.
pub fn psi_principal(t: f64) -> Result<f64> {
    Ok(smooth_part(t)? + arg_zeta(t)?)
}

/// Anchors of the continuous phase ψ(t) = arg ξ(1+2it).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseBranch {
    anchors: Vec<(f64, f64)>,
    h: f64,
}

impl PhaseBranch {
    /// Anchors every 0.05 from t = 0.5 up to at least `t_max`.
    pub fn build(t_max: f64) -> Result<Self> {
        if !(t_max >= ANCHOR_START) {
            return Err(Error::Domain(format!("branch must reach t = {ANCHOR_START}")));
        }
        let count = ((t_max - ANCHOR_START) / ANCHOR_STEP - 1e-9).ceil() as usize + 1;
        let mut anchors = Vec::with_capacity(count);
        let mut prev_arg = 0.0;
        for k in 0..count {
            let t = ANCHOR_START + k as f64 * ANCHOR_STEP;
            let raw = arg_zeta(t)?;
            let arg = if k == 0 {
                raw
            } else {
                raw + TAU * ((prev_arg - raw) / TAU).round()
            };
            prev_arg = arg;
            anchors.push((t, smooth_part(t)? + arg));
        }
        Self::from_anchors(anchors, ANCHOR_STEP)
    }

    /// Validates t strictly increasing, t > 0 and |Δψ| < π/2.
    pub fn from_anchors(anchors: Vec<(f64, f64)>, h: f64) -> Result<Self> {
        if anchors.is_empty() {
            return Err(Error::Cache("phase branch has no anchors".into()));
        }
        if !(anchors[0].0 > 0.0) || anchors.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err(Error::Cache("phase branch anchors must be finite with t > 0".into()));
        }
        for w in anchors.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Cache("phase branch ordinates not increasing".into()));
            }
            if (w[1].1 - w[0].1).abs() >= PI / 2.0 {
                return Err(Error::BranchGap(w[1].0));
            }
        }
        Ok(Self { anchors, h })
    }

    pub fn anchors(&self) -> &[(f64, f64)] {
        &self.anchors
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn t_max(&self) -> f64 {
        self.anchors[self.anchors.len() - 1].0
    }

    fn nearest(&self, t: f64) -> (f64, f64) {
        let i = self.anchors.partition_point(|p| p.0 < t);
        if i == 0 {
            return self.anchors[0];
        }
        if i == self.anchors.len() {
            return self.anchors[i - 1];
        }
        let (a, b) = (self.anchors[i - 1], self.anchors[i]);
        if t - a.0 <= b.0 - t {
            a
        } else {
            b
        }
    }

    /// ψ(t), continuous, for 0 < t ≤ t_max.
    pub fn psi(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || t > self.t_max() + 1e-9 {
            return Err(Error::BranchCoverage { t, t_max: self.t_max() });
        }
        let (ta, pa) = self.nearest(t);
        let ref_arg = pa - smooth_part(ta)?;
        let raw = arg_zeta(t)?;
        let arg = raw + TAU * ((ref_arg - raw) / TAU).round();
        Ok(smooth_part(t)? + arg)
    }

    /// ψ′(t) from a five-point central difference of ψ.
    pub fn psi_prime(&self, t: f64) -> Result<f64> {
        let h = if t > 0.02 { 0.005 } else { t / 4.0 };
        let hi = self.t_max();
        // one-sided stencil at the top of the coverage
        if t + 2.0 * h > hi + 1e-9 {
            let f: Vec<f64> = (0..5).map(|k| self.psi(t - k as f64 * h)).collect::<Result<_>>()?;
            return Ok((25.0 * f[0] - 48.0 * f[1] + 36.0 * f[2] - 16.0 * f[3] + 3.0 * f[4]) / (12.0 * h));
        }
        let p2 = self.psi(t + 2.0 * h)?;
        let p1 = self.psi(t + h)?;
        let m1 = self.psi(t - h)?;
        let m2 = self.psi(t - 2.0 * h)?;
        Ok((-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h))
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(PSI_MAGIC)?;
        for &(t, p) in &self.anchors {
            w.write_all(&t.to_le_bytes())?;
            w.write_all(&p.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a PSIBR001 file. The whole payload is checked before anything is returned.
    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() < 8 || &bytes[..8] != PSI_MAGIC {
            return Err(Error::Cache("bad magic in phase branch file".into()));
        }
        let body = &bytes[8..];
        if body.is_empty() || body.len() % 16 != 0 {
            return Err(Error::Cache("truncated phase branch file".into()));
        }
        let anchors: Vec<(f64, f64)> = body
            .chunks_exact(16)
            .map(|c| {
                let t = f64::from_le_bytes(c[..8].try_into().unwrap());
                let p = f64::from_le_bytes(c[8..].try_into().unwrap());
                (t, p)
            })
            .collect();
        let h = if anchors.len() > 1 {
            anchors[1].0 - anchors[0].0
        } else {
            ANCHOR_STEP
        };
        Self::from_anchors(anchors, h)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        let mut buf = Vec::with_capacity(8 + 16 * self.anchors.len());
        self.write_to(&mut buf)?;
        std::fs::write(&tmp, buf)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(std::fs::File::open(path)?)
    }

    pub fn cache_path(dir: &Path) -> std::path::PathBuf {
        dir.join(BRANCH_FILE)
    }

    /// Loads the cached branch in `dir` if it reaches `t_max`, otherwise builds and stores one.
    pub fn load_or_build(dir: &Path, t_max: f64) -> Result<Self> {
        let path = Self::cache_path(dir);
        if path.exists() {
            let branch = Self::load(&path)?;
            if branch.t_max() >= t_max {
                return Ok(branch);
            }
        }
        let branch = Self::build(t_max)?;
        std::fs::create_dir_all(dir)?;
        branch.save(&path)?;
        Ok(branch)
    }
}

/// (ψ(t), ψ′(t)).
pub fn psi_and_derivative(t: f64, branch: &PhaseBranch) -> Result<(f64, f64)> {
    Ok((branch.psi(t)?, branch.psi_prime(t)?))
}
