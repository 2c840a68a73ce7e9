use super::QuadratureSpec;
use crate::heegner::theta_coefficient;
use crate::specialfns::scattering_c;
use crate::{Error, Result, ThetaCombination};
use num_complex::Complex64;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

pub const THETA_CACHE_MAGIC: &[u8; 8] = b"THCF0001";

/// θE_s and c_s on the critical line with a table of precomputed grid samples.
///
/// The table is filled by [`ThetaSampler::warm`] or loaded from disk; lookups
/// are exact on the float bits of t, anything else is evaluated on demand.
#[derive(Debug, Clone)]
pub struct ThetaSampler {
    theta: ThetaCombination,
    values: HashMap<u64, Sample>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Sample {
    theta_e: Complex64,
    c: Complex64,
}

fn sample_at(theta: &ThetaCombination, t: f64) -> Result<Sample> {
    let s = Complex64::new(0.5, t);
    Ok(Sample {
        theta_e: theta_coefficient(theta, s)?,
        c: scattering_c(s)?,
    })
}

impl ThetaSampler {
    pub fn new(theta: ThetaCombination) -> Self {
        Self {
            theta,
            values: HashMap::new(),
        }
    }

    pub fn theta(&self) -> &ThetaCombination {
        &self.theta
    }

    /// Number of cached samples.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Evaluates and stores θE and c on the base grid of `q`; returns the number of new samples.
    pub fn warm(&mut self, q: &QuadratureSpec) -> Result<usize> {
        let todo: Vec<f64> = q
            .base_nodes()
            .into_iter()
            .filter(|t| !self.values.contains_key(&t.to_bits()))
            .collect();
        let theta = &self.theta;
        let computed = todo
            .par_iter()
            .map(|&t| Ok((t, sample_at(theta, t)?)))
            .collect::<Result<Vec<_>>>()?;
        let n = computed.len();
        for (t, v) in computed {
            self.values.insert(t.to_bits(), v);
        }
        Ok(n)
    }

    /// θE at s = ½ + it; negative t uses θE(½ − it) = conj θE(½ + it).
    pub fn line_value(&self, t: f64) -> Result<Complex64> {
        if t < 0.0 {
            return Ok(self.line_value(-t)?.conj());
        }
        match self.values.get(&t.to_bits()) {
            Some(v) => Ok(v.theta_e),
            None => theta_coefficient(&self.theta, Complex64::new(0.5, t)),
        }
    }

    /// c at s = ½ + it; negative t uses c_{½−it} = conj c_{½+it}.
    pub fn line_scattering(&self, t: f64) -> Result<Complex64> {
        if t < 0.0 {
            return Ok(self.line_scattering(-t)?.conj());
        }
        match self.values.get(&t.to_bits()) {
            Some(v) => Ok(v.c),
            None => scattering_c(Complex64::new(0.5, t)),
        }
    }

    /// θE_s at arbitrary s.
    pub fn value(&self, s: Complex64) -> Result<Complex64> {
        if s.re == 0.5 {
            self.line_value(s.im)
        } else {
            theta_coefficient(&self.theta, s)
        }
    }

    /// SHA-256 over the (d, ν) list, the unit-correction flag and the grid parameters.
    pub fn cache_key(theta: &ThetaCombination, q: &QuadratureSpec) -> [u8; 32] {
        let mut spec = theta.spec();
        spec.sort_by_key(|a| a.0);
        let mut h = Sha256::new();
        for (d, nu) in spec {
            h.update(d.to_le_bytes());
            h.update(nu.to_bits().to_le_bytes());
        }
        h.update([theta.unit_correction() as u8]);
        h.update(q.t_max.to_bits().to_le_bytes());
        h.update((q.nodes_per_unit as u64).to_le_bytes());
        h.finalize().into()
    }

    pub fn cache_path(dir: &Path, theta: &ThetaCombination, q: &QuadratureSpec) -> PathBuf {
        let key = Self::cache_key(theta, q);
        let hex: String = key[..8].iter().map(|b| format!("{b:02x}")).collect();
        dir.join(format!("theta_{hex}.thcf"))
    }

    /// Magic, key, sample count, then (t, Re θE, Im θE, Re c, Im c) little-endian in increasing t.
    pub fn write_to<W: Write>(&self, mut w: W, q: &QuadratureSpec) -> Result<()> {
        let mut rows: Vec<(f64, Sample)> = self.values.iter().map(|(k, v)| (f64::from_bits(*k), *v)).collect();
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        w.write_all(THETA_CACHE_MAGIC)?;
        w.write_all(&Self::cache_key(&self.theta, q))?;
        w.write_all(&(rows.len() as u64).to_le_bytes())?;
        for (t, v) in rows {
            for x in [t, v.theta_e.re, v.theta_e.im, v.c.re, v.c.im] {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        Ok(())
    }

    /// Key and sample count from the header of a cache file.
    pub fn read_header<R: Read>(mut r: R) -> Result<([u8; 32], usize)> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)
            .map_err(|_| Error::Cache("truncated header".into()))?;
        if &magic != THETA_CACHE_MAGIC {
            return Err(Error::Cache("bad magic, not a theta sample cache".into()));
        }
        let mut key = [0u8; 32];
        r.read_exact(&mut key)
            .map_err(|_| Error::Cache("truncated header".into()))?;
        let mut word = [0u8; 8];
        r.read_exact(&mut word)
            .map_err(|_| Error::Cache("truncated header".into()))?;
        Ok((key, u64::from_le_bytes(word) as usize))
    }

    pub fn read_from<R: Read>(mut r: R, theta: ThetaCombination, q: &QuadratureSpec) -> Result<Self> {
        let (key, count) = Self::read_header(&mut r)?;
        if key != Self::cache_key(&theta, q) {
            return Err(Error::Cache("cache key does not match theta and grid".into()));
        }
        let mut values = HashMap::with_capacity(count);
        let mut row = [0u8; 40];
        for _ in 0..count {
            r.read_exact(&mut row)
                .map_err(|_| Error::Cache("truncated sample table".into()))?;
            let f = |i: usize| f64::from_le_bytes(row[8 * i..8 * i + 8].try_into().expect("8-byte slice"));
            let t = f(0);
            if !(t > 0.0 && (0..5).all(|i| f(i).is_finite())) {
                return Err(Error::Cache(format!("invalid sample row at t = {t}")));
            }
            let sample = Sample {
                theta_e: Complex64::new(f(1), f(2)),
                c: Complex64::new(f(3), f(4)),
            };
            values.insert(t.to_bits(), sample);
        }
        Ok(Self { theta, values })
    }

    pub fn save(&self, path: &Path, q: &QuadratureSpec) -> Result<()> {
        let tmp = path.with_extension("tmp");
        let mut buf = Vec::with_capacity(48 + 40 * self.values.len());
        self.write_to(&mut buf, q)?;
        std::fs::write(&tmp, buf)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path, theta: ThetaCombination, q: &QuadratureSpec) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        Self::read_from(&bytes[..], theta, q)
    }

    /// Loads the cache for (θ, grid) from `dir`, or warms and saves it.
    pub fn load_or_warm(dir: &Path, theta: ThetaCombination, q: &QuadratureSpec) -> Result<Self> {
        let path = Self::cache_path(dir, &theta, q);
        if path.exists() {
            return Self::load(&path, theta, q);
        }
        let mut s = Self::new(theta);
        s.warm(q)?;
        std::fs::create_dir_all(dir)?;
        s.save(&path, q)?;
        Ok(s)
    }
}
