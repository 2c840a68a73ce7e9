use crate::error::CliError;
use pseudolap::specialfns::PSI_MAGIC;
use pseudolap::spectral::{ThetaSampler, THETA_CACHE_MAGIC};
use pseudolap::{PhaseBranch, QuadratureSpec, ThetaCombination};
use serde_json::{json, Value};
use std::io::Read;
use std::path::Path;

/// Coverage of the phase branch built by `cache warm`.
pub const WARM_BRANCH_TO: f64 = 200.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheAction {
    Status,
    Clear,
    Warm,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CacheEntry {
    Branch { file: String, anchors: usize, t_max: f64 },
    Samples { file: String, samples: usize, key: String },
    Corrupt { file: String, reason: String },
}

impl CacheEntry {
    pub fn to_json(&self) -> Value {
        match self {
            CacheEntry::Branch { file, anchors, t_max } => {
                json!({ "file": file, "kind": "phase_branch", "anchors": anchors, "t_max": t_max })
            }
            CacheEntry::Samples { file, samples, key } => {
                json!({ "file": file, "kind": "theta_samples", "samples": samples, "key": key })
            }
            CacheEntry::Corrupt { file, reason } => json!({ "file": file, "kind": "corrupt", "reason": reason }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CacheSummary {
    pub action: CacheAction,
    pub dir: String,
    pub entries: Vec<CacheEntry>,
    pub removed: usize,
}

impl CacheSummary {
    pub fn corrupt(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| matches!(e, CacheEntry::Corrupt { .. }))
            .count()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": "cache",
            "action": format!("{:?}", self.action).to_lowercase(),
            "dir": self.dir,
            "removed": self.removed,
            "entries": self.entries.iter().map(CacheEntry::to_json).collect::<Vec<_>>(),
        })
    }
}

fn is_cache_file(path: &Path) -> bool {
    matches!(path.extension().and_then(|e| e.to_str()), Some("psibr" | "thcf"))
}

fn inspect(path: &Path) -> CacheEntry {
    let file = path
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_default();
    let corrupt = |reason: String| CacheEntry::Corrupt {
        file: file.clone(),
        reason,
    };
    let mut magic = [0u8; 8];
    let read = std::fs::File::open(path).and_then(|mut f| f.read_exact(&mut magic));
    if let Err(e) = read {
        return corrupt(format!("unreadable header: {e}"));
    }
    if &magic == PSI_MAGIC {
        match PhaseBranch::load(path) {
            Ok(b) => CacheEntry::Branch {
                file,
                anchors: b.anchors().len(),
                t_max: b.t_max(),
            },
            Err(e) => corrupt(e.to_string()),
        }
    } else if &magic == THETA_CACHE_MAGIC {
        let header = std::fs::File::open(path)
            .map_err(pseudolap::Error::from)
            .and_then(ThetaSampler::read_header);
        match header {
            Ok((key, samples)) => {
                let key = key[..8].iter().map(|b| format!("{b:02x}")).collect();
                CacheEntry::Samples { file, samples, key }
            }
            Err(e) => corrupt(e.to_string()),
        }
    } else {
        corrupt("bad magic".into())
    }
}

fn cache_files(dir: &Path) -> Result<Vec<std::path::PathBuf>, CliError> {
    if !dir.exists() {
        return Ok(Vec::new());
    }
    let mut files: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && is_cache_file(p))
        .collect();
    files.sort();
    Ok(files)
}

/// Status lists every cache file with its header contents; clear removes them;
/// warm builds the phase branch to t = 200 and the θE samples of `theta` on `q`.
pub fn cache_admin(
    dir: &Path,
    action: CacheAction,
    theta: &ThetaCombination,
    q: &QuadratureSpec,
) -> Result<CacheSummary, CliError> {
    let mut removed = 0;
    match action {
        CacheAction::Status => {}
        CacheAction::Clear => {
            for f in cache_files(dir)? {
                std::fs::remove_file(f)?;
                removed += 1;
            }
        }
        CacheAction::Warm => {
            PhaseBranch::load_or_build(dir, WARM_BRANCH_TO)?;
            ThetaSampler::load_or_warm(dir, theta.clone(), q)?;
        }
    }
    let entries = cache_files(dir)?.iter().map(|p| inspect(p)).collect();
    Ok(CacheSummary {
        action,
        dir: dir.display().to_string(),
        entries,
        removed,
    })
}
