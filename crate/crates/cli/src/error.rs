use pseudolap::Error;
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            kind: "config",
            message: message.into(),
            exit_code: EXIT_CONFIG,
        }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        Self {
            kind: "numeric",
            message: message.into(),
            exit_code: EXIT_NUMERIC,
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": { "kind": self.kind, "message": self.message, "exit_code": self.exit_code } }).to_string()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (kind, exit_code) = match e {
            Error::Interleaving { .. } | Error::Realness(_) | Error::BranchGap(_) => ("invariant", EXIT_INVARIANT),
            Error::NotFundamental(_)
            | Error::UnitCorrection(_)
            | Error::Domain(_)
            | Error::BranchCoverage { .. }
            | Error::HeightCollision(_) => ("config", EXIT_CONFIG),
            Error::Cache(_) => ("cache", EXIT_NUMERIC),
            Error::Io(_) => ("io", EXIT_NUMERIC),
            Error::Pole { .. } | Error::NearLine(_) | Error::UnresolvedTail(_) | Error::Degenerate(_) => {
                ("numeric", EXIT_NUMERIC)
            }
        };
        Self {
            kind,
            message: e.to_string(),
            exit_code,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self {
            kind: "io",
            message: e.to_string(),
            exit_code: EXIT_NUMERIC,
        }
    }
}
