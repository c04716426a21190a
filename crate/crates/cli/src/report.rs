//! Versioned JSON report shared by every subcommand.

use crate::config::RunConfig;
use da3_core::damap::sha256_hex;
use serde::Serialize;

pub const SCHEMA: &str = "da3/report/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Infeasible,
}

impl Status {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    /// 0 pass, 1 a check failed, 2 infeasible parameters.
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Infeasible => 2,
        }
    }
}

/// Outcome for one k of a sweep.
#[derive(Clone, Debug, Serialize)]
pub struct Entry {
    pub k: u32,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub result: serde_json::Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: &'static str,
    /// Plain name of the claim the command checks.
    pub anchor: &'static str,
    /// SHA-256 of the command name and the resolved config.
    pub param_hash: String,
    pub config: RunConfig,
    pub status: Status,
    pub smallest_feasible_k: Option<u32>,
    pub entries: Vec<Entry>,
}

impl Report {
    pub fn new(command: &'static str, anchor: &'static str, config: RunConfig, entries: Vec<Entry>) -> Self {
        let echo = serde_json::to_string(&config).expect("config serializes");
        let status = if entries.iter().any(|e| e.status == Status::Fail) {
            Status::Fail
        } else if entries.iter().any(|e| e.status == Status::Pass) {
            Status::Pass
        } else {
            Status::Infeasible
        };
        Report {
            schema: SCHEMA,
            command,
            anchor,
            param_hash: sha256_hex(&format!("{command}\n{echo}")),
            smallest_feasible_k: entries.iter().find(|e| e.status != Status::Infeasible).map(|e| e.k),
            config,
            status,
            entries,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn exit_code(&self) -> u8 {
        self.status.exit_code()
    }
}
