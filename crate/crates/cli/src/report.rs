//! JSON verification report.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

/// First 64 bits of SHA-256 over the canonical JSON form, as 16 hex digits.
pub fn digest(value: &serde_json::Value) -> String {
    digest_bytes(value.to_string().as_bytes())
}

pub fn digest_bytes(bytes: &[u8]) -> String {
    let h = Sha256::digest(bytes);
    h[..8].iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    /// `suite/index/label`.
    pub id: String,
    pub inputs_digest: String,
    /// `[re, im]`; absent when the evaluation failed.
    pub lhs: Option<[f64; 2]>,
    pub rhs: Option<[f64; 2]>,
    pub residual: Option<f64>,
    pub tolerance: f64,
    /// Truncation and quadrature slack in the units of `residual`.
    pub tail_bound: f64,
    pub wall_time_ms: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub id: String,
    pub corpus_size: usize,
    pub corpus_digest: String,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub config: RunConfig,
    pub suites: Vec<SuiteSummary>,
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub fn new(config: RunConfig, suites: Vec<SuiteSummary>, records: Vec<Record>) -> Report {
        let passed = records.iter().filter(|r| r.pass).count();
        Report {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            suites,
            summary: Summary {
                total: records.len(),
                passed,
                failed: records.len() - passed,
            },
            records,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }
}
