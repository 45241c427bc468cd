//! JSON run reports.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::certificate::Outcome;
use crate::scalar::Scalar;

pub const SCHEMA: u32 = 1;

/// Hex SHA-256 over the little-endian `f64` bytes of `v`.
pub fn digest<F: Scalar>(v: &[F]) -> String {
    let mut h = Sha256::new();
    for x in v {
        h.update(x.f64().to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerifyResult {
    pub ok: bool,
    /// Failed checks, empty when `ok`.
    pub failures: Vec<String>,
    /// Exact optimum when the oracle ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_opt: Option<f64>,
    /// `objective / OPT - 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_feasible: Option<bool>,
}

impl VerifyResult {
    pub fn check(&mut self, what: &str, r: std::result::Result<(), impl std::fmt::Display>) {
        if let Err(e) = r {
            self.failures.push(format!("{what}: {e}"));
        }
    }

    pub fn require(&mut self, cond: bool, msg: impl FnOnce() -> String) {
        if !cond {
            self.failures.push(msg());
        }
    }

    pub fn finish(mut self) -> Self {
        self.ok = self.failures.is_empty();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub outcome_tag: String,
    pub certificate_digest: Option<String>,
    pub certificate_len: usize,
    pub stats: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify_result: Option<VerifyResult>,
}

impl Report {
    pub fn new<F: Scalar>(command: &str, outcome: &Outcome<F>, stats: Value) -> Self {
        let v = outcome.vector();
        Self::tagged(command, outcome.tag(), v, stats)
    }

    pub fn tagged<F: Scalar>(command: &str, tag: &str, v: Option<&[F]>, stats: Value) -> Self {
        Self {
            schema: SCHEMA,
            command: command.to_string(),
            outcome_tag: tag.to_string(),
            certificate_digest: v.map(digest),
            certificate_len: v.map_or(0, <[F]>::len),
            stats,
            verify_result: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_vector() {
        assert_eq!(digest::<f64>(&[]), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn digest_depends_on_bits() {
        assert_ne!(digest(&[0.0f64]), digest(&[-0.0f64]));
    }
}
