use std::collections::BTreeMap;

use serde::Serialize;
use threewave_core::diffpoly::AffineSpace;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub witness: Option<String>,
    pub detail: String,
}

impl Check {
    pub fn pass(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            ok: true,
            witness: None,
            detail: detail.into(),
        }
    }

    /// A check that fails with `witness` when it is `Some`.
    pub fn from_witness(
        name: impl Into<String>,
        witness: Option<String>,
        detail: impl Into<String>,
    ) -> Self {
        Check {
            name: name.into(),
            ok: witness.is_none(),
            witness,
            detail: detail.into(),
        }
    }

    /// Boolean outcome; a failure gets `witness` (or the detail) as its witness.
    pub fn expect(name: impl Into<String>, ok: bool, witness: impl Into<String>, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            ok,
            witness: (!ok).then(|| witness.into()),
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintSummary {
    pub dimension: usize,
    pub free_parameters: Vec<String>,
    pub relations: Vec<String>,
}

impl From<&AffineSpace> for ConstraintSummary {
    fn from(s: &AffineSpace) -> Self {
        ConstraintSummary {
            dimension: s.dimension(),
            free_parameters: s.free_parameters().iter().map(|p| p.name().to_string()).collect(),
            relations: s.relation_strings(),
        }
    }
}

/// Machine-readable outcome of one command. Field order is the JSON key order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub version: String,
    pub command: String,
    pub status: Status,
    pub checks: Vec<Check>,
    pub constraints: Option<ConstraintSummary>,
    pub timings_ms: Option<BTreeMap<String, u64>>,
}

impl Report {
    pub fn new(command: impl Into<String>, checks: Vec<Check>) -> Self {
        let status = if checks.iter().all(|c| c.ok) {
            Status::Pass
        } else {
            Status::Fail
        };
        Report {
            version: SCHEMA_VERSION.into(),
            command: command.into(),
            status,
            checks,
            constraints: None,
            timings_ms: None,
        }
    }

    pub fn error(command: impl Into<String>, detail: impl Into<String>) -> Self {
        let detail = detail.into();
        Report {
            version: SCHEMA_VERSION.into(),
            command: command.into(),
            status: Status::Error,
            checks: vec![Check {
                name: "error".into(),
                ok: false,
                witness: Some(detail.clone()),
                detail,
            }],
            constraints: None,
            timings_ms: None,
        }
    }

    pub fn with_constraints(mut self, c: ConstraintSummary) -> Self {
        self.constraints = Some(c);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_follow_declaration_order() {
        let r = Report::new("expr eval", vec![Check::pass("result", "p10")]);
        let json = r.to_json();
        let keys = ["version", "command", "status", "checks", "constraints", "timings_ms"];
        let pos: Vec<usize> = keys.iter().map(|k| json.find(&format!("\"{k}\"")).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]), "{json}");
        assert!(json.contains("\"status\": \"pass\""));
    }

    #[test]
    fn status_tracks_checks() {
        let r = Report::new("x", vec![Check::pass("a", ""), Check::expect("b", false, "w", "")]);
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.checks[1].witness.as_deref(), Some("w"));
        assert_eq!(Report::error("x", "boom").status.exit_code(), 2);
    }
}
