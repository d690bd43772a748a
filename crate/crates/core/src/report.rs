//! Check results and JSON reports.

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// Outcome of one check.  Failures carry the datum that reproduces them.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub anchor: String,
    pub status: Status,
    pub cases: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

impl CheckResult {
    pub fn new(name: &str, anchor: &str) -> Self {
        CheckResult {
            name: name.to_string(),
            anchor: anchor.to_string(),
            status: Status::Pass,
            cases: 0,
            failures: Vec::new(),
            certificates: Vec::new(),
            wall_ms: None,
        }
    }

    /// Records one case; a false `ok` fails the check with `datum`.
    pub fn case(&mut self, ok: bool, datum: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.status = Status::Fail;
            self.failures.push(datum());
        }
    }

    pub fn error(&mut self, datum: String) {
        self.cases += 1;
        self.status = Status::Fail;
        self.failures.push(datum);
    }

    pub fn certificate(&mut self, c: String) {
        self.certificates.push(c);
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn skipped(name: &str, anchor: &str, why: &str) -> Self {
        let mut r = CheckResult::new(name, anchor);
        r.status = Status::Skipped;
        r.certificates.push(why.to_string());
        r
    }
}

/// A whole run: configuration echo plus the checks, sorted by name.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub config: serde_json::Value,
    pub status: Status,
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payload: Option<serde_json::Value>,
}

impl Report {
    pub fn new(command: &str, config: serde_json::Value, mut checks: Vec<CheckResult>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let status = if checks.iter().all(|c| c.passed()) { Status::Pass } else { Status::Fail };
        Report { schema_version: SCHEMA_VERSION, command: command.to_string(), config, status, checks, payload: None }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_aggregation() {
        let mut a = CheckResult::new("b", "x");
        a.case(true, || unreachable!());
        let mut b = CheckResult::new("a", "y");
        b.case(false, || "m=1".into());
        let r = Report::new("t", serde_json::json!({}), vec![a, b]);
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.checks[0].name, "a");
        assert!(r.to_json().contains("\"failures\""));
    }
}
