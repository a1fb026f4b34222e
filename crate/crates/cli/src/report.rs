//! Report records and their JSON and text renderings.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TaskRecord {
    pub task: usize,
    pub verb: String,
    pub args: BTreeMap<String, String>,
    pub passed: bool,
    pub dims: BTreeMap<String, usize>,
    pub blocks: BTreeMap<String, Vec<usize>>,
    pub checks: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub unmet: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_ms: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub passed: bool,
    pub seed: u64,
    pub tol: f64,
    pub max_dim: usize,
    pub tasks: Vec<TaskRecord>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for t in &self.tasks {
            let args: Vec<String> = t.args.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = write!(s, "[{}] {} {} ({})", if t.passed { "pass" } else { "FAIL" }, t.task, t.verb, args.join(", "));
            if let Some(ms) = t.time_ms {
                let _ = write!(s, " {ms:.1} ms");
            }
            s.push('\n');
            if !t.dims.is_empty() {
                let d: Vec<String> = t.dims.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let _ = writeln!(s, "    dims: {}", d.join(" "));
            }
            for (k, b) in &t.blocks {
                let _ = writeln!(s, "    blocks {k}: {b:?}");
            }
            for c in t.checks.iter().filter(|c| !c.passed) {
                let _ = writeln!(s, "    failed {}: {}", c.name, c.detail);
            }
            if let Some(e) = &t.error {
                let _ = writeln!(s, "    error {}: {}", e.kind, e.message);
            }
            for u in &t.unmet {
                let _ = writeln!(s, "    expected {u}");
            }
        }
        let _ = writeln!(s, "{}", if self.passed { "all tasks passed" } else { "some tasks failed" });
        s
    }
}
