//! JSON run summaries: a versioned, deterministic report of one scenario
//! run, with all wall-clock measurements segregated under a single `timings`
//! key so summaries can be compared bit-for-bit across repeated runs.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Version of the summary layout; bump on breaking changes.
pub const SCHEMA_VERSION: u32 = 1;

/// Accumulating run summary.  Everything inserted through [`Summary::insert`]
/// is deterministic for a fixed config and seed; wall-clock data goes through
/// [`Summary::record_timing`] and ends up under the `timings` key only.
#[derive(Debug, Clone)]
pub struct Summary {
    subcommand: String,
    seed: u64,
    results: Map<String, Value>,
    timings: Map<String, Value>,
    checks: Vec<(String, bool)>,
    hypothesis_violation: Option<String>,
}

impl Summary {
    pub fn new(subcommand: &str, seed: u64) -> Summary {
        Summary {
            subcommand: subcommand.to_string(),
            seed,
            results: Map::new(),
            timings: Map::new(),
            checks: Vec::new(),
            hypothesis_violation: None,
        }
    }

    /// Records a result value under `key`.
    pub fn insert<T: Serialize>(&mut self, key: &str, value: T) {
        let v = serde_json::to_value(value).expect("serializable result value");
        self.results.insert(key.to_string(), v);
    }

    /// Records a named pass/fail verdict; the overall status passes only if
    /// every recorded check does.
    pub fn check(&mut self, name: &str, pass: bool) {
        self.checks.push((name.to_string(), pass));
    }

    /// Records a wall-clock duration in seconds.
    pub fn record_timing(&mut self, key: &str, seconds: f64) {
        self.timings
            .insert(key.to_string(), Value::from(seconds));
    }

    /// Marks the run as blocked by an unmet named hypothesis.  The run is
    /// neither a pass nor a numerical failure; it maps to exit status 3.
    pub fn set_hypothesis_violation(&mut self, name: &str) {
        self.hypothesis_violation = Some(name.to_string());
    }

    pub fn hypothesis_violation(&self) -> Option<&str> {
        self.hypothesis_violation.as_deref()
    }

    pub fn pass(&self) -> bool {
        self.hypothesis_violation.is_none() && self.checks.iter().all(|(_, p)| *p)
    }

    /// Process exit status for this summary: 0 on pass, 3 on an unmet
    /// hypothesis, 4 on a failed verdict.
    pub fn exit_code(&self) -> i32 {
        if self.hypothesis_violation.is_some() {
            3
        } else if self.pass() {
            0
        } else {
            4
        }
    }

    /// Names of the checks that failed.
    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|(_, p)| !*p)
            .map(|(n, _)| n.as_str())
            .collect()
    }

    pub fn to_value(&self) -> Value {
        let mut root = Map::new();
        root.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
        root.insert("subcommand".into(), Value::from(self.subcommand.clone()));
        root.insert("seed".into(), Value::from(self.seed));
        let status = if let Some(name) = &self.hypothesis_violation {
            root.insert("hypothesis_violation".into(), Value::from(name.clone()));
            "hypothesis-not-met"
        } else if self.pass() {
            "pass"
        } else {
            "fail"
        };
        root.insert("status".into(), Value::from(status));
        let checks: Map<String, Value> = self
            .checks
            .iter()
            .map(|(n, p)| (n.clone(), Value::from(*p)))
            .collect();
        root.insert("checks".into(), Value::Object(checks));
        root.insert("results".into(), Value::Object(self.results.clone()));
        root.insert("timings".into(), Value::Object(self.timings.clone()));
        Value::Object(root)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("summary serializes")
    }

    /// Writes `summary.json` into `dir` (created if needed); returns the path.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join("summary.json");
        std::fs::write(&path, self.to_json())?;
        Ok(path)
    }
}

/// Returns a copy of a summary value with the `timings` subtree removed, the
/// form in which summaries are compared for determinism.
pub fn without_timings(v: &Value) -> Value {
    let mut v = v.clone();
    if let Value::Object(map) = &mut v {
        map.remove("timings");
    }
    v
}

/// Simple wall-clock stopwatch for [`Summary::record_timing`].
pub struct Stopwatch(Instant);

impl Stopwatch {
    pub fn start() -> Stopwatch {
        Stopwatch(Instant::now())
    }

    pub fn seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

impl Default for Stopwatch {
    fn default() -> Self {
        Stopwatch::start()
    }
}

/// Writes a CSV file with the given header and rows of numbers.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::ShapeMismatch(format!(
                "csv row has {} entries, header has {}",
                row.len(),
                header.len()
            )));
        }
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.17e}")).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}
