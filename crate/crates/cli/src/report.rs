//! Machine-readable run reports (JSON) and bulk tables (CSV). Verdicts are
//! pure functions of the recorded metrics, so every report can be
//! re-checked offline. Report bodies are byte-identical across runs with
//! the same configuration and seed; only the wall clock differs.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::config::EffectiveConfig;

/// One pass/fail decision: `metric op threshold`.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub metric: f64,
    pub op: String,
    pub threshold: f64,
    pub pass: bool,
}

impl Verdict {
    pub fn le(name: &str, metric: f64, threshold: f64) -> Self {
        Verdict {
            name: name.to_string(),
            metric,
            op: "<=".to_string(),
            threshold,
            pass: metric <= threshold,
        }
    }

    pub fn ge(name: &str, metric: f64, threshold: f64) -> Self {
        Verdict {
            name: name.to_string(),
            metric,
            op: ">=".to_string(),
            threshold,
            pass: metric >= threshold,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "VERDICT {name}: {metric:.6e} {op} {threshold:.6e} -> {}",
            if self.pass { "PASS" } else { "FAIL" },
            name = self.name,
            metric = self.metric,
            op = self.op,
            threshold = self.threshold,
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub experiment: String,
    pub lib_version: String,
    pub cli_version: String,
    pub config: EffectiveConfig,
    pub metrics: BTreeMap<String, f64>,
    pub verdicts: Vec<Verdict>,
    pub pass: bool,
    /// Wall-clock seconds; excluded from determinism comparisons.
    pub wall_clock_s: f64,
}

impl Report {
    pub fn new(config: &EffectiveConfig) -> Self {
        Report {
            experiment: config.experiment.clone(),
            lib_version: toda_toric_core::VERSION.to_string(),
            cli_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            metrics: BTreeMap::new(),
            verdicts: Vec::new(),
            pass: true,
            wall_clock_s: 0.0,
        }
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }

    pub fn verdict(&mut self, v: Verdict) {
        self.pass &= v.pass;
        self.verdicts.push(v);
    }

    /// Serialized report with the wall clock zeroed, for byte comparisons.
    pub fn body_json(&self) -> String {
        let mut clone = self.clone();
        clone.wall_clock_s = 0.0;
        serde_json::to_string_pretty(&clone).expect("report serializes") + "\n"
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Scientific notation with 17 significant digits, the CSV number format.
pub fn fmt_sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// An in-memory CSV table; written to `<out>/<name>.csv`.
#[derive(Debug, Clone)]
pub struct CsvTable {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(name: &str, header: &[&str]) -> Self {
        CsvTable {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_header(name: &str, header: Vec<String>) -> Self {
        CsvTable { name: name.to_string(), header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Everything a finished experiment hands back to the driver.
#[derive(Debug)]
pub struct RunOutput {
    pub report: Report,
    pub tables: Vec<CsvTable>,
}
