//! Versioned report document and CSV tables.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Op {
    /// `value <= threshold`
    Le,
    /// `value >= threshold`
    Ge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub metric: String,
    pub op: Op,
    pub threshold: f64,
}

impl Check {
    pub fn le(metric: &str, threshold: f64) -> Self {
        Check {
            metric: metric.into(),
            op: Op::Le,
            threshold,
        }
    }

    pub fn ge(metric: &str, threshold: f64) -> Self {
        Check {
            metric: metric.into(),
            op: Op::Ge,
            threshold,
        }
    }

    /// A missing or NaN metric fails.
    pub fn holds(&self, metrics: &BTreeMap<String, f64>) -> bool {
        match metrics.get(&self.metric) {
            Some(v) if !v.is_nan() => match self.op {
                Op::Le => *v <= self.threshold,
                Op::Ge => *v >= self.threshold,
            },
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trial: Option<u64>,
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub wall_ms: f64,
}

impl Entry {
    pub fn new(label: impl Into<String>) -> Self {
        Entry {
            label: label.into(),
            trial: None,
            metrics: BTreeMap::new(),
            checks: Vec::new(),
            pass: false,
            note: None,
            wall_ms: 0.0,
        }
    }

    pub fn trial(mut self, t: u64) -> Self {
        self.trial = Some(t);
        self
    }

    /// Non-finite values are left out (and noted), so checks on them fail.
    pub fn metric(mut self, name: &str, v: f64) -> Self {
        if v.is_finite() {
            self.metrics.insert(name.into(), v);
        } else {
            let msg = format!("{name} is {v}");
            self.note = Some(match self.note.take() {
                Some(n) => format!("{n}; {msg}"),
                None => msg,
            });
        }
        self
    }

    pub fn check(mut self, c: Check) -> Self {
        self.checks.push(c);
        self
    }

    pub fn note(mut self, s: impl Into<String>) -> Self {
        self.note = Some(s.into());
        self
    }

    /// An entry that failed to compute.
    pub fn failed(label: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Entry::new(label).note(format!("error: {err}")).check(Check::le("error", 0.0))
    }

    /// Sets `pass` from the checks.
    pub fn finish(mut self, wall_ms: f64) -> Self {
        self.pass = self.recompute_pass();
        self.wall_ms = wall_ms;
        self
    }

    pub fn recompute_pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.holds(&self.metrics))
    }
}

/// A flat table mirrored to `<name>.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    /// `None` for missing or non-finite cells.
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row.into_iter().map(|v| v.is_finite().then_some(v)).collect());
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema_version: u32,
    pub config: RunConfig,
    pub entries: Vec<Entry>,
    pub tables: BTreeMap<String, Table>,
    pub summary: Summary,
    pub wall_ms: f64,
}

impl ReportFile {
    pub fn new(config: RunConfig, entries: Vec<Entry>, tables: BTreeMap<String, Table>, wall_ms: f64) -> Self {
        let passed = entries.iter().filter(|e| e.pass).count();
        ReportFile {
            schema_version: SCHEMA_VERSION,
            config,
            summary: Summary {
                total: entries.len(),
                passed,
                failed: entries.len() - passed,
            },
            entries,
            tables,
            wall_ms,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0 && self.summary.total > 0
    }

    /// Copy with every wall-clock field zeroed.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.wall_ms = 0.0;
        for e in &mut r.entries {
            e.wall_ms = 0.0;
        }
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Writes `report.json` and one CSV per table; returns the written paths.
    pub fn write(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        let json = dir.join("report.json");
        fs::write(&json, self.to_json())?;
        out.push(json);
        let entries = dir.join("entries.csv");
        self.write_entries_csv(&entries)?;
        out.push(entries);
        for (name, t) in &self.tables {
            let path = dir.join(format!("{name}.csv"));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(&t.columns)?;
            for row in &t.rows {
                w.write_record(row.iter().map(|v| v.map(|v| v.to_string()).unwrap_or_default()))?;
            }
            w.flush()?;
            out.push(path);
        }
        Ok(out)
    }

    fn write_entries_csv(&self, path: &Path) -> io::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["label", "trial", "metric", "value", "op", "threshold", "pass"])?;
        for e in &self.entries {
            let trial = e.trial.map(|t| t.to_string()).unwrap_or_default();
            for (k, v) in &e.metrics {
                let check = e.checks.iter().find(|c| &c.metric == k);
                let (op, thr) = match check {
                    Some(c) => (
                        match c.op {
                            Op::Le => "le",
                            Op::Ge => "ge",
                        }
                        .to_string(),
                        c.threshold.to_string(),
                    ),
                    None => (String::new(), String::new()),
                };
                w.write_record([e.label.clone(), trial.clone(), k.clone(), v.to_string(), op, thr, e.pass.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
