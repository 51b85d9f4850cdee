use std::fs;
use std::path::{Path, PathBuf};

use log::error;
use serde::Serialize;

use super::config::ExperimentId;
use super::sim::{EntryBatch, Trial};
use crate::error::Result;
use crate::stats::TestReport;

/// A deterministic tolerance check, as opposed to a hypothesis test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// `|value - expected| <= tolerance`.
    pub fn within(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected,
            tolerance,
            passed: (value - expected).abs() <= tolerance,
        }
    }

    /// `value <= bound`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected: bound,
            tolerance: 0.0,
            passed: value <= bound,
        }
    }

    /// `value >= bound`.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected: bound,
            tolerance: 0.0,
            passed: value >= bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryRow {
    pub eps: f64,
    pub traj_id: usize,
    pub t: f64,
    pub j: usize,
    pub p_angle: f64,
    pub u_angle: f64,
    pub duration: f64,
    pub closest: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountRow {
    pub eps: f64,
    pub window: usize,
    pub label: usize,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordRow {
    pub replica: usize,
    pub n_points: usize,
    pub n_records: usize,
    pub records_by_count_time: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentOutput {
    pub experiment: ExperimentId,
    pub reports: Vec<TestReport>,
    pub checks: Vec<Check>,
    pub metrics: Vec<Metric>,
    pub errors: Vec<String>,
    #[serde(skip)]
    pub entries: Vec<EntryRow>,
    #[serde(skip)]
    pub counts: Vec<CountRow>,
    #[serde(skip)]
    pub records: Vec<RecordRow>,
}

impl ExperimentOutput {
    pub fn new(experiment: ExperimentId) -> Self {
        Self {
            experiment,
            reports: Vec::new(),
            checks: Vec::new(),
            metrics: Vec::new(),
            errors: Vec::new(),
            entries: Vec::new(),
            counts: Vec::new(),
            records: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.reports.iter().all(|r| r.passed) && self.checks.iter().all(|c| c.passed)
    }

    /// Stores a test result under `name`; a test that could not run is
    /// recorded as an error.
    pub fn report(&mut self, name: String, result: Result<TestReport>) {
        match result {
            Ok(r) => self.reports.push(r.named(name)),
            Err(e) => {
                error!("{name}: {e}");
                self.errors.push(format!("{name}: {e}"));
            }
        }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.push(Metric {
            name: name.into(),
            value,
        });
    }

    pub fn find_report(&self, name: &str) -> Option<&TestReport> {
        self.reports.iter().find(|r| r.test_name == name)
    }

    pub fn find_check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn find_metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|m| m.name == name).map(|m| m.value)
    }

    pub fn add_batch_entries(&mut self, batch: &EntryBatch) {
        for o in &batch.orbits {
            self.entries.extend(o.entries.iter().map(|e| entry_row(batch.eps, o.traj_id, e)));
        }
    }

    pub fn add_trial_entries(&mut self, eps: f64, trials: &[Trial]) {
        for t in trials {
            self.entries.extend(t.entries.iter().map(|e| entry_row(eps, t.traj_id, e)));
        }
    }

    /// Writes `entries.csv`, `counts.csv`, `records.csv` (each when
    /// non-empty), `reports.json` and `summary.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        if !self.entries.is_empty() {
            written.push(write_csv(&dir.join("entries.csv"), &self.entries)?);
        }
        if !self.counts.is_empty() {
            written.push(write_csv(&dir.join("counts.csv"), &self.counts)?);
        }
        if !self.records.is_empty() {
            written.push(write_csv(&dir.join("records.csv"), &self.records)?);
        }
        let reports = dir.join("reports.json");
        fs::write(&reports, serde_json::to_string_pretty(&self.reports)?)?;
        written.push(reports);
        let summary = dir.join("summary.json");
        let body = serde_json::json!({
            "experiment": self.experiment,
            "passed": self.passed(),
            "checks": self.checks,
            "metrics": self.metrics,
            "errors": self.errors,
        });
        fs::write(&summary, serde_json::to_string_pretty(&body)?)?;
        written.push(summary);
        Ok(written)
    }
}

fn entry_row(eps: f64, traj_id: usize, e: &crate::targets::EntryEvent) -> EntryRow {
    EntryRow {
        eps,
        traj_id,
        t: e.t,
        j: e.label,
        p_angle: e.p_angle(),
        u_angle: e.u_angle(),
        duration: e.duration,
        closest: e.closest,
    }
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<PathBuf> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(path.to_path_buf())
}
