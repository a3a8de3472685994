//! Verdicts, checks and report files.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::LabError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }

    fn from_flag(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// One measured quantity and the rule it was held to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    /// Human-readable acceptance rule, e.g. `< 1e-7`.
    pub rule: String,
    /// `None` for informational entries that do not enter the verdict.
    pub verdict: Option<Verdict>,
    pub note: String,
}

impl Check {
    pub fn below(name: &str, measured: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            rule: format!("< {limit:e}"),
            verdict: Some(Verdict::from_flag(measured < limit)),
            note: String::new(),
        }
    }

    pub fn within(name: &str, measured: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            rule: format!("in [{lo}, {hi}]"),
            verdict: Some(Verdict::from_flag((lo..=hi).contains(&measured))),
            note: String::new(),
        }
    }

    pub fn flag(name: &str, measured: f64, rule: &str, ok: bool) -> Self {
        Self { name: name.into(), measured, rule: rule.into(), verdict: Some(Verdict::from_flag(ok)), note: String::new() }
    }

    pub fn info(name: &str, measured: f64) -> Self {
        Self { name: name.into(), measured, rule: "reported".into(), verdict: None, note: String::new() }
    }

    pub fn inconclusive(name: &str, measured: f64, rule: &str) -> Self {
        Self { name: name.into(), measured, rule: rule.into(), verdict: Some(Verdict::Inconclusive), note: String::new() }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict != Some(Verdict::Fail) && self.verdict != Some(Verdict::Inconclusive)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub verdict: Verdict,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    /// Files written next to the report.
    pub outputs: Vec<PathBuf>,
}

impl Report {
    pub fn new(experiment: &str) -> Self {
        Self { experiment: experiment.into(), verdict: Verdict::Pass, checks: Vec::new(), notes: Vec::new(), outputs: Vec::new() }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// FAIL dominates INCONCLUSIVE, which dominates PASS.
    pub fn finish(mut self) -> Self {
        let vs = self.checks.iter().filter_map(|c| c.verdict);
        self.verdict = vs.fold(Verdict::Pass, |acc, v| match (acc, v) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::Pass,
        });
        self
    }

    pub fn summary(&self) -> String {
        let mut s = format!("{}: {}\n", self.experiment, self.verdict);
        for c in &self.checks {
            let v = c.verdict.map_or_else(|| "INFO".to_string(), |v| v.to_string());
            s.push_str(&format!("  [{v:>12}] {} = {:.6e} ({})", c.name, c.measured, c.rule));
            if !c.note.is_empty() {
                s.push_str(&format!(" -- {}", c.note));
            }
            s.push('\n');
        }
        for n in &self.notes {
            s.push_str(&format!("  note: {n}\n"));
        }
        s
    }
}

/// Output directory writer that records every file it produces.
pub struct Output {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Output {
    pub fn new(dir: &Path) -> Result<Self, LabError> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<PathBuf, LabError> {
        let p = self.path(name);
        fs::write(&p, body)?;
        self.written.push(p.clone());
        Ok(p)
    }

    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<PathBuf, LabError> {
        let p = self.path(name);
        let mut w = csv::Writer::from_path(&p)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        self.written.push(p.clone());
        Ok(p)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, LabError> {
        let body = serde_json::to_string_pretty(value)?;
        self.text(name, &body)
    }

    pub fn json_lines<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<PathBuf, LabError> {
        let mut body = String::new();
        for r in rows {
            body.push_str(&serde_json::to_string(r)?);
            body.push('\n');
        }
        self.text(name, &body)
    }

    pub fn record(&mut self, p: PathBuf) {
        self.written.push(p);
    }

    /// Write the report and summary and attach the file list.
    pub fn finish(mut self, mut report: Report) -> Result<Report, LabError> {
        let summary = self.path("summary.txt");
        let json = self.path("report.json");
        self.written.push(summary.clone());
        self.written.push(json.clone());
        report.outputs = self.written.clone();
        fs::write(&summary, report.summary())?;
        fs::write(&json, serde_json::to_string_pretty(&report)?)?;
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_aggregation() {
        let mut r = Report::new("x");
        r.push(Check::below("a", 1.0, 2.0));
        r.push(Check::info("b", 5.0));
        assert_eq!(r.clone().finish().verdict, Verdict::Pass);
        r.push(Check::inconclusive("c", 0.0, "n/a"));
        assert_eq!(r.clone().finish().verdict, Verdict::Inconclusive);
        r.push(Check::within("d", 9.0, 0.0, 1.0));
        assert_eq!(r.finish().verdict, Verdict::Fail);
    }
}
