//! Report records and their line-oriented output.

use std::io::{self, Write};
use std::time::Instant;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub case: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn new(suite: &str, case: impl Into<String>, status: Status) -> Self {
        Report {
            suite: suite.into(),
            case: case.into(),
            status,
            lhs: None,
            rhs: None,
            detail: None,
            seed: None,
            elapsed_ms: 0,
        }
    }

    /// Informational record carrying a computed value.
    pub fn value(suite: &str, case: impl Into<String>, value: impl ToString) -> Self {
        Report::new(suite, case, Status::Pass).lhs(value)
    }

    pub fn lhs(mut self, v: impl ToString) -> Self {
        self.lhs = Some(v.to_string());
        self
    }

    pub fn rhs(mut self, v: impl ToString) -> Self {
        self.rhs = Some(v.to_string());
        self
    }

    pub fn detail(mut self, v: impl ToString) -> Self {
        self.detail = Some(v.to_string());
        self
    }

    pub fn seed(mut self, s: u64) -> Self {
        self.seed = Some(s);
        self
    }

    pub fn since(mut self, t: Instant) -> Self {
        self.elapsed_ms = t.elapsed().as_millis() as u64;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Jsonl,
    Text,
}

pub fn render(r: &Report, format: Format) -> String {
    match format {
        Format::Jsonl => serde_json::to_string(r).expect("plain data"),
        Format::Text => {
            let mut s = format!("{} {} {}", r.status.label(), r.suite, r.case);
            if let Some(l) = &r.lhs {
                s.push_str(&format!(": {l}"));
            }
            if let Some(rh) = &r.rhs {
                s.push_str(&format!(" | {rh}"));
            }
            if let Some(d) = &r.detail {
                s.push_str(&format!(" ({d})"));
            }
            s
        }
    }
}

/// Writes every report; the exit code is 1 iff some case failed.
pub fn emit(reports: &[Report], format: Format) -> io::Result<i32> {
    let mut out = io::stdout().lock();
    for r in reports {
        writeln!(out, "{}", render(r, format))?;
    }
    Ok(if reports.iter().any(|r| r.status == Status::Fail) { 1 } else { 0 })
}
