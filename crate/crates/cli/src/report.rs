//! Report assembly and the two output renderings.
//!
//! Human output is sectioned text with a trailing timing line. Machine
//! output (`--json-lines`) is line-delimited JSON under a versioned
//! header; it carries no timing, so a rerun with the same request and
//! seed is byte-identical.

use std::time::Duration;

use serde_json::{json, Value};

pub const FORMAT_VERSION: u64 = 1;

/// Outcome class of a report: separates "the computation ran" from "the
/// property under test held".
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Verification failed; the witness is enough to reproduce.
    Failed {
        witness: String,
    },
}

#[derive(Clone, Debug)]
pub struct Report {
    pub verb: String,
    pub seed: Option<u64>,
    /// Echo of the input file, when the verb reads one.
    pub input: Option<String>,
    lines: Vec<String>,
    records: Vec<Value>,
    status: Status,
}

impl Report {
    pub fn new(verb: impl Into<String>) -> Report {
        Report {
            verb: verb.into(),
            seed: None,
            input: None,
            lines: Vec::new(),
            records: Vec::new(),
            status: Status::Ok,
        }
    }

    /// Records the input file the verb read, echoed in both output formats.
    pub fn with_input(mut self, path: impl Into<String>) -> Report {
        self.input = Some(path.into());
        self
    }

    /// Adds a human-readable line.
    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    /// Adds a machine record line.
    pub fn record(&mut self, v: Value) {
        self.records.push(v);
    }

    /// Marks the verification failed; the first witness wins.
    pub fn fail(&mut self, witness: impl Into<String>) {
        if self.status == Status::Ok {
            self.status = Status::Failed {
                witness: witness.into(),
            };
        }
    }

    pub fn status(&self) -> &Status {
        &self.status
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Ok => 0,
            Status::Failed { .. } => 1,
        }
    }

    pub fn render_human(&self, elapsed: Duration) -> String {
        let mut out = format!("muloc report v{FORMAT_VERSION}\nverb: {}\n", self.verb);
        if let Some(input) = &self.input {
            out.push_str(&format!("input: {input}\n"));
        }
        if let Some(seed) = self.seed {
            out.push_str(&format!("seed: {seed}\n"));
        }
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        match &self.status {
            Status::Ok => out.push_str("status: ok\n"),
            Status::Failed { witness } => out.push_str(&format!("status: FAIL - {witness}\n")),
        }
        out.push_str(&format!("elapsed: {elapsed:.2?}\n"));
        out
    }

    pub fn render_json_lines(&self) -> String {
        let mut out = String::new();
        let mut header = json!({
            "muloc_report": FORMAT_VERSION,
            "verb": self.verb,
            "seed": self.seed,
        });
        if let Some(input) = &self.input {
            header["input"] = json!(input);
        }
        out.push_str(&header.to_string());
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        let trailer = match &self.status {
            Status::Ok => json!({"status": "ok"}),
            Status::Failed { witness } => json!({"status": "fail", "witness": witness}),
        };
        out.push_str(&trailer.to_string());
        out.push('\n');
        out
    }
}
