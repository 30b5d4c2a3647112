use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

/// One check. `outcome` drives the exit code and is not serialized.
#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub check: String,
    pub inputs: Map<String, Value>,
    pub verdict: String,
    pub certified_order: Option<u32>,
    pub certificate: Value,
    pub seed: Option<u64>,
    pub millis: Option<u64>,
    #[serde(skip)]
    pub outcome: Outcome,
}

impl Record {
    pub fn new(check: &str, outcome: Outcome, verdict: impl Into<String>, certified_order: Option<u32>) -> Record {
        Record {
            check: check.to_string(),
            inputs: Map::new(),
            verdict: verdict.into(),
            certified_order,
            certificate: Value::Null,
            seed: None,
            millis: None,
            outcome,
        }
    }

    pub fn input(mut self, key: &str, value: impl Into<Value>) -> Record {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn certificate(mut self, c: Value) -> Record {
        self.certificate = c;
        self
    }

    pub fn seed(mut self, seed: u64) -> Record {
        self.seed = Some(seed);
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Human,
    JsonLines,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: String,
    pub records: Vec<Record>,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report { command: command.to_string(), records: Vec::new() }
    }

    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    /// 0 all pass, 1 any failure, 3 inconclusive without failures.
    pub fn exit_code(&self) -> i32 {
        if self.records.iter().any(|r| r.outcome == Outcome::Fail) {
            1
        } else if self.records.iter().any(|r| r.outcome == Outcome::Inconclusive) {
            3
        } else {
            0
        }
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::JsonLines => {
                let mut out = String::new();
                for r in &self.records {
                    out.push_str(&serde_json::to_string(r).expect("records serialize"));
                    out.push('\n');
                }
                out
            }
            Format::Human => self.human(),
        }
    }

    fn human(&self) -> String {
        let mut out = format!("crforge {}: {} check(s)\n", self.command, self.records.len());
        if self.records.is_empty() {
            return out;
        }
        let rows: Vec<[String; 4]> = self
            .records
            .iter()
            .map(|r| {
                let order = r.certified_order.map_or("-".to_string(), |o| o.to_string());
                let inputs: Vec<String> = r.inputs.iter().map(|(k, v)| format!("{k}={}", plain(v))).collect();
                [r.check.clone(), r.verdict.clone(), order, inputs.join(" ")]
            })
            .collect();
        let head = ["check", "verdict", "order", "inputs"];
        let mut w = head.map(|h| h.len());
        for row in &rows {
            for (k, cell) in row.iter().enumerate() {
                w[k] = w[k].max(cell.len());
            }
        }
        let line = |cells: [&str; 4]| {
            format!("  {:<a$}  {:<b$}  {:>c$}  {}", cells[0], cells[1], cells[2], cells[3], a = w[0], b = w[1], c = w[2])
                .trim_end()
                .to_string()
        };
        let _ = writeln!(out, "{}", line(head));
        for (row, r) in rows.iter().zip(&self.records) {
            let _ = writeln!(out, "{}", line([&row[0], &row[1], &row[2], &row[3]]));
            if !r.certificate.is_null() {
                let _ = writeln!(out, "      certificate: {}", r.certificate);
            }
            if let Some(s) = r.seed {
                let _ = writeln!(out, "      seed: {s}");
            }
            if let Some(ms) = r.millis {
                let _ = writeln!(out, "      millis: {ms}");
            }
        }
        out
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
