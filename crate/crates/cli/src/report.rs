use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::commands::{Check, Output};
use crate::error::{CliError, CliResult};

pub const TOOL: &str = "sampdisc";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    CheckFailed,
    Error,
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub started_unix: f64,
    pub runtime_seconds: f64,
}

/// Every report carries the same header; only `timing` varies between reruns.
#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub argv: Vec<String>,
    pub config: Option<Value>,
    pub seed: Option<u64>,
    pub derived_seeds: Option<Vec<u64>>,
    pub status: Status,
    pub checks: Vec<Check>,
    pub error: Option<String>,
    pub result: Value,
    pub timing: Timing,
}

pub struct Clock {
    started: SystemTime,
    t0: Instant,
}

impl Clock {
    pub fn start() -> Self {
        Clock { started: SystemTime::now(), t0: Instant::now() }
    }

    pub fn timing(&self) -> Timing {
        Timing {
            started_unix: self.started.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0),
            runtime_seconds: self.t0.elapsed().as_secs_f64(),
        }
    }
}

pub fn status_of(checks: &[Check]) -> Status {
    if checks.iter().all(|c| c.passed) {
        Status::Ok
    } else {
        Status::CheckFailed
    }
}

pub fn to_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Header is the sorted union of row keys; missing cells are empty.
pub fn to_csv(out: &Output) -> CliResult<String> {
    let single;
    let rows: &[Map<String, Value>] = match &out.rows {
        Some(r) => r,
        None => {
            single = vec![match &out.result {
                Value::Object(m) => m.iter().filter(|(_, v)| !v.is_object() && !v.is_array()).map(|(k, v)| (k.clone(), v.clone())).collect(),
                _ => Map::new(),
            }];
            &single
        }
    };
    let header: BTreeSet<&String> = rows.iter().flat_map(|r| r.keys()).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header.iter().map(|s| s.as_str()))?;
    for r in rows {
        w.write_record(header.iter().map(|k| r.get(*k).map(cell).unwrap_or_default()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(format!("csv flush failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}
