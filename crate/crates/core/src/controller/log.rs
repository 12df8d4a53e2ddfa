//! Append-only JSONL experience log.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::RunConfig;
use crate::actions::{GroundingReport, Plan, PlanOrigin};
use crate::cleaning::CleaningReport;
use crate::error::{Error, Result};
use crate::eval::EvalResult;
use crate::planner::ExperienceDigest;
use crate::routing::RoutingDecision;

pub const LOG_FORMAT_VERSION: u32 = 1;

/// First line of every experience file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunHeader {
    pub version: u32,
    pub config: RunConfig,
    pub input_rows: usize,
    pub input_columns: usize,
    pub cleaning: CleaningReport,
    pub routing: RoutingDecision,
    pub baseline: EvalResult,
    pub timestamp: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperienceRecord {
    pub iteration: usize,
    /// Absent when the planner itself failed.
    pub plan: Option<Plan>,
    pub grounding: Option<GroundingReport>,
    pub executed: bool,
    pub metric_before: f64,
    pub metric_after: Option<f64>,
    pub accepted: bool,
    pub planner_origin: Option<PlanOrigin>,
    pub evaluation: Option<EvalResult>,
    pub timestamp: String,
    pub note: String,
}

impl ExperienceRecord {
    pub fn digest(&self) -> ExperienceDigest {
        ExperienceDigest {
            iteration: self.iteration,
            actions: self
                .plan
                .as_ref()
                .map(|p| p.actions().to_vec())
                .unwrap_or_default(),
            admissible: self.grounding.as_ref().is_some_and(|g| g.plan_admissible),
            accepted: self.accepted,
            metric_delta: self.metric_after.map(|a| a - self.metric_before),
        }
    }
}

/// One line of the experience file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "lowercase")]
pub enum LogLine {
    Header(Box<RunHeader>),
    Iteration(Box<ExperienceRecord>),
}

/// Writes one JSON line per record and flushes after each one, so the file
/// stays valid up to the last completed record if the process dies.
pub struct ExperienceStore {
    path: Option<PathBuf>,
    writer: Option<BufWriter<File>>,
    lines: usize,
}

impl ExperienceStore {
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        Ok(ExperienceStore {
            path: Some(path.to_owned()),
            writer: Some(BufWriter::new(file)),
            lines: 0,
        })
    }

    /// A store that only counts lines.
    pub fn in_memory() -> Self {
        ExperienceStore {
            path: None,
            writer: None,
            lines: 0,
        }
    }

    pub fn append(&mut self, line: &LogLine) -> Result<()> {
        if let Some(w) = &mut self.writer {
            let path = self.path.clone().unwrap_or_default();
            let text = serde_json::to_string(line)
                .map_err(|e| Error::Contract(format!("log record not serializable: {e}")))?;
            w.write_all(text.as_bytes())
                .and_then(|_| w.write_all(b"\n"))
                .and_then(|_| w.flush())
                .map_err(|e| Error::io(path, e))?;
        }
        self.lines += 1;
        Ok(())
    }

    pub fn lines(&self) -> usize {
        self.lines
    }
}

/// Reads an experience file, stopping at the first line that does not parse
/// (a torn final write).
pub fn read_log(path: &Path) -> Result<Vec<LogLine>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map_while(|l| serde_json::from_str(l).ok())
        .collect())
}

const VOLATILE_KEYS: [&str; 2] = ["timestamp", "wall_time"];

/// Replaces timestamp and wall-time values in a JSON line with a fixed marker.
pub fn mask_volatile_json(line: &str) -> String {
    fn walk(v: &mut Value) {
        match v {
            Value::Object(map) => {
                for (k, v) in map.iter_mut() {
                    if VOLATILE_KEYS.contains(&k.as_str()) {
                        *v = Value::String("<masked>".into());
                    } else {
                        walk(v);
                    }
                }
            }
            Value::Array(items) => items.iter_mut().for_each(walk),
            _ => {}
        }
    }
    match serde_json::from_str::<Value>(line) {
        Ok(mut v) => {
            walk(&mut v);
            v.to_string()
        }
        Err(_) => line.to_owned(),
    }
}
