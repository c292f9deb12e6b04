//! Newline-delimited JSON trial logs.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// One completed trial. Serialized as a single JSON object per line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct TrialRecord {
    pub schema_version: u32,
    pub episode_id: u64,
    pub trial_index: u64,
    pub task_name: String,
    /// `base`, `advance`, `advance2`, or `probe`.
    pub trial_case_kind: String,
    /// 1-based level per ladder dimension.
    pub difficulty_levels: Vec<usize>,
    pub stimulus_descriptor: Map<String, Value>,
    /// `None` when the response window timed out.
    pub response_label: Option<String>,
    pub correct: bool,
    pub timed_out: bool,
    pub reaction_steps: u64,
    pub reward: f64,
    pub start_step: u64,
    pub end_step: u64,
    pub seed: u64,
}

impl TrialRecord {
    /// Descriptor value as a number, if present and numeric.
    pub fn param(&self, key: &str) -> Option<f64> {
        self.stimulus_descriptor.get(key).and_then(Value::as_f64)
    }
}

/// Appends records to any writer, one line each.
pub struct TrialLogWriter<W: Write> {
    out: W,
    written: u64,
}

impl<W: Write> TrialLogWriter<W> {
    pub fn new(out: W) -> Self {
        Self { out, written: 0 }
    }

    pub fn append(&mut self, record: &TrialRecord) -> Result<()> {
        serde_json::to_writer(&mut self.out, record).map_err(std::io::Error::from)?;
        self.out.write_all(b"\n")?;
        self.written += 1;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }

    pub fn written(&self) -> u64 {
        self.written
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

pub fn write_records<W: Write>(out: W, records: &[TrialRecord]) -> Result<()> {
    let mut w = TrialLogWriter::new(out);
    for r in records {
        w.append(r)?;
    }
    w.flush()
}

/// Parse a log; blank lines are skipped, errors carry the 1-based line number.
pub fn read_records<R: BufRead>(input: R) -> Result<Vec<TrialRecord>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: TrialRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn read_log_file(path: &std::path::Path) -> Result<Vec<TrialRecord>> {
    let f = std::fs::File::open(path)?;
    read_records(std::io::BufReader::new(f))
}

#[cfg(test)]
pub(crate) fn sample_record(i: u64) -> TrialRecord {
    let mut d = Map::new();
    d.insert("coherence".into(), Value::from(0.25 * (i % 4) as f64));
    d.insert("targetSide".into(), Value::from("left, or so"));
    TrialRecord {
        schema_version: SCHEMA_VERSION,
        episode_id: i / 100,
        trial_index: i,
        task_name: "glass".into(),
        trial_case_kind: "probe".into(),
        difficulty_levels: vec![1 + (i % 3) as usize],
        stimulus_descriptor: d,
        response_label: if i % 7 == 0 { None } else { Some("left".into()) },
        correct: i % 2 == 0,
        timed_out: i % 7 == 0,
        reaction_steps: 20 + i,
        reward: if i % 2 == 0 { 1.0 } else { 0.0 },
        start_step: i * 100,
        end_step: i * 100 + 90,
        seed: 42,
    }
}
