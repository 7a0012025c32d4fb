//! JSONL trace of a search run, one event per line:
//! `{"it": n, "ev": "move|block+|block-|assign|stuck", ...}`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localsearch::moves::MoveCategory;
use crate::localsearch::tree::{BlockerKind, MoveValue};
use crate::model::{Instance, PartialSchedule};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "ev")]
pub enum TraceEvent {
    #[serde(rename = "move")]
    MoveChosen { job: usize, machine: usize, category: MoveCategory, value: MoveValue },
    #[serde(rename = "block+")]
    BlockerAdded {
        seq: u64,
        kind: BlockerKind,
        machine: usize,
        jobs: Vec<usize>,
        parent_seq: u64,
        value: MoveValue,
    },
    #[serde(rename = "block-")]
    BlockersRemoved { from_seq: u64, count: usize },
    #[serde(rename = "assign")]
    JobAssigned { job: usize, machine: usize },
    #[serde(rename = "stuck")]
    Stuck { job: usize, scale: u64, y: Vec<u64>, z: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub it: u64,
    #[serde(flatten)]
    pub event: TraceEvent,
}

impl TraceRecord {
    /// The `ev` tag as written to JSONL.
    pub fn event_name(&self) -> &'static str {
        match self.event {
            TraceEvent::MoveChosen { .. } => "move",
            TraceEvent::BlockerAdded { .. } => "block+",
            TraceEvent::BlockersRemoved { .. } => "block-",
            TraceEvent::JobAssigned { .. } => "assign",
            TraceEvent::Stuck { .. } => "stuck",
        }
    }
}

pub fn write_jsonl<W: Write>(mut out: W, records: &[TraceRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<TraceRecord>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

/// Rebuilds the schedule a trace ends in, starting from `start`.
pub fn replay(inst: &Instance, start: &PartialSchedule, records: &[TraceRecord]) -> Result<PartialSchedule> {
    let mut sched = start.clone();
    for r in records {
        if let TraceEvent::JobAssigned { job, machine } = r.event {
            if job >= inst.job_count() || !inst.job(job).is_eligible(machine) {
                return Err(Error::InvalidSchedule(format!(
                    "trace assigns job {job} to ineligible machine {machine}"
                )));
            }
            sched.assign(inst, job, machine);
        }
    }
    Ok(sched)
}
