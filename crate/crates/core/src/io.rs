//! File formats: JSON task-set and schedule documents.
//!
//! Task-set files carry a [`RawTaskSet`] verbatim (keys `channels`, `nodes`,
//! `tasks`, `edges`, `jobs`, optional `hyperperiod`); ids are listed in
//! ascending order. Schedule files carry the grid dimensions plus a sparse
//! cell list.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ModelError, RawTaskSet, Schedule, TaskId, TaskSet};

/// Errors raised while reading or writing task-set and schedule files.
#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("schedule cell ({slot}, {channel}) lies outside the {horizon}x{channels} grid")]
    CellOutOfRange {
        slot: u32,
        channel: u32,
        horizon: u32,
        channels: u32,
    },
    #[error("schedule cells ({0}, {1}) assigned twice")]
    DuplicateCell(u32, u32),
}

/// One occupied cell of a schedule file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleCell {
    pub task: TaskId,
    pub slot: u32,
    pub channel: u32,
}

/// On-disk form of a [`Schedule`]: dimensions plus the occupied cells in
/// ascending (slot, channel) order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleDoc {
    pub horizon: u32,
    pub channels: u32,
    pub cells: Vec<ScheduleCell>,
}

impl ScheduleDoc {
    pub fn from_schedule(schedule: &Schedule) -> Self {
        let mut cells = Vec::new();
        for t in 1..=schedule.horizon() {
            for c in 1..=schedule.channels() {
                for &task in schedule.cell(t, c) {
                    cells.push(ScheduleCell {
                        task,
                        slot: t,
                        channel: c,
                    });
                }
            }
        }
        ScheduleDoc {
            horizon: schedule.horizon(),
            channels: schedule.channels(),
            cells,
        }
    }

    pub fn into_schedule(self) -> Result<Schedule, IoError> {
        let mut s = Schedule::new(self.horizon, self.channels);
        for cell in &self.cells {
            if cell.slot < 1
                || cell.slot > self.horizon
                || cell.channel < 1
                || cell.channel > self.channels
            {
                return Err(IoError::CellOutOfRange {
                    slot: cell.slot,
                    channel: cell.channel,
                    horizon: self.horizon,
                    channels: self.channels,
                });
            }
            if !s.cell(cell.slot, cell.channel).is_empty() {
                return Err(IoError::DuplicateCell(cell.slot, cell.channel));
            }
            s.place(cell.task, cell.slot, cell.channel);
        }
        Ok(s)
    }
}

/// Serializes a task set to its canonical JSON document.
pub fn taskset_to_json(ts: &TaskSet) -> String {
    let mut raw = ts.to_raw();
    raw.hyperperiod = Some(ts.hyperperiod());
    serde_json::to_string_pretty(&raw).expect("taskset serialization cannot fail")
}

/// Parses and validates a task set from a JSON document.
pub fn taskset_from_json(text: &str) -> Result<TaskSet, IoError> {
    let raw: RawTaskSet = serde_json::from_str(text)?;
    Ok(TaskSet::build(raw)?)
}

pub fn read_taskset(path: &Path) -> Result<TaskSet, IoError> {
    taskset_from_json(&fs::read_to_string(path)?)
}

pub fn write_taskset(path: &Path, ts: &TaskSet) -> Result<(), IoError> {
    fs::write(path, taskset_to_json(ts))?;
    Ok(())
}

/// Serializes a schedule to its JSON document.
pub fn schedule_to_json(schedule: &Schedule) -> String {
    serde_json::to_string_pretty(&ScheduleDoc::from_schedule(schedule))
        .expect("schedule serialization cannot fail")
}

/// Parses a schedule from a JSON document, rejecting out-of-grid or
/// double-assigned cells.
pub fn schedule_from_json(text: &str) -> Result<Schedule, IoError> {
    let doc: ScheduleDoc = serde_json::from_str(text)?;
    doc.into_schedule()
}

pub fn read_schedule(path: &Path) -> Result<Schedule, IoError> {
    schedule_from_json(&fs::read_to_string(path)?)
}

pub fn write_schedule(path: &Path, schedule: &Schedule) -> Result<(), IoError> {
    fs::write(path, schedule_to_json(schedule))?;
    Ok(())
}
