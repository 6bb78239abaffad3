//! Merging of independently scheduled task sets for adaptation.
//!
//! Merging produces a single task set over the union of tasks, jobs, and
//! edges, a common horizon (the lcm of the source hyperperiods), and the
//! combined schedule C: every source schedule tiled to the common horizon
//! and overlaid. Identifier collisions between sources are resolved by
//! renumbering the later source's task, job, and node ids past the earlier
//! ones; the remapped source schedules are returned so switchover checks
//! refer to the same ids as the merged set.

use thiserror::Error;

use crate::model::{
    lcm, JobId, JobSpec, ModelError, NodeId, RawTaskSet, Schedule, TaskId, TaskSet,
};

#[derive(Debug, Error)]
pub enum MergeError {
    #[error("channel counts differ: {0} vs {1}")]
    ChannelMismatch(u32, u32),
    #[error("merged task set is invalid: {0}")]
    Model(#[from] ModelError),
    #[error("schedule dimensions do not match its task set")]
    DimensionMismatch,
}

/// Result of merging two scheduled task sets.
#[derive(Debug, Clone)]
pub struct MergeResult {
    /// Union task set over the common hyperperiod.
    pub taskset: TaskSet,
    /// Combined schedule C: both source schedules tiled and overlaid.
    pub combined: Schedule,
    /// The first source schedule, tiled to the common horizon.
    pub first: Schedule,
    /// The second source schedule, id-remapped and tiled.
    pub second: Schedule,
    /// Offset added to the second source's task ids (0 when disjoint).
    pub task_offset: u32,
}

/// Merges two task sets and their schedules into one adaptation instance.
///
/// Channel counts must agree. When the second set reuses task, job, or node
/// ids of the first, the second set's ids are shifted past the first's
/// maxima; the shift applies uniformly so dependencies stay intact.
pub fn merge_schedules(
    a: &TaskSet,
    sa: &Schedule,
    b: &TaskSet,
    sb: &Schedule,
) -> Result<MergeResult, MergeError> {
    if a.channels() != b.channels() {
        return Err(MergeError::ChannelMismatch(a.channels(), b.channels()));
    }
    if sa.horizon() != a.hyperperiod()
        || sb.horizon() != b.hyperperiod()
        || sa.channels() != a.channels()
        || sb.channels() != b.channels()
    {
        return Err(MergeError::DimensionMismatch);
    }

    let raw_a = a.to_raw();
    let mut raw_b = b.to_raw();

    let collides = {
        let a_tasks: std::collections::BTreeSet<TaskId> =
            raw_a.tasks.iter().map(|t| t.id).collect();
        let a_jobs: std::collections::BTreeSet<JobId> = raw_a.jobs.iter().map(|j| j.id).collect();
        let a_nodes: std::collections::BTreeSet<NodeId> = raw_a.nodes.iter().copied().collect();
        raw_b.tasks.iter().any(|t| a_tasks.contains(&t.id))
            || raw_b.jobs.iter().any(|j| a_jobs.contains(&j.id))
            || raw_b.nodes.iter().any(|n| a_nodes.contains(n))
    };

    let (task_off, job_off, node_off) = if collides {
        (
            raw_a.tasks.iter().map(|t| t.id.0 + 1).max().unwrap_or(0),
            raw_a.jobs.iter().map(|j| j.id.0 + 1).max().unwrap_or(0),
            raw_a.nodes.iter().map(|n| n.0 + 1).max().unwrap_or(0),
        )
    } else {
        (0, 0, 0)
    };

    for t in &mut raw_b.tasks {
        t.id = TaskId(t.id.0 + task_off);
        t.node = NodeId(t.node.0 + node_off);
    }
    for e in &mut raw_b.edges {
        e.from = TaskId(e.from.0 + task_off);
        e.to = TaskId(e.to.0 + task_off);
    }
    for j in &mut raw_b.jobs {
        j.id = JobId(j.id.0 + job_off);
        j.leaf = TaskId(j.leaf.0 + task_off);
        for m in &mut j.members {
            *m = TaskId(m.0 + task_off);
        }
    }
    for n in &mut raw_b.nodes {
        *n = NodeId(n.0 + node_off);
    }

    let mut nodes: Vec<NodeId> = raw_a.nodes.iter().chain(raw_b.nodes.iter()).copied().collect();
    nodes.sort();
    nodes.dedup();
    let merged_raw = RawTaskSet {
        channels: a.channels(),
        nodes,
        tasks: raw_a.tasks.iter().chain(raw_b.tasks.iter()).cloned().collect(),
        edges: raw_a.edges.iter().chain(raw_b.edges.iter()).cloned().collect(),
        jobs: merged_jobs(&raw_a.jobs, &raw_b.jobs),
        hyperperiod: None,
    };
    let taskset = TaskSet::build(merged_raw)?;

    let h = lcm(sa.horizon(), sb.horizon());
    let first = sa.tile(h);
    let second = remap_schedule(sb, task_off).tile(h);
    let mut combined = first.clone();
    combined.overlay(&second);

    Ok(MergeResult {
        taskset,
        combined,
        first,
        second,
        task_offset: task_off,
    })
}

fn merged_jobs(a: &[JobSpec], b: &[JobSpec]) -> Vec<JobSpec> {
    a.iter().chain(b.iter()).cloned().collect()
}

fn remap_schedule(s: &Schedule, task_off: u32) -> Schedule {
    if task_off == 0 {
        return s.clone();
    }
    let mut out = Schedule::new(s.horizon(), s.channels());
    for t in 1..=s.horizon() {
        for c in 1..=s.channels() {
            for &task in s.cell(t, c) {
                out.place(TaskId(task.0 + task_off), t, c);
            }
        }
    }
    out
}
