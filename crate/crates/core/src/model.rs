//! Problem-instance data model: tasks, dependency edges, jobs, task sets and
//! the structural quantities derived from them (hyperperiod, per-task periods,
//! intersection matrix, entry/leaf sets, per-job path sets).
//!
//! Time-slots are 1-indexed `1..=H` and channels 1-indexed `1..=M`, matching
//! the summation bounds of the underlying model. A task execution occupies
//! exactly one slot.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of a task, unique within a [`TaskSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TaskId(pub u32);

/// Identifier of a job.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JobId(pub u32);

/// Identifier of an executing node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
impl fmt::Display for JobId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A single-slot unit of work executed on one node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub id: TaskId,
    /// Node the task executes on.
    pub node: NodeId,
    /// Maximum deviation of the task's period between consecutive executions,
    /// in time-slots (J_T).
    #[serde(rename = "maxJitter")]
    pub max_jitter: u32,
}

/// A dependency: `to` depends on `from`, and `from` must execute at most
/// `max_age` time-slots before `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyEdge {
    pub from: TaskId,
    pub to: TaskId,
    /// Maximum data age in time-slots (entry of the matrix D).
    #[serde(rename = "maxAge")]
    pub max_age: u32,
}

/// A path through the dependency DAG from entry tasks to exactly one leaf,
/// with a period.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobSpec {
    pub id: JobId,
    /// Period in time-slots; divides the hyperperiod.
    pub period: u32,
    /// The job's single leaf task (no dependents within the job).
    pub leaf: TaskId,
    /// All tasks of the job, ascending by id.
    pub members: Vec<TaskId>,
}

/// Errors raised while establishing the [`TaskSet`] invariants.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("dependency edges form a cycle involving task {0}")]
    CyclicDependency(TaskId),
    #[error("job {0} has more than one leaf task among its members")]
    MultipleLeaves(JobId),
    #[error("dangling reference: {0}")]
    DanglingReference(String),
    #[error("job {job} period {period} does not divide the hyperperiod {hyperperiod}")]
    NonDividingPeriod {
        job: JobId,
        period: u32,
        hyperperiod: u32,
    },
    #[error("duplicate task id {0}")]
    DuplicateTask(TaskId),
    #[error("duplicate job id {0}")]
    DuplicateJob(JobId),
    #[error("duplicate dependency edge {0} -> {1}")]
    DuplicateEdge(TaskId, TaskId),
    #[error("self dependency on task {0}")]
    SelfDependency(TaskId),
    #[error("job {0} has no members")]
    EmptyJob(JobId),
    #[error("job {job}: declared leaf {declared} is not the sink of its member sub-DAG")]
    LeafMismatch { job: JobId, declared: TaskId },
    #[error("job {job}: member {member} has no path to the leaf")]
    DisconnectedJob { job: JobId, member: TaskId },
    #[error("task {0} belongs to no job")]
    TaskWithoutJob(TaskId),
    #[error("invalid value: {0}")]
    InvalidValue(String),
}

/// Raw, unvalidated task-set description as read from a taskset file.
///
/// Canonical ordering in files is ascending ids. `hyperperiod` is optional;
/// when present it must equal the lcm of all job periods.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RawTaskSet {
    pub channels: u32,
    pub nodes: Vec<NodeId>,
    pub tasks: Vec<TaskSpec>,
    pub edges: Vec<DependencyEdge>,
    pub jobs: Vec<JobSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyperperiod: Option<u32>,
}

/// The scheduling problem instance, immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskSet {
    tasks: Vec<TaskSpec>,
    edges: Vec<DependencyEdge>,
    jobs: Vec<JobSpec>,
    channels: u32,
    nodes: Vec<NodeId>,
    hyperperiod: u32,
    /// Derived per-task period P_T (shortest period of all containing jobs),
    /// parallel to `tasks`.
    periods: Vec<u32>,
    /// Derived per-task set of containing jobs, parallel to `tasks`.
    participating_jobs: Vec<Vec<JobId>>,
    /// Derived per-job entry sets (members without in-job dependencies).
    entries: Vec<Vec<TaskId>>,
    index: BTreeMap<TaskId, usize>,
}

impl TaskSet {
    /// Validates a raw description and derives all structural fields.
    pub fn build(raw: RawTaskSet) -> Result<Self, ModelError> {
        if raw.channels == 0 {
            return Err(ModelError::InvalidValue("channels must be positive".into()));
        }
        let mut tasks = raw.tasks;
        tasks.sort_by_key(|t| t.id);
        let mut index = BTreeMap::new();
        for (i, t) in tasks.iter().enumerate() {
            if index.insert(t.id, i).is_some() {
                return Err(ModelError::DuplicateTask(t.id));
            }
            if !raw.nodes.contains(&t.node) {
                return Err(ModelError::DanglingReference(format!(
                    "task {} references unknown node {}",
                    t.id, t.node
                )));
            }
        }

        let mut edges = raw.edges;
        edges.sort_by_key(|e| (e.from, e.to));
        let mut seen = BTreeSet::new();
        for e in &edges {
            if e.from == e.to {
                return Err(ModelError::SelfDependency(e.from));
            }
            if !seen.insert((e.from, e.to)) {
                return Err(ModelError::DuplicateEdge(e.from, e.to));
            }
            for end in [e.from, e.to] {
                if !index.contains_key(&end) {
                    return Err(ModelError::DanglingReference(format!(
                        "edge {} -> {} references unknown task {}",
                        e.from, e.to, end
                    )));
                }
            }
            if e.max_age == 0 {
                return Err(ModelError::InvalidValue(format!(
                    "edge {} -> {} has maxAge 0",
                    e.from, e.to
                )));
            }
        }

        // Cycle check over the full edge set (Kahn).
        {
            let n = tasks.len();
            let mut indeg = vec![0usize; n];
            let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
            for e in &edges {
                let (f, t) = (index[&e.from], index[&e.to]);
                out[f].push(t);
                indeg[t] += 1;
            }
            let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
            let mut visited = 0;
            while let Some(i) = queue.pop() {
                visited += 1;
                for &j in &out[i] {
                    indeg[j] -= 1;
                    if indeg[j] == 0 {
                        queue.push(j);
                    }
                }
            }
            if visited != n {
                let stuck = (0..n).find(|&i| indeg[i] > 0).unwrap();
                return Err(ModelError::CyclicDependency(tasks[stuck].id));
            }
        }

        let mut jobs = raw.jobs;
        jobs.sort_by_key(|j| j.id);
        let mut job_ids = BTreeSet::new();
        for job in &mut jobs {
            if !job_ids.insert(job.id) {
                return Err(ModelError::DuplicateJob(job.id));
            }
            if job.members.is_empty() {
                return Err(ModelError::EmptyJob(job.id));
            }
            if job.period == 0 {
                return Err(ModelError::InvalidValue(format!(
                    "job {} has period 0",
                    job.id
                )));
            }
            job.members.sort();
            job.members.dedup();
            for &m in &job.members {
                if !index.contains_key(&m) {
                    return Err(ModelError::DanglingReference(format!(
                        "job {} references unknown task {}",
                        job.id, m
                    )));
                }
            }
            if !job.members.contains(&job.leaf) {
                return Err(ModelError::DanglingReference(format!(
                    "job {}: leaf {} is not a member",
                    job.id, job.leaf
                )));
            }
        }

        // Derived task periods: min period over the jobs a task belongs to.
        let mut periods = vec![u32::MAX; tasks.len()];
        let mut participating: Vec<Vec<JobId>> = vec![Vec::new(); tasks.len()];
        for job in &jobs {
            for &m in &job.members {
                let i = index[&m];
                periods[i] = periods[i].min(job.period);
                participating[i].push(job.id);
            }
        }
        if let Some(i) = (0..tasks.len()).find(|&i| participating[i].is_empty()) {
            return Err(ModelError::TaskWithoutJob(tasks[i].id));
        }

        let mut entries = Vec::with_capacity(jobs.len());
        for job in &jobs {
            let members: BTreeSet<TaskId> = job.members.iter().copied().collect();
            // Sink check restricted to same-period members: shared
            // shorter-period members may feed other jobs and so have no
            // dependents inside this one.
            let sinks: Vec<TaskId> = job
                .members
                .iter()
                .copied()
                .filter(|&m| periods[index[&m]] == job.period)
                .filter(|&m| {
                    !edges
                        .iter()
                        .any(|e| e.from == m && members.contains(&e.to))
                })
                .collect();
            if sinks.len() > 1 {
                return Err(ModelError::MultipleLeaves(job.id));
            }
            if sinks != [job.leaf] {
                return Err(ModelError::LeafMismatch {
                    job: job.id,
                    declared: job.leaf,
                });
            }
            // All members form one weakly connected component.
            let mut reach: BTreeSet<TaskId> = BTreeSet::from([job.leaf]);
            let mut frontier = vec![job.leaf];
            while let Some(x) = frontier.pop() {
                for e in &edges {
                    if e.to == x && members.contains(&e.from) && reach.insert(e.from) {
                        frontier.push(e.from);
                    }
                    if e.from == x && members.contains(&e.to) && reach.insert(e.to) {
                        frontier.push(e.to);
                    }
                }
            }
            if let Some(&m) = job.members.iter().find(|m| !reach.contains(m)) {
                return Err(ModelError::DisconnectedJob { job: job.id, member: m });
            }
            let entry: Vec<TaskId> = job
                .members
                .iter()
                .copied()
                .filter(|&m| {
                    !edges
                        .iter()
                        .any(|e| e.to == m && members.contains(&e.from))
                })
                .collect();
            entries.push(entry);
        }

        let hyperperiod = jobs.iter().fold(1u32, |acc, j| lcm(acc, j.period));
        if let Some(h) = raw.hyperperiod {
            if h != hyperperiod {
                let bad = jobs
                    .iter()
                    .find(|j| h % j.period != 0)
                    .map(|j| (j.id, j.period))
                    .unwrap_or_else(|| (jobs[0].id, jobs[0].period));
                return Err(ModelError::NonDividingPeriod {
                    job: bad.0,
                    period: bad.1,
                    hyperperiod: h,
                });
            }
        }

        Ok(TaskSet {
            tasks,
            edges,
            jobs,
            channels: raw.channels,
            nodes: raw.nodes,
            hyperperiod,
            periods,
            participating_jobs: participating,
            entries,
            index,
        })
    }

    /// An instance with no tasks and no jobs; hyperperiod 1.
    pub fn empty(channels: u32) -> Self {
        TaskSet::build(RawTaskSet {
            channels,
            ..Default::default()
        })
        .expect("empty taskset is valid")
    }

    pub fn tasks(&self) -> &[TaskSpec] {
        &self.tasks
    }
    pub fn edges(&self) -> &[DependencyEdge] {
        &self.edges
    }
    pub fn jobs(&self) -> &[JobSpec] {
        &self.jobs
    }
    pub fn channels(&self) -> u32 {
        self.channels
    }
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Hyperperiod H: lcm of all job periods (1 when there are no jobs).
    pub fn hyperperiod(&self) -> u32 {
        self.hyperperiod
    }

    pub fn contains(&self, id: TaskId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn task(&self, id: TaskId) -> &TaskSpec {
        &self.tasks[self.index[&id]]
    }

    /// P_T: the shortest period of all jobs the task participates in.
    pub fn period_of(&self, id: TaskId) -> u32 {
        self.periods[self.index[&id]]
    }

    pub fn jitter_of(&self, id: TaskId) -> u32 {
        self.tasks[self.index[&id]].max_jitter
    }

    pub fn participating_jobs(&self, id: TaskId) -> &[JobId] {
        &self.participating_jobs[self.index[&id]]
    }

    pub fn job(&self, id: JobId) -> Option<&JobSpec> {
        self.jobs.iter().find(|j| j.id == id)
    }

    /// Entry tasks of a job: members without in-job dependencies.
    pub fn job_entries(&self, id: JobId) -> &[TaskId] {
        let i = self.jobs.iter().position(|j| j.id == id).unwrap();
        &self.entries[i]
    }

    /// Γ_T: direct dependencies of a task, with their edge max ages.
    pub fn dependencies_of(&self, id: TaskId) -> impl Iterator<Item = &DependencyEdge> {
        self.edges.iter().filter(move |e| e.to == id)
    }

    /// Tasks directly depending on `id`.
    pub fn dependents_of(&self, id: TaskId) -> impl Iterator<Item = &DependencyEdge> {
        self.edges.iter().filter(move |e| e.from == id)
    }

    /// Max age of the edge `from -> to`, if it exists.
    pub fn max_age(&self, from: TaskId, to: TaskId) -> Option<u32> {
        self.edges
            .iter()
            .find(|e| e.from == from && e.to == to)
            .map(|e| e.max_age)
    }

    /// Global entry set E: tasks without dependencies.
    pub fn entry_set(&self) -> Vec<TaskId> {
        self.tasks
            .iter()
            .map(|t| t.id)
            .filter(|&t| self.dependencies_of(t).next().is_none())
            .collect()
    }

    /// Global leaf set L: tasks without dependents.
    pub fn leaf_set(&self) -> Vec<TaskId> {
        self.tasks
            .iter()
            .map(|t| t.id)
            .filter(|&t| self.dependents_of(t).next().is_none())
            .collect()
    }

    pub(crate) fn task_index(&self, id: TaskId) -> usize {
        self.index[&id]
    }

    /// Serializable raw form with canonical (ascending-id) ordering.
    pub fn to_raw(&self) -> RawTaskSet {
        RawTaskSet {
            channels: self.channels,
            nodes: self.nodes.clone(),
            tasks: self.tasks.clone(),
            edges: self.edges.clone(),
            jobs: self.jobs.clone(),
            hyperperiod: Some(self.hyperperiod),
        }
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: u32, b: u32) -> u32 {
    if a == 0 || b == 0 {
        return a.max(b);
    }
    a / gcd(a, b) * b
}

/// Hyperperiod of a task set: lcm of all job periods.
///
/// Returns `None` when the task set has no jobs.
pub fn hyperperiod(ts: &TaskSet) -> Option<u32> {
    if ts.jobs().is_empty() {
        None
    } else {
        Some(ts.hyperperiod())
    }
}

/// Symmetric boolean table ι over task pairs.
///
/// `ι_UT = 1` iff U and T share an executing node, have a direct dependency
/// edge either way, share a common parent, or share a common child.
#[derive(Debug, Clone)]
pub struct IntersectionMatrix {
    n: usize,
    bits: Vec<bool>,
    index: BTreeMap<TaskId, usize>,
}

impl IntersectionMatrix {
    pub fn intersects(&self, a: TaskId, b: TaskId) -> bool {
        let (i, j) = (self.index[&a], self.index[&b]);
        self.bits[i * self.n + j]
    }
}

/// Builds the intersection matrix of a task set.
pub fn intersection_matrix(ts: &TaskSet) -> IntersectionMatrix {
    let n = ts.tasks().len();
    let index: BTreeMap<TaskId, usize> = ts
        .tasks()
        .iter()
        .enumerate()
        .map(|(i, t)| (t.id, i))
        .collect();
    let mut bits = vec![false; n * n];
    let ids: Vec<TaskId> = ts.tasks().iter().map(|t| t.id).collect();
    for i in 0..n {
        bits[i * n + i] = true;
        for j in (i + 1)..n {
            let (a, b) = (ids[i], ids[j]);
            let same_node = ts.task(a).node == ts.task(b).node;
            let direct = ts.max_age(a, b).is_some() || ts.max_age(b, a).is_some();
            let common_parent = ts
                .dependencies_of(a)
                .any(|ea| ts.dependencies_of(b).any(|eb| ea.from == eb.from));
            let common_child = ts
                .dependents_of(a)
                .any(|ea| ts.dependents_of(b).any(|eb| ea.to == eb.to));
            if same_node || direct || common_parent || common_child {
                bits[i * n + j] = true;
                bits[j * n + i] = true;
            }
        }
    }
    IntersectionMatrix { n, bits, index }
}

/// Per-(entry, leaf) partition of a job's members by period.
///
/// `omega` holds the members whose derived period equals the job's period;
/// `omega_short` the members with a shorter period (tasks shared with
/// shorter-period jobs).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PathSets {
    pub sets: BTreeMap<(TaskId, TaskId), PathSetPair>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSetPair {
    pub omega: BTreeSet<TaskId>,
    pub omega_short: BTreeSet<TaskId>,
}

/// Computes Ω and Ω̆ for every (entry, leaf) pair of every job.
pub fn path_sets(ts: &TaskSet) -> PathSets {
    let mut sets = BTreeMap::new();
    for job in ts.jobs() {
        let mut omega = BTreeSet::new();
        let mut omega_short = BTreeSet::new();
        for &m in &job.members {
            if ts.period_of(m) < job.period {
                omega_short.insert(m);
            } else {
                omega.insert(m);
            }
        }
        for &entry in ts.job_entries(job.id) {
            sets.insert(
                (entry, job.leaf),
                PathSetPair {
                    omega: omega.clone(),
                    omega_short: omega_short.clone(),
                },
            );
        }
    }
    PathSets { sets }
}

/// An H×M grid of cells, each holding the tasks scheduled in that slot.
///
/// A valid schedule holds at most one task per cell; the combined schedule
/// built during merging may hold several.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    horizon: u32,
    channels: u32,
    cells: Vec<Vec<TaskId>>,
}

impl Schedule {
    pub fn new(horizon: u32, channels: u32) -> Self {
        Schedule {
            horizon,
            channels,
            cells: vec![Vec::new(); (horizon * channels) as usize],
        }
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }
    pub fn channels(&self) -> u32 {
        self.channels
    }

    fn idx(&self, t: u32, c: u32) -> usize {
        debug_assert!(t >= 1 && t <= self.horizon && c >= 1 && c <= self.channels);
        ((t - 1) * self.channels + (c - 1)) as usize
    }

    pub fn cell(&self, t: u32, c: u32) -> &[TaskId] {
        &self.cells[self.idx(t, c)]
    }

    pub fn place(&mut self, task: TaskId, t: u32, c: u32) {
        let i = self.idx(t, c);
        self.cells[i].push(task);
        self.cells[i].sort();
    }

    pub fn remove(&mut self, task: TaskId, t: u32, c: u32) {
        let i = self.idx(t, c);
        self.cells[i].retain(|&x| x != task);
    }

    /// All tasks scheduled anywhere in time-slot `t`.
    pub fn tasks_at_time(&self, t: u32) -> impl Iterator<Item = (TaskId, u32)> + '_ {
        (1..=self.channels).flat_map(move |c| self.cell(t, c).iter().map(move |&x| (x, c)))
    }

    /// Ordered (time-slot, channel) execution list of a task.
    pub fn executions(&self, task: TaskId) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for t in 1..=self.horizon {
            for c in 1..=self.channels {
                if self.cell(t, c).contains(&task) {
                    out.push((t, c));
                }
            }
        }
        out
    }

    /// Channel-collapsed, sorted, deduplicated execution time-slots e_T.
    pub fn execution_slots(&self, task: TaskId) -> Vec<u32> {
        let mut out: Vec<u32> = self.executions(task).into_iter().map(|(t, _)| t).collect();
        out.dedup();
        out
    }

    /// Whether the task occupies time-slot `t` on any channel.
    pub fn occupies(&self, task: TaskId, t: u32) -> bool {
        (1..=self.channels).any(|c| self.cell(t, c).contains(&task))
    }

    /// Whether any channel of time-slot `t` holds a task.
    pub fn time_slot_used(&self, t: u32) -> bool {
        (1..=self.channels).any(|c| !self.cell(t, c).is_empty())
    }

    /// Total number of placed executions.
    pub fn execution_count(&self) -> usize {
        self.cells.iter().map(|v| v.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.iter().all(|v| v.is_empty())
    }

    /// All task ids present anywhere in the grid, ascending.
    pub fn task_ids(&self) -> Vec<TaskId> {
        let mut ids: BTreeSet<TaskId> = BTreeSet::new();
        for v in &self.cells {
            ids.extend(v.iter().copied());
        }
        ids.into_iter().collect()
    }

    /// Repeats the grid to a longer horizon (a multiple of the current one).
    pub fn tile(&self, horizon: u32) -> Schedule {
        assert!(horizon % self.horizon == 0, "tile target must be a multiple");
        let mut out = Schedule::new(horizon, self.channels);
        for rep in 0..horizon / self.horizon {
            for t in 1..=self.horizon {
                for c in 1..=self.channels {
                    for &task in self.cell(t, c) {
                        out.place(task, rep * self.horizon + t, c);
                    }
                }
            }
        }
        out
    }

    /// Overlays another grid of identical dimensions onto this one.
    pub fn overlay(&mut self, other: &Schedule) {
        assert_eq!(self.horizon, other.horizon);
        assert_eq!(self.channels, other.channels);
        for t in 1..=self.horizon {
            for c in 1..=self.channels {
                for &task in other.cell(t, c) {
                    self.place(task, t, c);
                }
            }
        }
    }
}
