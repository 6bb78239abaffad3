//! Constructive job-by-job scheduler.
//!
//! Jobs are processed in descending longest-path order. Within a job and
//! subperiod the leaf is placed at the end of the subperiod, then its
//! dependency tree is traversed upward: each parent's target comes from the
//! backward equation, executions left by earlier jobs are reused through the
//! search box, and occupied targets are shifted by the mode's strategy
//! (time-first or channel-first) within the task's jitter bound. The
//! finished grid is confirmed against the validator; the heuristic never
//! reports a schedule it cannot prove valid.

use std::collections::BTreeMap;

use crate::model::{
    intersection_matrix, IntersectionMatrix, JobId, JobSpec, Schedule, TaskId, TaskSet,
};
use crate::exact::{merge_schedules, MergeError, MergeResult};
use crate::validator::{validate, validate_transition};

/// Strategy for resolving an occupied target slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shifting {
    /// Try neighboring time-slots on the same channel first.
    TimeFirst,
    /// Try all channels of the target time-slot first.
    ChannelFirst,
}

/// Order in which sibling tasks at a traversal join are processed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SiblingOrder {
    /// Ascending maximal age of the connecting edge.
    AgeFirst,
    /// Ascending maximal jitter of the task.
    JitterFirst,
}

/// One of the four scheduler modes.
///
/// The two-digit code used on the command line maps the first digit to the
/// shifting strategy (0 = time first, 1 = channel first) and the second to
/// the sibling order (0 = age first, 1 = jitter first).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SchedulerMode {
    pub shifting: Shifting,
    pub ordering: SiblingOrder,
}

impl SchedulerMode {
    pub const ALL: [SchedulerMode; 4] = [
        SchedulerMode { shifting: Shifting::TimeFirst, ordering: SiblingOrder::AgeFirst },
        SchedulerMode { shifting: Shifting::TimeFirst, ordering: SiblingOrder::JitterFirst },
        SchedulerMode { shifting: Shifting::ChannelFirst, ordering: SiblingOrder::AgeFirst },
        SchedulerMode { shifting: Shifting::ChannelFirst, ordering: SiblingOrder::JitterFirst },
    ];

    pub fn code(&self) -> &'static str {
        match (self.shifting, self.ordering) {
            (Shifting::TimeFirst, SiblingOrder::AgeFirst) => "00",
            (Shifting::TimeFirst, SiblingOrder::JitterFirst) => "01",
            (Shifting::ChannelFirst, SiblingOrder::AgeFirst) => "10",
            (Shifting::ChannelFirst, SiblingOrder::JitterFirst) => "11",
        }
    }

    pub fn from_code(code: &str) -> Option<SchedulerMode> {
        SchedulerMode::ALL.iter().copied().find(|m| m.code() == code)
    }
}

impl std::fmt::Display for SchedulerMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

/// Result of a heuristic run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HeurStatus {
    Feasible,
    /// No admissible slot was found for `task` in leaf-subperiod
    /// `subperiod`, or the finished grid failed validation.
    Unschedulable { task: TaskId, subperiod: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeurOutcome {
    pub status: HeurStatus,
    pub schedule: Option<Schedule>,
}

impl HeurOutcome {
    pub fn is_feasible(&self) -> bool {
        self.status == HeurStatus::Feasible
    }
}

/// Per-job traversal context: the active job, the current subperiod, and
/// the leaf-distance table.
#[derive(Debug, Clone)]
pub struct JobContext {
    pub job: JobId,
    pub leaf: TaskId,
    /// 1-based subperiod index, 1..=H/P_l.
    pub k: u32,
    /// Member count |ω| of the active job.
    pub omega_len: u32,
    /// Leaf period P_l and leaf jitter J_l.
    pub p_l: u32,
    pub j_l: u32,
    /// Hop distance to the leaf (δ, leaf = 0) for members that reach it.
    pub delta: BTreeMap<TaskId, u32>,
    /// Sum of edge ages along the hop-shortest path to the leaf.
    pub age_to_leaf: BTreeMap<TaskId, u32>,
}

impl JobContext {
    /// Builds the context for subperiod `k` of `job` (δ via BFS from the
    /// leaf over in-job dependency edges).
    pub fn new(ts: &TaskSet, job: &JobSpec, k: u32) -> JobContext {
        let members: std::collections::BTreeSet<TaskId> = job.members.iter().copied().collect();
        let mut delta = BTreeMap::from([(job.leaf, 0u32)]);
        let mut age_to_leaf = BTreeMap::from([(job.leaf, 0u32)]);
        let mut queue = std::collections::VecDeque::from([job.leaf]);
        while let Some(x) = queue.pop_front() {
            let (dx, ax) = (delta[&x], age_to_leaf[&x]);
            for e in ts.dependencies_of(x) {
                if members.contains(&e.from) && !delta.contains_key(&e.from) {
                    delta.insert(e.from, dx + 1);
                    age_to_leaf.insert(e.from, ax + e.max_age);
                    queue.push_back(e.from);
                }
            }
        }
        JobContext {
            job: job.id,
            leaf: job.leaf,
            k,
            omega_len: job.members.len() as u32,
            p_l: job.period,
            j_l: ts.jitter_of(job.leaf),
            delta,
            age_to_leaf,
        }
    }
}

/// Backward equation: the target slot for a parent, anchored at its child's
/// execution `t_c` (and the child's previous-subperiod execution for k ≥ 2).
///
/// A non-positive spread denominator (δ_p ≥ |ω|) degenerates to offset 1 —
/// immediately before the child. Results are clamped to slot 1.
pub fn backward_slot(
    t_c: u32,
    t_c_prev: Option<u32>,
    omega_len: u32,
    delta_p: u32,
    d_p: u32,
) -> u32 {
    let room = match t_c_prev {
        None => t_c as i64 - 1,
        Some(prev) => t_c as i64 - prev as i64 - 1,
    };
    let denom = omega_len as i64 - delta_p as i64;
    let offset = if denom <= 0 {
        1
    } else {
        (room.max(0) / denom).min(d_p as i64)
    };
    (t_c as i64 - offset).max(1) as u32
}

/// Forward equation: the target slot for a child placed after its parent's
/// adopted execution `t_p`.
///
/// When the parent is the common task and a next execution `t_p_next` is
/// known, the spread is limited by it. δ_p is the parent's leaf distance
/// (≥ 1 for any forward parent).
pub fn forward_slot(
    t_p: u32,
    t_p_next: Option<u32>,
    k: u32,
    p_l: u32,
    delta_p: u32,
    d_p: u32,
) -> u32 {
    let end = k as i64 * p_l as i64;
    let bound = match t_p_next {
        Some(next) => end.min(next as i64),
        None => end,
    };
    let denom = delta_p.max(1) as i64;
    let offset = ((bound - t_p as i64).max(0) / denom).min(d_p as i64).max(1);
    t_p as u32 + offset as u32
}

/// Search box for reusing an execution of a common task `com` in subperiod
/// `k`; returns the latest execution inside the box, if any.
///
/// `t_c_prev` is the child's previous-subperiod execution, `t_com_prev` the
/// common task's. For k = 1 both are absent and the bounds reduce to
/// `[|ω| − δ_com, k·P_l + J_l − δ_com]`.
pub fn find_common_execution(
    com: TaskId,
    ts: &TaskSet,
    ctx: &JobContext,
    t_c_prev: Option<u32>,
    t_com_prev: Option<u32>,
    schedule: &Schedule,
) -> Option<u32> {
    let delta_com = *ctx.delta.get(&com)?;
    let sum_d = *ctx.age_to_leaf.get(&com)?;
    let j_com = ts.jitter_of(com);
    let (lower, upper) = search_box(ctx, delta_com, sum_d, j_com, t_c_prev, t_com_prev);
    if lower > upper {
        return None;
    }
    schedule
        .execution_slots(com)
        .into_iter()
        .filter(|&s| s as i64 >= lower && s as i64 <= upper)
        .last()
}

fn search_box(
    ctx: &JobContext,
    delta_com: u32,
    sum_d: u32,
    j_com: u32,
    t_c_prev: Option<u32>,
    t_com_prev: Option<u32>,
) -> (i64, i64) {
    let (k, p_l, j_l) = (ctx.k as i64, ctx.p_l as i64, ctx.j_l as i64);
    if ctx.k == 1 {
        // First-subperiod bounds as stated for adaptation safety.
        let lower = (ctx.omega_len as i64 - delta_com as i64).max(1);
        let upper = k * p_l + j_l - delta_com as i64;
        return (lower, upper);
    }
    let mut lower = k * p_l - j_l - sum_d as i64;
    if let Some(prev) = t_c_prev {
        lower = lower.max(prev as i64 + 1);
    }
    let mut upper = k * p_l + j_l - delta_com as i64;
    if let Some(prev) = t_com_prev {
        lower = lower.max(prev as i64 + p_l - j_com as i64);
        upper = upper.min(prev as i64 + p_l + j_com as i64);
    }
    (lower.max(1), upper)
}

/// Orders sibling `(task, edge age, jitter)` triples per the mode, ties by
/// ascending task id.
pub fn order_siblings(siblings: &mut [(TaskId, u32, u32)], ordering: SiblingOrder) {
    match ordering {
        SiblingOrder::AgeFirst => siblings.sort_by_key(|&(id, age, _)| (age, id)),
        SiblingOrder::JitterFirst => siblings.sort_by_key(|&(id, _, j)| (j, id)),
    }
}

fn offsets(j: u32) -> impl Iterator<Item = i64> {
    std::iter::once(0).chain((1..=j as i64).flat_map(|d| [d, -d]))
}

/// Finds a free slot near `target` per the shifting strategy, within the
/// task's jitter bound.
///
/// A time-slot counts as occupied for the task when the exact cell is
/// filled or any task already in that time-slot intersects with it.
pub fn resolve_slot(
    task: TaskId,
    target: u32,
    schedule: &Schedule,
    ts: &TaskSet,
    iota: &IntersectionMatrix,
    mode: SchedulerMode,
) -> Option<(u32, u32)> {
    resolve_with(task, target, ts.jitter_of(task), schedule, iota, mode, |_| true)
}

/// Candidate walk of [`resolve_slot`] with an extra admissibility predicate
/// on the time-slot. `j` bounds the deviation from `target`.
fn resolve_with(
    task: TaskId,
    target: u32,
    j: u32,
    schedule: &Schedule,
    iota: &IntersectionMatrix,
    mode: SchedulerMode,
    accept: impl Fn(u32) -> bool,
) -> Option<(u32, u32)> {
    let h = schedule.horizon();
    let m = schedule.channels();
    let slot_ok = |t: u32| -> bool {
        accept(t)
            && !(1..=m).any(|c| {
                schedule
                    .cell(t, c)
                    .iter()
                    .any(|&other| iota.intersects(other, task))
            })
    };
    let cell_free = |t: u32, c: u32| schedule.cell(t, c).is_empty();
    let ts_of = |off: i64| -> Option<u32> {
        let t = target as i64 + off;
        (t >= 1 && t <= h as i64).then_some(t as u32)
    };
    match mode.shifting {
        Shifting::TimeFirst => {
            for c in 1..=m {
                for off in offsets(j) {
                    if let Some(t) = ts_of(off) {
                        if slot_ok(t) && cell_free(t, c) {
                            return Some((t, c));
                        }
                    }
                }
            }
        }
        Shifting::ChannelFirst => {
            for off in offsets(j) {
                if let Some(t) = ts_of(off) {
                    if !slot_ok(t) {
                        continue;
                    }
                    for c in 1..=m {
                        if cell_free(t, c) {
                            return Some((t, c));
                        }
                    }
                }
            }
        }
    }
    None
}

/// Places the leaf for subperiod `k`: target `k·P_l`, shifted within the
/// leaf's jitter bound but kept inside the subperiod window.
pub fn place_leaf(
    ctx: &JobContext,
    schedule: &Schedule,
    iota: &IntersectionMatrix,
    mode: SchedulerMode,
) -> Option<(u32, u32)> {
    let target = ctx.k * ctx.p_l;
    let (lo, hi) = ((ctx.k - 1) * ctx.p_l + 1, ctx.k * ctx.p_l);
    resolve_with(ctx.leaf, target, ctx.j_l, schedule, iota, mode, |t| {
        t >= lo && t <= hi
    })
}

/// Schedules a task set with the given mode.
pub fn schedule(ts: &TaskSet, mode: SchedulerMode) -> HeurOutcome {
    Engine::new(ts, mode).run()
}

struct Engine<'a> {
    ts: &'a TaskSet,
    iota: IntersectionMatrix,
    mode: SchedulerMode,
    s: Schedule,
    h: u32,
}

type Blocked = (TaskId, u32);

impl<'a> Engine<'a> {
    fn new(ts: &'a TaskSet, mode: SchedulerMode) -> Engine<'a> {
        Engine {
            iota: intersection_matrix(ts),
            mode,
            s: Schedule::new(ts.hyperperiod(), ts.channels()),
            h: ts.hyperperiod(),
            ts,
        }
    }

    fn window_start(&self, task: TaskId, t: u32) -> u32 {
        let p = self.ts.period_of(task);
        (t - 1) / p * p + 1
    }

    fn window_index(&self, task: TaskId, t: u32) -> u32 {
        (t - 1) / self.ts.period_of(task)
    }

    fn window_of(&self, task: TaskId, w: u32) -> (u32, u32) {
        let p = self.ts.period_of(task);
        (w * p + 1, (w + 1) * p)
    }

    fn window_occupied(&self, task: TaskId, w: u32) -> Option<u32> {
        let (lo, hi) = self.window_of(task, w);
        self.s
            .execution_slots(task)
            .into_iter()
            .find(|&t| t >= lo && t <= hi)
    }

    fn latest_before(&self, task: TaskId, t: u32) -> Option<u32> {
        self.s
            .execution_slots(task)
            .into_iter()
            .filter(|&e| e < t)
            .last()
    }

    /// C7 checks of candidate `t` against executions in adjacent windows.
    fn gaps_ok(&self, task: TaskId, t: u32) -> bool {
        let p = self.ts.period_of(task) as i64;
        let j = self.ts.jitter_of(task) as i64;
        let w = self.window_index(task, t);
        let pre = w.checked_sub(1).and_then(|v| self.window_occupied(task, v));
        let nxt = self.window_occupied(task, w + 1);
        let gap_ok = |g: i64| (g - p).abs() <= j;
        let g_pre = pre.map(|a| t as i64 - a as i64);
        let g_nxt = nxt.map(|a| a as i64 - t as i64);
        if let Some(g) = g_pre {
            if !gap_ok(g) {
                return false;
            }
            if let Some(b) = w.checked_sub(2).and_then(|v| self.window_occupied(task, v)) {
                let prev_gap = pre.unwrap() as i64 - b as i64;
                if (g - prev_gap).abs() > j {
                    return false;
                }
            }
        }
        if let Some(g) = g_nxt {
            if !gap_ok(g) {
                return false;
            }
            if let Some(b) = self.window_occupied(task, w + 2) {
                let next_gap = b as i64 - nxt.unwrap() as i64;
                if (next_gap - g).abs() > j {
                    return false;
                }
            }
        }
        if let (Some(a), Some(b)) = (g_pre, g_nxt) {
            if (b - a).abs() > j {
                return false;
            }
        }
        true
    }

    /// Admissible range for an execution of `parent` serving a dependent at
    /// `t_c` under age `d`: within the dependent's window, within age,
    /// strictly before.
    fn anchor_lo(&self, child: TaskId, t_c: u32, d: u32) -> u32 {
        self.window_start(child, t_c).max(t_c.saturating_sub(d))
    }

    /// An existing execution of `parent` serving `(child, t_c, d)`. The
    /// nearest preceding execution must fall in the admissible range; for
    /// same-period members it must also lie in the active subperiod window.
    fn serving_execution(
        &self,
        parent: TaskId,
        child: TaskId,
        t_c: u32,
        d: u32,
        ctx: &JobContext,
    ) -> Option<u32> {
        let e = self.latest_before(parent, t_c)?;
        if e < self.anchor_lo(child, t_c, d) {
            return None;
        }
        if self.ts.period_of(parent) == ctx.p_l {
            let (lo, hi) = self.window_of(parent, ctx.k - 1);
            if e < lo || e > hi {
                return None;
            }
        }
        Some(e)
    }

    /// Places `task` near `target` subject to the walk strategy plus the
    /// caller's predicate; returns the chosen slot.
    fn place(
        &mut self,
        task: TaskId,
        target: u32,
        j: u32,
        accept: impl Fn(&Engine<'a>, u32) -> bool,
    ) -> Option<u32> {
        let found = {
            let this = &*self;
            resolve_with(task, target, j, &this.s, &this.iota, this.mode, |t| {
                accept(this, t)
                    && this.respects_dependents(task, t)
                    && this.respects_dependencies(task, t)
            })
        };
        let (t, c) = found?;
        self.s.place(task, t, c);
        Some(t)
    }

    /// A candidate slot for `task` must keep every already-placed dependent
    /// execution servable: when a dependent's serving interval falls into
    /// the window the candidate occupies — the window's single execution —
    /// the candidate has to lie inside that interval (unless an execution of
    /// `task` elsewhere already serves it).
    fn respects_dependents(&self, task: TaskId, t: u32) -> bool {
        let p = self.ts.period_of(task);
        let w_lo = self.window_start(task, t);
        let w_hi = w_lo + p - 1;
        for edge in self.ts.dependents_of(task) {
            for &t_q in &self.s.execution_slots(edge.to) {
                let lo = self
                    .window_start(edge.to, t_q)
                    .max(t_q.saturating_sub(edge.max_age));
                let hi = t_q - 1;
                if hi < lo || lo > w_hi || hi < w_lo {
                    continue;
                }
                if t >= lo && t <= hi {
                    continue;
                }
                // An execution in another window may still serve it.
                if !self
                    .s
                    .execution_slots(task)
                    .iter()
                    .any(|&x| x >= lo && x <= hi)
                {
                    return false;
                }
            }
        }
        true
    }

    /// Mirror of `respects_dependents`: every already-placed dependency must
    /// still be able to serve the candidate slot. A dependency whose windows
    /// covering the serving interval are all occupied by executions outside
    /// it can never produce a serving execution, so the candidate is
    /// rejected.
    fn respects_dependencies(&self, task: TaskId, t: u32) -> bool {
        for edge in self.ts.dependencies_of(task) {
            let lo = self
                .window_start(task, t)
                .max(t.saturating_sub(edge.max_age));
            let hi = t - 1;
            if hi < lo {
                return false;
            }
            if self
                .s
                .execution_slots(edge.from)
                .iter()
                .any(|&x| x >= lo && x <= hi)
            {
                continue;
            }
            let w_lo = self.window_index(edge.from, lo);
            let w_hi = self.window_index(edge.from, hi);
            if (w_lo..=w_hi).all(|w| self.window_occupied(edge.from, w).is_some()) {
                return false;
            }
        }
        true
    }

    fn run(mut self) -> HeurOutcome {
        if self.ts.tasks().is_empty() {
            return HeurOutcome {
                status: HeurStatus::Feasible,
                schedule: Some(self.s),
            };
        }
        let mut jobs: Vec<&JobSpec> = self.ts.jobs().iter().collect();
        jobs.sort_by_key(|j| (std::cmp::Reverse(longest_path(self.ts, j)), j.id));
        for job in jobs {
            if let Err((task, subperiod)) = self.run_job(job) {
                return HeurOutcome {
                    status: HeurStatus::Unschedulable { task, subperiod },
                    schedule: None,
                };
            }
        }
        if let Err(blocked) = self.fill_holes() {
            return HeurOutcome {
                status: HeurStatus::Unschedulable {
                    task: blocked.0,
                    subperiod: blocked.1,
                },
                schedule: None,
            };
        }
        let report = validate(&self.s, self.ts).expect("dimensions match by construction");
        if report.overall {
            HeurOutcome {
                status: HeurStatus::Feasible,
                schedule: Some(self.s),
            }
        } else {
            let v = &report.violations[0];
            HeurOutcome {
                status: HeurStatus::Unschedulable {
                    task: v.tasks.first().copied().unwrap_or(TaskId(0)),
                    subperiod: 0,
                },
                schedule: None,
            }
        }
    }

    fn run_job(&mut self, job: &JobSpec) -> Result<(), Blocked> {
        let reps = self.h / job.period;
        let mut prev_used: BTreeMap<TaskId, u32> = BTreeMap::new();
        for k in 1..=reps {
            let ctx = JobContext::new(self.ts, job, k);
            let mut cur_used: BTreeMap<TaskId, u32> = BTreeMap::new();
            // Leaf: reuse an execution already in this window; else, when a
            // common task of the job is already scheduled inside the search
            // box, derive the leaf slot forward from it; else place at the
            // end of the subperiod.
            let t_l = match self
                .window_occupied(job.leaf, k - 1)
                .or_else(|| self.forward_from_common(job, &ctx, &prev_used))
            {
                Some(t) => t,
                None => {
                    let target = k * job.period;
                    let (lo, hi) = self.window_of(job.leaf, k - 1);
                    let leaf = job.leaf;
                    let placed = self.place(leaf, target, ctx.j_l, |e, t| {
                        t >= lo && t <= hi && e.gaps_ok(leaf, t)
                    });
                    placed.ok_or((job.leaf, k))?
                }
            };
            cur_used.insert(job.leaf, t_l);
            self.descend(job.leaf, t_l, &ctx, &prev_used, &mut cur_used)?;
            prev_used = cur_used;
        }
        Ok(())
    }

    /// Searches the schedule for an already-placed common task of the
    /// active job (deepest first) and, when one sits inside the search box,
    /// schedules the chain from it toward the leaf with the forward
    /// equation. Returns the leaf's slot on success.
    fn forward_from_common(
        &mut self,
        job: &JobSpec,
        ctx: &JobContext,
        prev_used: &BTreeMap<TaskId, u32>,
    ) -> Option<u32> {
        let t_c_prev = prev_used.get(&job.leaf).copied().or_else(|| {
            self.latest_before(job.leaf, (ctx.k - 1) * ctx.p_l + 1)
        });
        let mut anchor: Option<(TaskId, u32, u32)> = None;
        for (&m, &depth) in &ctx.delta {
            if m == job.leaf || self.s.execution_slots(m).is_empty() {
                continue;
            }
            let t_com_prev = prev_used
                .get(&m)
                .copied()
                .or_else(|| self.latest_before(m, (ctx.k - 1) * ctx.p_l + 1));
            if let Some(e) = find_common_execution(m, self.ts, ctx, t_c_prev, t_com_prev, &self.s)
            {
                if anchor.map_or(true, |(_, _, d)| depth > d) {
                    anchor = Some((m, e, depth));
                }
            }
        }
        let (mut cur, mut t_p, _) = anchor?;
        let snapshot = self.s.clone();
        let members: std::collections::BTreeSet<TaskId> = job.members.iter().copied().collect();
        while cur != job.leaf {
            // Step toward the leaf along the longest in-job path so every
            // intermediate common task gets a forward-derived slot.
            let edge = self
                .ts
                .dependents_of(cur)
                .filter(|e| members.contains(&e.to) && ctx.delta.contains_key(&e.to))
                .max_by_key(|e| (ctx.delta.get(&e.to).copied().unwrap_or(0), std::cmp::Reverse(e.to)))?;
            let (next, d) = (edge.to, edge.max_age);
            // Reuse an execution of `next` this execution already serves.
            let reuse = self
                .s
                .execution_slots(next)
                .into_iter()
                .find(|&t| t > t_p && t <= t_p + d && self.window_start(next, t) <= t_p);
            let t_next = match reuse {
                Some(t) => t,
                None => {
                    let delta_next = ctx.delta.get(&next).copied().unwrap_or(0);
                    let target = forward_slot(t_p, None, ctx.k, ctx.p_l, delta_next.max(1), d);
                    let is_leaf = next == job.leaf;
                    let (w_lo, w_hi) = self.window_of(job.leaf, ctx.k - 1);
                    let placed = self.place(next, target, self.ts.jitter_of(next), |e, t| {
                        t > t_p
                            && t <= t_p.saturating_add(d)
                            && e.window_start(next, t) <= t_p
                            && (!is_leaf || (t >= w_lo && t <= w_hi))
                            && e.window_occupied(next, e.window_index(next, t)).is_none()
                            && e.gaps_ok(next, t)
                    });
                    match placed {
                        Some(t) => t,
                        None => {
                            // Roll the chain back; the caller falls back to
                            // plain leaf placement.
                            self.s = snapshot;
                            return None;
                        }
                    }
                }
            };
            cur = next;
            t_p = t_next;
        }
        Some(t_p)
    }

    /// Processes all in-job dependencies of `child` (placed at `t_c`),
    /// recursively.
    fn descend(
        &mut self,
        child: TaskId,
        t_c: u32,
        ctx: &JobContext,
        prev_used: &BTreeMap<TaskId, u32>,
        cur_used: &mut BTreeMap<TaskId, u32>,
    ) -> Result<(), Blocked> {
        let members: std::collections::BTreeSet<TaskId> = self
            .ts
            .job(ctx.job)
            .map(|j| j.members.iter().copied().collect())
            .unwrap_or_default();
        let mut parents: Vec<(TaskId, u32, u32)> = self
            .ts
            .dependencies_of(child)
            .filter(|e| members.contains(&e.from))
            .map(|e| (e.from, e.max_age, self.ts.jitter_of(e.from)))
            .collect();
        order_siblings(&mut parents, self.mode.ordering);
        for (p, d, _) in parents {
            if cur_used.contains_key(&p) {
                // Already handled in this subperiod (diamond join); accept
                // if it serves this child too, otherwise the final
                // validation decides.
                continue;
            }
            let slot = self.settle_parent(p, child, t_c, d, ctx, prev_used)?;
            cur_used.insert(p, slot);
            self.descend(p, slot, ctx, prev_used, cur_used)?;
        }
        Ok(())
    }

    /// Finds or creates an execution of parent `p` serving `(child, t_c)`.
    fn settle_parent(
        &mut self,
        p: TaskId,
        child: TaskId,
        t_c: u32,
        d: u32,
        ctx: &JobContext,
        prev_used: &BTreeMap<TaskId, u32>,
    ) -> Result<u32, Blocked> {
        // 1. An execution that already serves this child.
        if let Some(e) = self.serving_execution(p, child, t_c, d, ctx) {
            return Ok(e);
        }
        // 2. Search-box reuse of an execution left by an earlier job.
        if !self.s.execution_slots(p).is_empty() {
            let t_c_prev = prev_used.get(&child).copied().or_else(|| {
                self.latest_before(child, self.window_start(child, t_c))
            });
            let t_com_prev = prev_used.get(&p).copied();
            if let Some(e) = find_common_execution(p, self.ts, ctx, t_c_prev, t_com_prev, &self.s) {
                if e < t_c && e >= self.anchor_lo(child, t_c, d) {
                    return Ok(e);
                }
            }
        }
        // 3. Fresh placement via the backward equation.
        let delta_p = ctx.delta.get(&p).copied().unwrap_or(1);
        let t_c_prev = prev_used
            .get(&child)
            .copied()
            .or_else(|| self.latest_before(child, self.window_start(child, t_c)));
        let target = backward_slot(t_c, t_c_prev, ctx.omega_len, delta_p, d);
        let lo = self.anchor_lo(child, t_c, d);
        let same_period = self.ts.period_of(p) == ctx.p_l;
        let k = ctx.k;
        // The backward target may undershoot the C3/C4-feasible interval
        // [lo, t_c-1] when the child sits early in its window; the walk is
        // anchored inside the interval so the jitter-bounded offsets can
        // reach valid slots.
        let anchor = target.min(t_c.saturating_sub(1)).max(lo).max(1);
        let placed = self.place(p, anchor, self.ts.jitter_of(p), |e, t| {
            if t >= t_c || t < lo {
                return false;
            }
            if same_period && e.window_index(p, t) != k - 1 {
                return false;
            }
            if e.window_occupied(p, e.window_index(p, t)).is_some() {
                return false;
            }
            // No later execution of p may sit between t and the child.
            if e.s
                .execution_slots(p)
                .iter()
                .any(|&x| x > t && x < t_c)
            {
                return false;
            }
            e.gaps_ok(p, t)
        });
        placed.ok_or((p, ctx.k))
    }

    /// Fills any still-empty period window of any task (members that no
    /// job traversal reached), targeting the window end.
    fn fill_holes(&mut self) -> Result<(), Blocked> {
        let ids: Vec<TaskId> = self.ts.tasks().iter().map(|t| t.id).collect();
        for id in ids {
            let p_t = self.ts.period_of(id);
            for w in 0..self.h / p_t {
                if self.window_occupied(id, w).is_some() {
                    continue;
                }
                let (lo, hi) = self.window_of(id, w);
                let target = hi;
                // The window is fully walkable: synthetic targets carry no
                // jitter promise of their own, C7 still gates candidates.
                let placed = self.place(id, target, p_t, |e, t| {
                    t >= lo && t <= hi && e.gaps_ok(id, t)
                });
                if placed.is_none() {
                    return Err((id, w + 1));
                }
            }
        }
        Ok(())
    }
}

/// Longest directed path length (edge count) from any member to the leaf.
fn longest_path(ts: &TaskSet, job: &JobSpec) -> u32 {
    let members: std::collections::BTreeSet<TaskId> = job.members.iter().copied().collect();
    fn depth(
        ts: &TaskSet,
        members: &std::collections::BTreeSet<TaskId>,
        memo: &mut BTreeMap<TaskId, u32>,
        t: TaskId,
    ) -> u32 {
        if let Some(&v) = memo.get(&t) {
            return v;
        }
        let v = ts
            .dependencies_of(t)
            .filter(|e| members.contains(&e.from))
            .map(|e| 1 + depth(ts, members, memo, e.from))
            .max()
            .unwrap_or(0);
        memo.insert(t, v);
        v
    }
    let mut memo = BTreeMap::new();
    depth(ts, &members, &mut memo, job.leaf)
}

/// Outcome of [`adapt`]: the merged task set and the heuristic result.
#[derive(Debug, Clone)]
pub struct AdaptResult {
    pub taskset: TaskSet,
    pub outcome: HeurOutcome,
    pub merge: MergeInfo,
}

/// Slimmed-down merge data kept for reporting.
#[derive(Debug, Clone)]
pub struct MergeInfo {
    pub combined: Schedule,
    pub first: Schedule,
    pub second: Schedule,
    pub task_offset: u32,
}

/// Merges two scheduled task sets and reschedules the union, guaranteeing
/// transition safety against both source schedules.
pub fn adapt(
    a: &TaskSet,
    sa: &Schedule,
    b: &TaskSet,
    sb: &Schedule,
    mode: SchedulerMode,
) -> Result<AdaptResult, MergeError> {
    let MergeResult {
        taskset,
        combined,
        first,
        second,
        task_offset,
    } = merge_schedules(a, sa, b, sb)?;
    let mut outcome = schedule(&taskset, mode);
    if let (HeurStatus::Feasible, Some(new)) = (&outcome.status, &outcome.schedule) {
        let ok = validate_transition(&first, new, &taskset)
            .map(|r| r.overall)
            .unwrap_or(false)
            && validate_transition(&second, new, &taskset)
                .map(|r| r.overall)
                .unwrap_or(false);
        if !ok {
            outcome = HeurOutcome {
                status: HeurStatus::Unschedulable {
                    task: TaskId(0),
                    subperiod: 0,
                },
                schedule: None,
            };
        }
    }
    Ok(AdaptResult {
        taskset,
        outcome,
        merge: MergeInfo {
            combined,
            first,
            second,
            task_offset,
        },
    })
}
