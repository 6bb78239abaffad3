//! Depth-first branch-and-bound search.

use std::time::{Duration, Instant};

use num_rational::Ratio;

use crate::exact::Objective;
use crate::metrics::Rational;
use crate::model::{intersection_matrix, IntersectionMatrix, Schedule, TaskId, TaskSet};
use crate::validator::validate;

/// Search result status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Feasible,
    Infeasible,
    /// Budget exhausted before a feasible schedule was found. When an
    /// incumbent exists at timeout the status is `Feasible` with
    /// `stats.proven == false` instead.
    TimedOut,
}

#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    pub nodes: u64,
    pub elapsed: Duration,
    /// Whether the search ran to exhaustion (optimality / infeasibility
    /// proof) rather than stopping on the time budget.
    pub proven: bool,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub schedule: Option<Schedule>,
    pub objective_value: Option<Rational>,
    pub stats: SolveStats,
}

impl SolveOutcome {
    pub fn is_feasible(&self) -> bool {
        self.status == SolveStatus::Feasible
    }
}

/// One decision variable: the (slot, channel) of a task's execution in one
/// of its period windows.
struct Var {
    task: TaskId,
    ti: usize,
    /// 0-based period index.
    p: usize,
    /// Candidate (t, c) pairs, in deterministic branch order.
    domain: Vec<(u32, u32)>,
}

struct Ctx<'a> {
    ts: &'a TaskSet,
    iota: IntersectionMatrix,
    vars: Vec<Var>,
    /// Per task index: variable indices ordered by period index.
    task_vars: Vec<Vec<usize>>,
    /// Per task index: slot assigned per period index (0 = unassigned).
    task_slots: Vec<Vec<u32>>,
    /// Channel-collapsed occupancy per time-slot: task indices present.
    at_time: Vec<Vec<usize>>,
    /// Grid cell occupancy: (t-1)*M + (c-1) -> assigned or not.
    cell_used: Vec<bool>,
    periods: Vec<u32>,
    jitters: Vec<u32>,
    /// For adaptation: per task index, the combined schedule's slots for it.
    c_slots: Vec<Vec<u32>>,
    /// Current (t, c) per variable; (0, 0) = unassigned.
    assignment: Vec<(u32, u32)>,
    objective: Objective,
    deadline: Instant,
    nodes: u64,
    timed_out: bool,
    best_schedule: Option<Schedule>,
    /// Unnormalized objective of the incumbent (misalignment count for the
    /// jitter objective, negated kept-count for stability).
    best_cost: i64,
    h: u32,
    m: u32,
}

const NODE_CHECK_MASK: u64 = 0xFF;

impl<'a> Ctx<'a> {
    fn new(ts: &'a TaskSet, objective: Objective, budget: Duration) -> Self {
        let h = ts.hyperperiod();
        let m = ts.channels();
        let n = ts.tasks().len();
        let periods: Vec<u32> = ts.tasks().iter().map(|t| ts.period_of(t.id)).collect();
        let jitters: Vec<u32> = ts.tasks().iter().map(|t| t.max_jitter).collect();

        // Fail-first static order: ascending slack, where slack approximates
        // the window width left by the age and jitter constraints.
        let slack = |ti: usize| -> u32 {
            let id = ts.tasks()[ti].id;
            let min_age = ts
                .dependencies_of(id)
                .map(|e| e.max_age)
                .min()
                .unwrap_or(u32::MAX);
            periods[ti]
                .min(2 * jitters[ti] + 1)
                .min(min_age.saturating_add(1))
        };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&ti| (slack(ti), ts.tasks()[ti].id));

        let mut vars = Vec::new();
        let mut task_vars = vec![Vec::new(); n];
        for &ti in &order {
            let id = ts.tasks()[ti].id;
            let p_t = periods[ti];
            for p in 0..(h / p_t) as usize {
                let lo = p as u32 * p_t + 1;
                let hi = (p as u32 + 1) * p_t;
                let mut domain = Vec::with_capacity(((hi - lo + 1) * m) as usize);
                for t in lo..=hi {
                    for c in 1..=m {
                        domain.push((t, c));
                    }
                }
                task_vars[ti].push(vars.len());
                vars.push(Var {
                    task: id,
                    ti,
                    p,
                    domain,
                });
            }
        }

        Ctx {
            iota: intersection_matrix(ts),
            task_slots: (0..n)
                .map(|ti| vec![0; (h / periods[ti]) as usize])
                .collect(),
            task_vars,
            at_time: vec![Vec::new(); h as usize + 1],
            cell_used: vec![false; (h * m) as usize],
            periods,
            jitters,
            c_slots: vec![Vec::new(); n],
            assignment: vec![(0, 0); vars.len()],
            objective,
            deadline: Instant::now() + budget,
            nodes: 0,
            timed_out: false,
            best_schedule: None,
            best_cost: i64::MAX,
            vars,
            ts,
            h,
            m,
        }
    }

    fn cell_idx(&self, t: u32, c: u32) -> usize {
        ((t - 1) * self.m + (c - 1)) as usize
    }

    /// C7 pieces involving the period gaps around window `p` of task `ti`,
    /// assuming slot `t` for that window. Only fully determined gaps are
    /// checked, so pruning never cuts a valid completion.
    fn jitter_ok(&self, ti: usize, p: usize, t: u32) -> bool {
        let p_t = self.periods[ti] as i64;
        let j_t = self.jitters[ti] as i64;
        let slots = &self.task_slots[ti];
        let slot_at = |i: isize| -> Option<i64> {
            if i < 0 || i as usize >= slots.len() {
                return None;
            }
            if i as usize == p {
                Some(t as i64)
            } else if slots[i as usize] != 0 {
                Some(slots[i as usize] as i64)
            } else {
                None
            }
        };
        let gap = |i: isize| -> Option<i64> { Some(slot_at(i + 1)? - slot_at(i)?) };
        for gi in [p as isize - 1, p as isize] {
            if let Some(g) = gap(gi) {
                if (g - p_t).abs() > j_t {
                    return false;
                }
            }
        }
        for gi in [p as isize - 2, p as isize - 1, p as isize] {
            if let (Some(a), Some(b)) = (gap(gi), gap(gi + 1)) {
                if (b - a).abs() > j_t {
                    return false;
                }
            }
        }
        true
    }

    /// C3/C4 for a dependent execution at `slot`, with `extra` optionally
    /// standing in as a not-yet-committed execution of the dependency.
    ///
    /// Returns false only when the requirement is provably unsatisfiable:
    /// every dependency variable that could land in the admissible range is
    /// already assigned outside it.
    fn dep_window_ok(&self, dep_ti: usize, dep_extra: Option<u32>, dependent_ti: usize, slot: u32, age: u32) -> bool {
        let p_t = self.periods[dependent_ti];
        let wstart = (slot - 1) / p_t * p_t + 1;
        let lo = wstart.max(slot.saturating_sub(age));
        if slot <= lo {
            // No admissible preceding slot exists at all.
            return false;
        }
        let in_range = |s: u32| s >= lo && s < slot;
        if let Some(e) = dep_extra {
            if in_range(e) {
                return true;
            }
        }
        let dep_p = self.periods[dep_ti];
        let mut any_open = false;
        for (w, &s) in self.task_slots[dep_ti].iter().enumerate() {
            let (w_lo, w_hi) = (w as u32 * dep_p + 1, (w as u32 + 1) * dep_p);
            if w_hi < lo || w_lo >= slot {
                continue;
            }
            if s == 0 {
                any_open = true;
            } else if in_range(s) {
                return true;
            }
        }
        any_open
    }

    /// C12: the combined schedule's occurrence of task `ti` at `ct` must be
    /// covered by an execution in `[ct-J, ct+J]`. Prunes only when every
    /// window intersecting that range is assigned.
    fn coverage_ok(&self, ti: usize, assumed: Option<(usize, u32)>) -> bool {
        if self.c_slots[ti].is_empty() {
            return true;
        }
        let j = self.jitters[ti];
        let p_t = self.periods[ti];
        for &ct in &self.c_slots[ti] {
            let lo = ct.saturating_sub(j).max(1);
            let hi = (ct + j).min(self.h);
            let mut satisfied = false;
            let mut open = false;
            for (w, &s) in self.task_slots[ti].iter().enumerate() {
                let (w_lo, w_hi) = (w as u32 * p_t + 1, (w as u32 + 1) * p_t);
                if w_hi < lo || w_lo > hi {
                    continue;
                }
                let eff = match assumed {
                    Some((aw, at)) if aw == w => Some(at),
                    _ => (s != 0).then_some(s),
                };
                match eff {
                    Some(s) if s >= lo && s <= hi => satisfied = true,
                    Some(_) => {}
                    None => open = true,
                }
            }
            if !satisfied && !open {
                return false;
            }
        }
        true
    }

    fn candidate_ok(&self, vi: usize, t: u32, c: u32) -> bool {
        let var = &self.vars[vi];
        if self.cell_used[self.cell_idx(t, c)] {
            return false;
        }
        // C2: no intersecting task anywhere in this time-slot.
        for &other in &self.at_time[t as usize] {
            if other == var.ti || self.iota.intersects(self.ts.tasks()[other].id, var.task) {
                return false;
            }
        }
        if !self.jitter_ok(var.ti, var.p, t) {
            return false;
        }
        // C3/C4 with the candidate as the dependent...
        for edge in self.ts.dependencies_of(var.task) {
            let dep_ti = self.ts.task_index(edge.from);
            if !self.dep_window_ok(dep_ti, None, var.ti, t, edge.max_age) {
                return false;
            }
        }
        // ...and as the dependency: committed dependent executions must stay
        // satisfiable once this window is fixed.
        for edge in self.ts.dependents_of(var.task) {
            let dependent_ti = self.ts.task_index(edge.to);
            for &s in self.task_slots[dependent_ti].iter().filter(|&&s| s != 0) {
                if !self.dep_window_ok_assuming(var.ti, var.p, t, dependent_ti, s, edge.max_age) {
                    return false;
                }
            }
        }
        if !self.coverage_ok(var.ti, Some((var.p, t))) {
            return false;
        }
        true
    }

    /// Like [`dep_window_ok`] but with window `w` of the dependency pinned
    /// to `t` (the candidate under test).
    fn dep_window_ok_assuming(
        &self,
        dep_ti: usize,
        w: usize,
        t: u32,
        dependent_ti: usize,
        slot: u32,
        age: u32,
    ) -> bool {
        let p_t = self.periods[dependent_ti];
        let wstart = (slot - 1) / p_t * p_t + 1;
        let lo = wstart.max(slot.saturating_sub(age));
        if slot <= lo {
            return false;
        }
        let in_range = |s: u32| s >= lo && s < slot;
        let dep_p = self.periods[dep_ti];
        let mut any_open = false;
        for (wi, &s) in self.task_slots[dep_ti].iter().enumerate() {
            let (w_lo, w_hi) = (wi as u32 * dep_p + 1, (wi as u32 + 1) * dep_p);
            if w_hi < lo || w_lo >= slot {
                continue;
            }
            let eff = if wi == w { Some(t) } else { (s != 0).then_some(s) };
            match eff {
                Some(s) if in_range(s) => return true,
                Some(_) => {}
                None => any_open = true,
            }
        }
        any_open
    }

    /// Unnormalized jitter-objective lower bound: two per misaligned pair of
    /// consecutive assigned windows. Exact once all variables are assigned.
    fn misalignment_bound(&self) -> i64 {
        let mut total = 0;
        for (ti, slots) in self.task_slots.iter().enumerate() {
            let p_t = self.periods[ti];
            for w in slots.windows(2) {
                if w[0] != 0 && w[1] != 0 && w[1] != w[0] + p_t {
                    total += 2;
                }
            }
        }
        total
    }

    /// Stability objective: kept allocations so far, plus the optimistic
    /// count of unassigned variables from `depth` onward.
    fn stability_cost(&self, depth: usize) -> i64 {
        let mut kept = 0i64;
        for (ti, slots) in self.task_slots.iter().enumerate() {
            for &s in slots.iter().filter(|&&s| s != 0) {
                if self.c_slots[ti].contains(&s) {
                    kept += 1;
                }
            }
        }
        // Maximization expressed as minimizing the negated optimistic value.
        -(kept + (self.vars.len() - depth) as i64)
    }

    fn bound(&self, depth: usize) -> i64 {
        match self.objective {
            Objective::None => 0,
            Objective::MinimizeSlotChanges => self.misalignment_bound(),
            Objective::MaximizeStability => self.stability_cost(depth),
        }
    }

    fn build_schedule(&self) -> Schedule {
        let mut s = Schedule::new(self.h, self.m);
        for (vi, &(t, c)) in self.assignment.iter().enumerate() {
            if t != 0 {
                s.place(self.vars[vi].task, t, c);
            }
        }
        s
    }

    /// Forward check: every still-unassigned variable must retain at least
    /// one consistent candidate, otherwise the current partial assignment is
    /// a dead end.
    fn forward_ok(&self, from: usize) -> bool {
        for vi in from..self.vars.len() {
            let alive = self.vars[vi]
                .domain
                .iter()
                .any(|&(t, c)| self.candidate_ok(vi, t, c));
            if !alive {
                return false;
            }
        }
        true
    }

    fn search(&mut self, depth: usize) {
        if self.timed_out {
            return;
        }
        self.nodes += 1;
        if (self.nodes == 1 || self.nodes & NODE_CHECK_MASK == 0) && Instant::now() >= self.deadline
        {
            self.timed_out = true;
            return;
        }
        if self.bound(depth) >= self.best_cost {
            return;
        }
        if depth == self.vars.len() {
            let schedule = self.build_schedule();
            let report = validate(&schedule, self.ts).expect("dimensions match by construction");
            if !report.overall {
                return;
            }
            let cost = self.bound(depth);
            if cost < self.best_cost {
                self.best_cost = cost;
                self.best_schedule = Some(schedule);
            }
            return;
        }
        let n_domain = self.vars[depth].domain.len();
        for di in 0..n_domain {
            let (t, c) = self.vars[depth].domain[di];
            if !self.candidate_ok(depth, t, c) {
                continue;
            }
            self.assign(depth, t, c);
            if self.forward_ok(depth + 1) {
                self.search(depth + 1);
            }
            self.unassign(depth, t, c);
            if self.timed_out {
                return;
            }
            if self.objective == Objective::None && self.best_schedule.is_some() {
                return;
            }
        }
    }

    fn assign(&mut self, vi: usize, t: u32, c: u32) {
        let (ti, p) = (self.vars[vi].ti, self.vars[vi].p);
        self.task_slots[ti][p] = t;
        self.at_time[t as usize].push(ti);
        let idx = self.cell_idx(t, c);
        self.cell_used[idx] = true;
        self.assignment[vi] = (t, c);
    }

    fn unassign(&mut self, vi: usize, t: u32, c: u32) {
        let (ti, p) = (self.vars[vi].ti, self.vars[vi].p);
        self.task_slots[ti][p] = 0;
        let pos = self.at_time[t as usize].iter().rposition(|&x| x == ti).unwrap();
        self.at_time[t as usize].remove(pos);
        let idx = self.cell_idx(t, c);
        self.cell_used[idx] = false;
        self.assignment[vi] = (0, 0);
    }
}

/// Solves the decision or optimization problem for a task set.
pub fn solve(ts: &TaskSet, objective: Objective, budget: Duration) -> SolveOutcome {
    assert!(
        objective != Objective::MaximizeStability,
        "stability objective requires solve_adaptation"
    );
    run(ts, objective, budget, None, &[])
}

/// Solves the schedule-adaptation problem: feasibility of the merged task
/// set, maximizing the number of allocations kept from the combined
/// schedule, with each task's first execution restricted so the switchover
/// gap from every source schedule stays within period ± jitter.
pub fn solve_adaptation(
    merged: &TaskSet,
    combined: &Schedule,
    sources: &[&Schedule],
    budget: Duration,
) -> SolveOutcome {
    run(
        merged,
        Objective::MaximizeStability,
        budget,
        Some(combined),
        sources,
    )
}

fn run(
    ts: &TaskSet,
    objective: Objective,
    budget: Duration,
    combined: Option<&Schedule>,
    sources: &[&Schedule],
) -> SolveOutcome {
    let start = Instant::now();
    let mut ctx = Ctx::new(ts, objective, budget);
    if let Some(c) = combined {
        for (ti, spec) in ts.tasks().iter().enumerate() {
            ctx.c_slots[ti] = c.execution_slots(spec.id);
        }
        // Prefer keeping an allocation where the combined schedule has one.
        for var in &mut ctx.vars {
            let keep = &ctx.c_slots[var.ti];
            var.domain.sort_by_key(|&(t, c)| (!keep.contains(&t), t, c));
        }
    }
    // Switchover windows restrict each task's first execution.
    for src in sources {
        let h_old = src.horizon() as i64;
        for id in src.task_ids() {
            if !ts.contains(id) {
                continue;
            }
            let Some(&last) = src.execution_slots(id).last() else {
                continue;
            };
            let p_t = ts.period_of(id) as i64;
            let j_t = ts.jitter_of(id) as i64;
            let lo = (last as i64 + p_t - j_t - h_old).max(1);
            let hi = last as i64 + p_t + j_t - h_old;
            let ti = ts.task_index(id);
            if let Some(&vi) = ctx.task_vars[ti].first() {
                ctx.vars[vi]
                    .domain
                    .retain(|&(t, _)| (t as i64) >= lo && (t as i64) <= hi);
            }
        }
    }

    ctx.search(0);

    let elapsed = start.elapsed();
    let proven = !ctx.timed_out;
    let stats = SolveStats {
        nodes: ctx.nodes,
        elapsed,
        proven,
    };
    match ctx.best_schedule {
        Some(schedule) => {
            let objective_value = match objective {
                Objective::None => Some(Rational::from_integer(0)),
                Objective::MinimizeSlotChanges => Some(normalized_jitter_objective(
                    ctx.best_cost,
                    ts,
                )),
                Objective::MaximizeStability => {
                    // best_cost = -(kept + 0) at a complete assignment.
                    Some(Rational::from_integer(-ctx.best_cost))
                }
            };
            SolveOutcome {
                status: SolveStatus::Feasible,
                schedule: Some(schedule),
                objective_value,
                stats,
            }
        }
        None => SolveOutcome {
            status: if ctx.timed_out {
                SolveStatus::TimedOut
            } else {
                SolveStatus::Infeasible
            },
            schedule: None,
            objective_value: None,
            stats,
        },
    }
}

/// Scales the misalignment count by 1/N, N = Σ_T (H/P_T − 1) compared period
/// pairs. N = 0 (nothing to compare) yields 0.
pub(crate) fn normalized_jitter_objective(misalignment: i64, ts: &TaskSet) -> Rational {
    let h = ts.hyperperiod();
    let n: i64 = ts
        .tasks()
        .iter()
        .map(|t| (h / ts.period_of(t.id)) as i64 - 1)
        .sum();
    if n == 0 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(misalignment, n)
    }
}

/// The unnormalized jitter objective of a complete schedule:
/// `Σ_T Σ_{t=1}^{H-P_T} |occ_T(t) - occ_T(t+P_T)|` on channel-collapsed
/// occupancy.
pub fn misalignment_count(schedule: &Schedule, ts: &TaskSet) -> i64 {
    let h = ts.hyperperiod();
    let mut total = 0i64;
    for task in ts.tasks() {
        let p_t = ts.period_of(task.id);
        for t in 1..=h.saturating_sub(p_t) {
            let a = schedule.occupies(task.id, t) as i64;
            let b = schedule.occupies(task.id, t + p_t) as i64;
            total += (a - b).abs();
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{chain_taskset, fig1_taskset, independent_tasks, single_task};
    use std::time::Duration;

    const BUDGET: Duration = Duration::from_secs(30);

    fn tid(i: u32) -> TaskId {
        TaskId(i)
    }

    #[test]
    fn empty_taskset_is_feasible_with_zero_objective() {
        let ts = TaskSet::empty(2);
        let out = solve(&ts, Objective::None, BUDGET);
        assert_eq!(out.status, SolveStatus::Feasible);
        assert!(out.schedule.unwrap().is_empty());
        let out = solve(&ts, Objective::MinimizeSlotChanges, BUDGET);
        assert_eq!(out.objective_value, Some(Rational::from_integer(0)));
    }

    #[test]
    fn intersecting_pair_with_one_slot_is_infeasible() {
        // Both tasks share a node, period 1, H = 1: no time-slot may hold
        // both even with two channels.
        let ts = independent_tasks(&[(1, 0), (1, 0)], 2, true);
        let out = solve(&ts, Objective::None, BUDGET);
        assert_eq!(out.status, SolveStatus::Infeasible);
        assert!(out.stats.proven);
    }

    #[test]
    fn feasible_schedules_pass_validation() {
        for ts in [fig1_taskset(), chain_taskset(3, 6, 10, 1)] {
            let out = solve(&ts, Objective::None, BUDGET);
            assert_eq!(out.status, SolveStatus::Feasible);
            let s = out.schedule.unwrap();
            assert!(validate(&s, &ts).unwrap().overall);
        }
    }

    #[test]
    fn jitter_objective_reaches_zero_on_free_instances() {
        // A single task with H/P = 3 executions can always align perfectly.
        let ts = single_task(2, 1, 1);
        let big = {
            let mut raw = ts.to_raw();
            raw.hyperperiod = None;
            raw.jobs.push(crate::model::JobSpec {
                id: crate::model::JobId(1),
                period: 6,
                leaf: tid(1),
                members: vec![tid(1)],
            });
            raw.tasks.push(crate::model::TaskSpec {
                id: tid(1),
                node: crate::model::NodeId(1),
                max_jitter: 2,
            });
            raw.nodes.push(crate::model::NodeId(1));
            TaskSet::build(raw).unwrap()
        };
        let out = solve(&big, Objective::MinimizeSlotChanges, BUDGET);
        assert_eq!(out.status, SolveStatus::Feasible);
        assert_eq!(out.objective_value, Some(Rational::from_integer(0)));
        let s = out.schedule.unwrap();
        assert_eq!(misalignment_count(&s, &big), 0);
    }

    #[test]
    fn single_job_spanning_hyperperiod_has_zero_objective() {
        // Only one period pair exists per task; optimum is vacuously 0.
        let ts = chain_taskset(3, 6, 10, 1);
        let out = solve(&ts, Objective::MinimizeSlotChanges, BUDGET);
        assert_eq!(out.status, SolveStatus::Feasible);
        assert_eq!(out.objective_value, Some(Rational::from_integer(0)));
    }

    #[test]
    fn timeout_without_incumbent_reports_timed_out() {
        let ts = fig1_taskset();
        let out = solve(&ts, Objective::None, Duration::from_nanos(1));
        assert_eq!(out.status, SolveStatus::TimedOut);
        assert!(!out.stats.proven);
        assert!(out.schedule.is_none());
    }

    #[test]
    fn determinism() {
        let ts = fig1_taskset();
        let a = solve(&ts, Objective::None, BUDGET);
        let b = solve(&ts, Objective::None, BUDGET);
        assert_eq!(a.schedule, b.schedule);
        assert_eq!(a.stats.nodes, b.stats.nodes);
    }

    #[test]
    fn adaptation_fixed_point_keeps_all_allocations() {
        // The combined schedule is already valid: the solver keeps every
        // allocation, so the objective equals the execution count.
        use crate::exact::merge_schedules;
        let a = independent_tasks(&[(2, 1)], 2, false);
        let b = {
            let mut raw = independent_tasks(&[(2, 1)], 2, false).to_raw();
            raw.tasks[0].id = tid(5);
            raw.tasks[0].node = crate::model::NodeId(5);
            raw.nodes = vec![crate::model::NodeId(5)];
            raw.jobs[0].id = crate::model::JobId(5);
            raw.jobs[0].leaf = tid(5);
            raw.jobs[0].members = vec![tid(5)];
            raw.hyperperiod = None;
            TaskSet::build(raw).unwrap()
        };
        let mut sa = Schedule::new(2, 2);
        sa.place(tid(0), 1, 1);
        let mut sb = Schedule::new(2, 2);
        sb.place(tid(5), 2, 1);
        let m = merge_schedules(&a, &sa, &b, &sb).unwrap();
        let out = solve_adaptation(&m.taskset, &m.combined, &[&m.first, &m.second], BUDGET);
        assert_eq!(out.status, SolveStatus::Feasible);
        assert_eq!(
            out.objective_value,
            Some(Rational::from_integer(m.combined.execution_count() as i64))
        );
        let s = out.schedule.unwrap();
        assert_eq!(s.execution_slots(tid(0)), vec![1]);
        assert_eq!(s.execution_slots(tid(5)), vec![2]);
    }

    #[test]
    fn adaptation_resolves_collision_by_channel_move() {
        // Two non-intersecting tasks collide in C on (1,1); M = 2 lets the
        // solver fix it with a channel move only, keeping both time-slots.
        use crate::exact::merge_schedules;
        let a = independent_tasks(&[(2, 1)], 2, false);
        let b = {
            let mut raw = independent_tasks(&[(2, 1)], 2, false).to_raw();
            raw.tasks[0].id = tid(5);
            raw.tasks[0].node = crate::model::NodeId(5);
            raw.nodes = vec![crate::model::NodeId(5)];
            raw.jobs[0].id = crate::model::JobId(5);
            raw.jobs[0].leaf = tid(5);
            raw.jobs[0].members = vec![tid(5)];
            raw.hyperperiod = None;
            TaskSet::build(raw).unwrap()
        };
        let mut sa = Schedule::new(2, 2);
        sa.place(tid(0), 1, 1);
        let mut sb = Schedule::new(2, 2);
        sb.place(tid(5), 1, 1);
        let m = merge_schedules(&a, &sa, &b, &sb).unwrap();
        let out = solve_adaptation(&m.taskset, &m.combined, &[&m.first, &m.second], BUDGET);
        assert_eq!(out.status, SolveStatus::Feasible);
        // Both tasks stay in time-slot 1 (unmoved per the channel-collapsed
        // stability objective).
        assert_eq!(out.objective_value, Some(Rational::from_integer(2)));
        let s = out.schedule.unwrap();
        assert_eq!(s.execution_slots(tid(0)), vec![1]);
        assert_eq!(s.execution_slots(tid(5)), vec![1]);
        assert!(validate(&s, &m.taskset).unwrap().overall);
    }

    #[test]
    fn adaptation_with_zero_jitter_collision_is_infeasible() {
        // Same time-slot, J = 0 on both, M = 1, intersecting via shared
        // node: no legal move exists.
        use crate::exact::merge_schedules;
        let a = independent_tasks(&[(1, 0)], 1, true);
        let b = {
            let mut raw = independent_tasks(&[(1, 0)], 1, true).to_raw();
            raw.tasks[0].id = tid(5);
            raw.jobs[0].id = crate::model::JobId(5);
            raw.jobs[0].leaf = tid(5);
            raw.jobs[0].members = vec![tid(5)];
            raw.hyperperiod = None;
            TaskSet::build(raw).unwrap()
        };
        let mut sa = Schedule::new(1, 1);
        sa.place(tid(0), 1, 1);
        let mut sb = Schedule::new(1, 1);
        sb.place(tid(5), 1, 1);
        let m = merge_schedules(&a, &sa, &b, &sb).unwrap();
        let out = solve_adaptation(&m.taskset, &m.combined, &[&m.first, &m.second], BUDGET);
        assert_eq!(out.status, SolveStatus::Infeasible);
    }
}
