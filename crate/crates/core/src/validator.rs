//! Ground-truth schedule checker.
//!
//! [`validate`] checks a schedule against the eight textual constraints
//! (1–7 within one schedule, 8 across a schedule switch via
//! [`validate_transition`]) and reports every violated constraint with at
//! least one witness. Both solvers treat this module as the oracle: a
//! schedule is valid iff the report is clean.
//!
//! Constraint 6 is checked for every task, not only leaves, using the fixed
//! windows `[(p-1)·P_T+1, p·P_T]`; the prose version names leaf tasks but the
//! formal per-period quantification covers all tasks, and we follow the
//! formal version.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{intersection_matrix, Schedule, TaskId, TaskSet};

/// A single constraint violation with its witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Constraint id 1..=8.
    pub constraint: u8,
    pub tasks: Vec<TaskId>,
    /// Time-slots involved.
    pub slots: Vec<u32>,
    pub message: String,
}

/// Per-constraint pass/fail with violation witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub overall: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        ValidationReport {
            overall: violations.is_empty(),
            violations,
        }
    }

    pub fn violates(&self, constraint: u8) -> bool {
        self.violations.iter().any(|v| v.constraint == constraint)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValidatorError {
    #[error("schedule dimensions {got_h}x{got_m} do not match taskset {want_h}x{want_m}")]
    DimensionMismatch {
        got_h: u32,
        got_m: u32,
        want_h: u32,
        want_m: u32,
    },
    #[error("task {0} appears in the new schedule but not in the merged taskset")]
    TaskMissing(TaskId),
}

fn violation(constraint: u8, tasks: Vec<TaskId>, slots: Vec<u32>, message: String) -> Violation {
    Violation {
        constraint,
        tasks,
        slots,
        message,
    }
}

/// Checks constraints 1–7 of a schedule against its task set.
pub fn validate(schedule: &Schedule, ts: &TaskSet) -> Result<ValidationReport, ValidatorError> {
    if schedule.horizon() != ts.hyperperiod() || schedule.channels() != ts.channels() {
        return Err(ValidatorError::DimensionMismatch {
            got_h: schedule.horizon(),
            got_m: schedule.channels(),
            want_h: ts.hyperperiod(),
            want_m: ts.channels(),
        });
    }
    let mut v = Vec::new();
    let h = schedule.horizon();
    let iota = intersection_matrix(ts);

    // Unknown tasks in the grid are dangling; report as C1 witnesses.
    for id in schedule.task_ids() {
        if !ts.contains(id) {
            v.push(violation(
                1,
                vec![id],
                vec![],
                format!("task {id} in grid is not part of the taskset"),
            ));
        }
    }

    // C1: at most one task per slot.
    for t in 1..=h {
        for c in 1..=schedule.channels() {
            let cell = schedule.cell(t, c);
            if cell.len() > 1 {
                v.push(violation(
                    1,
                    cell.to_vec(),
                    vec![t],
                    format!("{} tasks share slot (t={t}, c={c})", cell.len()),
                ));
            }
        }
    }

    // C2: intersecting tasks must not share a time-slot.
    for t in 1..=h {
        let present: Vec<TaskId> = {
            let mut p: Vec<TaskId> = schedule
                .tasks_at_time(t)
                .map(|(id, _)| id)
                .filter(|id| ts.contains(*id))
                .collect();
            p.sort();
            p.dedup();
            p
        };
        for i in 0..present.len() {
            for j in (i + 1)..present.len() {
                if iota.intersects(present[i], present[j]) {
                    v.push(violation(
                        2,
                        vec![present[i], present[j]],
                        vec![t],
                        format!(
                            "intersecting tasks {} and {} share time-slot {t}",
                            present[i], present[j]
                        ),
                    ));
                }
            }
        }
    }

    // C3/C4 jointly per (dependency, dependent) execution pair: the nearest
    // preceding execution of the dependency within the dependent's current
    // period window must exist (C3) and lie within maxAge slots (C4).
    for task in ts.tasks() {
        if !ts.contains(task.id) {
            continue;
        }
        let p_t = ts.period_of(task.id);
        for exec_t in schedule.execution_slots(task.id) {
            let window_start = (exec_t - 1) / p_t * p_t + 1;
            for edge in ts.dependencies_of(task.id) {
                let dep_slots = schedule.execution_slots(edge.from);
                let nearest = dep_slots
                    .iter()
                    .copied()
                    .filter(|&s| s >= window_start && s < exec_t)
                    .max();
                match nearest {
                    None => v.push(violation(
                        3,
                        vec![edge.from, task.id],
                        vec![exec_t],
                        format!(
                            "dependency {} not scheduled before {} (t={exec_t}) within its period window",
                            edge.from, task.id
                        ),
                    )),
                    Some(s) if exec_t - s > edge.max_age => v.push(violation(
                        4,
                        vec![edge.from, task.id],
                        vec![s, exec_t],
                        format!(
                            "dependency {} at t={s} is {} slots before {} at t={exec_t}, maxAge {}",
                            edge.from,
                            exec_t - s,
                            task.id,
                            edge.max_age
                        ),
                    )),
                    _ => {}
                }
            }
        }
    }

    // C5: all dependents in one job use the same execution of a common
    // short-period dependency. Checked per job instance over the members
    // whose period equals the job period.
    for job in ts.jobs() {
        let p_l = job.period;
        let instances = h / p_l;
        for &dep in &job.members {
            if ts.period_of(dep) >= p_l {
                continue; // only shared shorter-period dependencies
            }
            let dep_slots = schedule.execution_slots(dep);
            let dependents: Vec<TaskId> = job
                .members
                .iter()
                .copied()
                .filter(|&m| ts.period_of(m) == p_l && ts.max_age(dep, m).is_some())
                .collect();
            if dependents.len() < 2 {
                continue;
            }
            for k in 0..instances {
                let mut used: Vec<(TaskId, u32, u32)> = Vec::new(); // (dependent, its slot, used dep slot)
                for &d in &dependents {
                    let slots = schedule.execution_slots(d);
                    let Some(&own) = slots.get(k as usize) else {
                        continue; // missing execution is C6's business
                    };
                    if let Some(u) = dep_slots.iter().copied().filter(|&s| s < own).max() {
                        used.push((d, own, u));
                    }
                }
                if used.len() >= 2 && used.iter().any(|&(_, _, u)| u != used[0].2) {
                    v.push(violation(
                        5,
                        used.iter().map(|&(d, _, _)| d).collect(),
                        used.iter().map(|&(_, _, u)| u).collect(),
                        format!(
                            "job {}: dependents of {} use different executions of it in instance {}",
                            job.id,
                            dep,
                            k + 1
                        ),
                    ));
                }
            }
        }
    }

    // C6: each task scheduled exactly once per its own period window.
    for task in ts.tasks() {
        let p_t = ts.period_of(task.id);
        let slots = schedule.execution_slots(task.id);
        for p in 1..=h / p_t {
            let (lo, hi) = ((p - 1) * p_t + 1, p * p_t);
            let count = slots.iter().filter(|&&s| s >= lo && s <= hi).count();
            if count != 1 {
                v.push(violation(
                    6,
                    vec![task.id],
                    vec![lo, hi],
                    format!(
                        "task {} scheduled {count} times in period window [{lo}, {hi}] (period {p_t})",
                        task.id
                    ),
                ));
            }
        }
    }

    // C7: consecutive scheduled periods stay within the jitter bound, both
    // against the nominal period and against each other.
    for task in ts.tasks() {
        let p_t = ts.period_of(task.id);
        let j_t = task.max_jitter;
        let slots = schedule.execution_slots(task.id);
        let gaps: Vec<i64> = slots.windows(2).map(|w| (w[1] - w[0]) as i64).collect();
        for (i, &g) in gaps.iter().enumerate() {
            if (g - p_t as i64).unsigned_abs() as u32 > j_t {
                v.push(violation(
                    7,
                    vec![task.id],
                    vec![slots[i], slots[i + 1]],
                    format!(
                        "task {}: scheduled period {g} deviates from {p_t} by more than jitter {j_t}",
                        task.id
                    ),
                ));
            }
        }
        for w in gaps.windows(2) {
            if (w[1] - w[0]).unsigned_abs() as u32 > j_t {
                v.push(violation(
                    7,
                    vec![task.id],
                    vec![],
                    format!(
                        "task {}: consecutive periods {} and {} differ by more than jitter {j_t}",
                        task.id, w[0], w[1]
                    ),
                ));
            }
        }
    }

    Ok(ValidationReport::from_violations(v))
}

/// Checks constraint 8 across a schedule switch.
///
/// The new schedule is appended after the old one on a concatenated timeline:
/// for every task present in both, the gap between its final execution in the
/// old schedule and its first execution in the new one must deviate from P_T
/// by at most J_T. Tasks of the old schedule that are absent from the merged
/// taskset are skipped.
pub fn validate_transition(
    old: &Schedule,
    new: &Schedule,
    merged: &TaskSet,
) -> Result<ValidationReport, ValidatorError> {
    if new.horizon() != merged.hyperperiod() || new.channels() != merged.channels() {
        return Err(ValidatorError::DimensionMismatch {
            got_h: new.horizon(),
            got_m: new.channels(),
            want_h: merged.hyperperiod(),
            want_m: merged.channels(),
        });
    }
    for id in new.task_ids() {
        if !merged.contains(id) {
            return Err(ValidatorError::TaskMissing(id));
        }
    }
    let mut v = Vec::new();
    let h_old = old.horizon();
    for id in old.task_ids() {
        if !merged.contains(id) {
            continue;
        }
        let Some(&last_old) = old.execution_slots(id).last() else {
            continue;
        };
        let Some(&first_new) = new.execution_slots(id).first() else {
            v.push(violation(
                8,
                vec![id],
                vec![last_old],
                format!("task {id} present in old schedule has no execution in the new one"),
            ));
            continue;
        };
        let gap = (h_old + first_new) as i64 - last_old as i64;
        let p_t = merged.period_of(id) as i64;
        let j_t = merged.jitter_of(id) as i64;
        if (gap - p_t).abs() > j_t {
            v.push(violation(
                8,
                vec![id],
                vec![last_old, first_new],
                format!(
                    "task {id}: switchover gap {gap} deviates from period {p_t} by more than jitter {j_t}"
                ),
            ));
        }
    }
    Ok(ValidationReport::from_violations(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Schedule;
    use crate::testutil::{chain_taskset, fig1_taskset, independent_tasks, single_task};

    fn tid(v: u32) -> TaskId {
        TaskId(v)
    }

    #[test]
    fn empty_schedule_for_empty_taskset_passes() {
        let ts = TaskSet::empty(2);
        let s = Schedule::new(1, 2);
        let rep = validate(&s, &ts).unwrap();
        assert!(rep.overall);
    }

    #[test]
    fn dimension_mismatch() {
        let ts = single_task(4, 0, 1);
        let s = Schedule::new(3, 1);
        assert!(matches!(
            validate(&s, &ts),
            Err(ValidatorError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn shared_cell_violates_c1() {
        let ts = independent_tasks(&[(2, 0), (2, 0)], 1, false);
        let mut s = Schedule::new(2, 1);
        s.place(tid(0), 1, 1);
        s.place(tid(1), 1, 1);
        s.place(tid(0), 2, 1); // wrong anyway, but isolate C1
        let rep = validate(&s, &ts).unwrap();
        assert!(rep.violates(1));
    }

    #[test]
    fn same_node_same_timeslot_violates_c2() {
        // Fig. 1 tasks 1 and 2 run on the same node.
        let ts = fig1_taskset();
        let mut s = valid_fig1_schedule();
        // Move task 2 into task 1's time-slot on a free channel.
        let (t2, c2) = s.executions(tid(2))[0];
        let (t1, _) = s.executions(tid(1))[0];
        s.remove(tid(2), t2, c2);
        s.place(tid(2), t1, 2);
        let rep = validate(&s, &ts).unwrap();
        assert!(rep.violates(2));
    }

    /// Hand-built valid schedule for the Fig. 1 taskset (H=10, M=2).
    fn valid_fig1_schedule() -> Schedule {
        let mut s = Schedule::new(10, 2);
        // job 1 (period 5): 5 -> 4 -> 1 twice; job 0 (period 10): 2, 3 -> 0,
        // reusing the second executions of 5 and 4.
        s.place(tid(5), 1, 1);
        s.place(tid(4), 2, 1);
        s.place(tid(1), 4, 1);
        s.place(tid(5), 6, 1);
        s.place(tid(4), 7, 1);
        s.place(tid(1), 9, 1);
        s.place(tid(3), 8, 1);
        s.place(tid(2), 3, 1);
        s.place(tid(0), 10, 1);
        s
    }

    #[test]
    fn hand_built_fig1_schedule_is_valid() {
        let ts = fig1_taskset();
        let rep = validate(&valid_fig1_schedule(), &ts).unwrap();
        assert!(rep.overall, "violations: {:?}", rep.violations);
    }

    #[test]
    fn jitter_swing_violates_c7() {
        // Period 5, J=2, consecutive gaps 3 then 7: each gap is inside P±J
        // but the swing exceeds J.
        let ts = independent_tasks(&[(5, 2), (20, 0)], 1, false);
        let mut s = Schedule::new(20, 1);
        s.place(tid(0), 4, 1);
        s.place(tid(0), 7, 1);
        s.place(tid(0), 14, 1);
        s.place(tid(0), 19, 1);
        s.place(tid(1), 1, 1);
        let rep = validate(&s, &ts).unwrap();
        assert!(rep.violates(7));
    }

    #[test]
    fn extra_shared_dependency_execution_flips_c5() {
        // Metamorphic: start from the valid Fig. 1 schedule, then let task 0
        // see a different execution of 5 than task 3 does.
        let ts = fig1_taskset();
        let mut s = valid_fig1_schedule();
        // Move task 5's second execution between 3 (t=8) and 0 (t=10).
        s.remove(tid(5), 6, 1);
        s.place(tid(5), 9, 1);
        let rep = validate(&s, &ts).unwrap();
        assert!(!rep.overall);
        assert!(rep.violates(5), "violations: {:?}", rep.violations);
    }

    #[test]
    fn missing_dependency_violates_c3_and_stale_violates_c4() {
        let ts = chain_taskset(2, 6, 2, 0);
        let mut s = Schedule::new(6, 1);
        s.place(tid(1), 5, 1);
        let rep = validate(&s, &ts).unwrap();
        assert!(rep.violates(3));
        s.place(tid(0), 1, 1);
        let rep = validate(&s, &ts).unwrap();
        assert!(rep.violates(4)); // age 4 > maxAge 2
        s.remove(tid(0), 1, 1);
        s.place(tid(0), 4, 1);
        let rep = validate(&s, &ts).unwrap();
        assert!(rep.overall, "violations: {:?}", rep.violations);
    }

    #[test]
    fn channel_permutation_preserves_validity() {
        let ts = fig1_taskset();
        let s = valid_fig1_schedule();
        let mut permuted = Schedule::new(10, 2);
        for t in 1..=10 {
            for c in 1..=2 {
                for &task in s.cell(t, c) {
                    permuted.place(task, t, 3 - c);
                }
            }
        }
        assert!(validate(&permuted, &ts).unwrap().overall);
    }

    #[test]
    fn transition_examples() {
        // Task P=5, J=1: last old execution at H_old-2, first new at slot 4
        // gives gap 6 = P+1, allowed.
        let ts = independent_tasks(&[(5, 1)], 1, false);
        let mut old = Schedule::new(5, 1);
        old.place(tid(0), 3, 1);
        let mut new = Schedule::new(5, 1);
        new.place(tid(0), 4, 1);
        let rep = validate_transition(&old, &new, &ts).unwrap();
        assert!(rep.overall, "violations: {:?}", rep.violations);

        // Identical schedules repeated: gap is exactly P.
        let mut same = Schedule::new(5, 1);
        same.place(tid(0), 3, 1);
        assert!(validate_transition(&same, &same.clone(), &ts).unwrap().overall);

        // J=0 shifted by one across the boundary fails.
        let ts0 = independent_tasks(&[(5, 0)], 1, false);
        let mut shifted = Schedule::new(5, 1);
        shifted.place(tid(0), 4, 1);
        let rep = validate_transition(&old, &shifted, &ts0).unwrap();
        assert!(rep.violates(8));
    }

    #[test]
    fn transition_skips_tasks_absent_from_merged_set() {
        let ts = independent_tasks(&[(5, 1)], 1, false);
        let mut old = Schedule::new(5, 1);
        old.place(tid(0), 3, 1);
        old.place(tid(9), 2, 1); // decommissioned task
        let mut new = Schedule::new(5, 1);
        new.place(tid(0), 3, 1);
        assert!(validate_transition(&old, &new, &ts).unwrap().overall);
    }

    #[test]
    fn c6_checks_all_tasks_not_only_leaves() {
        let ts = fig1_taskset();
        let mut s = valid_fig1_schedule();
        // Drop the second execution of non-leaf task 4 (period 5).
        s.remove(tid(4), 7, 1);
        let rep = validate(&s, &ts).unwrap();
        assert!(rep.violates(6));
    }
}
