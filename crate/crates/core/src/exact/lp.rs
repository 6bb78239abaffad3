//! CPLEX-LP export of the integer model and solution-file import.
//!
//! Variables are named `a_{task}_{channel}_{slot}`. Constraint rows carry
//! labels `c{K}_...` where K is the model constraint number, so row counts
//! per constraint family can be audited directly on the text.
//!
//! The path-coupling auxiliaries are instantiated per (entry, leaf,
//! time-slot) triple: `r` / `rb` are the integer path sums over the
//! same-period and shorter-period member sets, `rd` / `rbd` their all-or-
//! nothing indicator binaries. Triples whose shorter-period set is empty
//! contribute no rows (the coupling is vacuous there).

use std::fmt::Write as _;

use thiserror::Error;

use crate::exact::{MilpInstance, Objective};
use crate::model::{path_sets, intersection_matrix, Schedule, TaskId, TaskSet};

#[derive(Debug, Error)]
pub enum LpError {
    #[error("malformed solution line {line}: {text:?}")]
    BadLine { line: usize, text: String },
    #[error("solution references unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("variable {0:?} is out of the model's index space")]
    OutOfRange(String),
}

fn var(task: TaskId, c: u32, t: u32) -> String {
    format!("a_{}_{}_{}", task, c, t)
}

/// Serializes the model in CPLEX-LP text format.
pub fn export_milp(instance: &MilpInstance<'_>) -> String {
    let ts = instance.taskset;
    let h = ts.hyperperiod();
    let m = ts.channels();
    let iota = intersection_matrix(ts);
    let ids: Vec<TaskId> = ts.tasks().iter().map(|t| t.id).collect();

    let mut cons = String::new();
    let mut binaries: Vec<String> = Vec::new();
    let mut generals: Vec<String> = Vec::new();
    for &id in &ids {
        for c in 1..=m {
            for t in 1..=h {
                binaries.push(var(id, c, t));
            }
        }
    }

    let sum_channels = |id: TaskId, t: u32, sign: &str| -> String {
        (1..=m)
            .map(|c| format!(" {} {}", sign, var(id, c, t)))
            .collect()
    };

    // Constraint 1: one task per (time-slot, channel) cell.
    for t in 1..=h {
        for c in 1..=m {
            if ids.is_empty() {
                continue;
            }
            let lhs: String = ids.iter().map(|&id| format!(" + {}", var(id, c, t))).collect();
            let _ = writeln!(cons, " c1_t{}_c{}:{} <= 1", t, c, lhs);
        }
    }

    // Constraint 2: intersecting pairs never share a time-slot.
    for t in 1..=h {
        for (i, &u) in ids.iter().enumerate() {
            for &w in &ids[i + 1..] {
                if iota.intersects(u, w) {
                    let lhs = format!("{}{}", sum_channels(u, t, "+"), sum_channels(w, t, "+"));
                    let _ = writeln!(cons, " c2_t{}_T{}_T{}:{} <= 1", t, u, w, lhs);
                }
            }
        }
    }

    // Constraint 3: dependency executions in the age window, as printed.
    for &id in &ids {
        let p_t = ts.period_of(id);
        for edge in ts.dependencies_of(id) {
            for t in 1..=h {
                let lo = 1.max(t.saturating_sub(edge.max_age)).max(t / p_t * p_t);
                let hi = t.max(1);
                let mut lhs = String::new();
                for i in lo..=hi {
                    lhs.push_str(&sum_channels(edge.from, i, "+"));
                }
                lhs.push_str(&sum_channels(id, t, "-"));
                let _ = writeln!(cons, " c3_T{}_U{}_t{}:{} >= 0", id, edge.from, t, lhs);
            }
        }
    }

    // Constraint 4: exactly one execution per period window.
    for &id in &ids {
        let p_t = ts.period_of(id);
        for p in 1..=h / p_t {
            let mut lhs = String::new();
            for t in (p - 1) * p_t + 1..=p * p_t {
                lhs.push_str(&sum_channels(id, t, "+"));
            }
            let _ = writeln!(cons, " c4_T{}_p{}:{} = 1", id, p, lhs);
        }
    }

    // Constraint 5: a matching execution one period earlier, within ±J.
    for &id in &ids {
        let p_t = ts.period_of(id);
        let j_t = ts.jitter_of(id);
        for t in 1..=h {
            let lo = 1.max(t.saturating_sub(p_t + j_t));
            let hi = 1.max((t + j_t).saturating_sub(p_t));
            let mut lhs = String::new();
            for i in lo..=hi {
                lhs.push_str(&sum_channels(id, i, "+"));
            }
            lhs.push_str(&sum_channels(id, t, "-"));
            let _ = writeln!(cons, " c5_T{}_t{}:{} >= 0", id, t, lhs);
        }
    }

    // Constraints 8, 10, 11: whole-path coupling per (entry, leaf, t),
    // skipped when the shorter-period member set is empty.
    let paths = path_sets(ts);
    for ((entry, leaf), pair) in &paths.sets {
        if pair.omega_short.is_empty() {
            continue;
        }
        let p_l = ts.period_of(*leaf);
        for t in 1..=h {
            let hi = (t + p_l).min(h);
            let r = format!("r_{}_{}_{}", entry, leaf, t);
            let rb = format!("rb_{}_{}_{}", entry, leaf, t);
            let rd = format!("rd_{}_{}_{}", entry, leaf, t);
            let rbd = format!("rbd_{}_{}_{}", entry, leaf, t);
            let mut lhs = format!(" + {}", r);
            for &tk in &pair.omega {
                for i in t..=hi {
                    lhs.push_str(&sum_channels(tk, i, "-"));
                }
            }
            let _ = writeln!(cons, " c8_E{}_L{}_t{}:{} = 0", entry, leaf, t, lhs);
            let mut lhs = format!(" + {}", rb);
            for &tk in &pair.omega_short {
                for i in t..=hi {
                    lhs.push_str(&sum_channels(tk, i, "-"));
                }
            }
            let _ = writeln!(cons, " c8b_E{}_L{}_t{}:{} = 0", entry, leaf, t, lhs);
            let _ = writeln!(
                cons,
                " c10_E{}_L{}_t{}: + {} - {} {} = 0",
                entry,
                leaf,
                t,
                r,
                pair.omega.len(),
                rd
            );
            let _ = writeln!(
                cons,
                " c10b_E{}_L{}_t{}: + {} - {} {} = 0",
                entry,
                leaf,
                t,
                rb,
                pair.omega_short.len(),
                rbd
            );
            let _ = writeln!(cons, " c11_E{}_L{}_t{}: + {} - {} >= 0", entry, leaf, t, rbd, rd);
            generals.push(r);
            generals.push(rb);
            binaries.push(rd);
            binaries.push(rbd);
        }
    }

    // Constraint 12 (adaptation): every combined-schedule occurrence is
    // covered within ±J of its slot.
    if let Some(combined) = instance.combined {
        for &id in &ids {
            let j_t = ts.jitter_of(id);
            for t in 1..=h {
                let occ = (1..=m).filter(|&c| combined.cell(t, c).contains(&id)).count();
                if occ == 0 {
                    continue;
                }
                let lo = 1.max(t.saturating_sub(j_t));
                let hi = (t + j_t).min(h);
                let mut lhs = String::new();
                for j in lo..=hi {
                    lhs.push_str(&sum_channels(id, j, "+"));
                }
                let _ = writeln!(cons, " c12_T{}_t{}:{} >= {}", id, t, lhs, occ);
            }
        }
    }

    // Objective.
    let mut header = String::new();
    match instance.objective {
        Objective::None => {
            header.push_str("Minimize\n obj:\n");
        }
        Objective::MinimizeSlotChanges => {
            // |x| split: u >= x and u >= -x, minimize sum of u. The 1/N
            // scaling is constant and omitted; it cannot change the argmin.
            let mut terms = String::new();
            for &id in &ids {
                let p_t = ts.period_of(id);
                for t in 1..=h.saturating_sub(p_t) {
                    let u = format!("u_{}_{}", id, t);
                    let diff = format!(
                        "{}{}",
                        sum_channels(id, t, "-"),
                        sum_channels(id, t + p_t, "+")
                    );
                    let _ = writeln!(cons, " obj1p_T{}_t{}: + {}{} >= 0", id, t, u, diff);
                    let diff = format!(
                        "{}{}",
                        sum_channels(id, t, "+"),
                        sum_channels(id, t + p_t, "-")
                    );
                    let _ = writeln!(cons, " obj1n_T{}_t{}: + {}{} >= 0", id, t, u, diff);
                    let _ = write!(terms, " + {}", u);
                    generals.push(u);
                }
            }
            let _ = writeln!(header, "Minimize\n obj:{}", terms);
        }
        Objective::MaximizeStability => {
            let combined = instance
                .combined
                .expect("stability objective requires a combined schedule");
            let mut terms = String::new();
            for &id in &ids {
                for t in 1..=h {
                    let occ = (1..=m).filter(|&c| combined.cell(t, c).contains(&id)).count();
                    if occ == 0 {
                        continue;
                    }
                    for c in 1..=m {
                        let _ = write!(terms, " + {} {}", occ, var(id, c, t));
                    }
                }
            }
            let _ = writeln!(header, "Maximize\n obj:{}", terms);
        }
    }

    let mut out = header;
    out.push_str("Subject To\n");
    out.push_str(&cons);
    if !generals.is_empty() {
        out.push_str("Generals\n");
        for g in &generals {
            let _ = writeln!(out, " {}", g);
        }
    }
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for b in &binaries {
            let _ = writeln!(out, " {}", b);
        }
    }
    out.push_str("End\n");
    out
}

/// Serializes a schedule as `name value` solution lines for round-trips.
pub fn export_solution(schedule: &Schedule) -> String {
    let mut out = String::new();
    for t in 1..=schedule.horizon() {
        for c in 1..=schedule.channels() {
            for &task in schedule.cell(t, c) {
                let _ = writeln!(out, "{} 1", var(task, c, t));
            }
        }
    }
    out
}

/// Parses a `name value` solution listing back into a Schedule.
///
/// Only `a_*` variables are placed; auxiliary variables are ignored. Values
/// within 0.5 of 1 count as set (solvers emit floats like `1.0000000002`).
pub fn import_solution(text: &str, ts: &TaskSet) -> Result<Schedule, LpError> {
    let h = ts.hyperperiod();
    let m = ts.channels();
    let mut schedule = Schedule::new(h, m);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('\\') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(name), Some(value)) = (parts.next(), parts.next()) else {
            return Err(LpError::BadLine {
                line: i + 1,
                text: raw.to_string(),
            });
        };
        let Ok(value) = value.parse::<f64>() else {
            return Err(LpError::BadLine {
                line: i + 1,
                text: raw.to_string(),
            });
        };
        if !name.starts_with("a_") {
            continue;
        }
        if value < 0.5 {
            continue;
        }
        let fields: Vec<&str> = name[2..].split('_').collect();
        let [task, c, t] = fields[..] else {
            return Err(LpError::UnknownVariable(name.to_string()));
        };
        let (Ok(task), Ok(c), Ok(t)) = (task.parse::<u32>(), c.parse::<u32>(), t.parse::<u32>())
        else {
            return Err(LpError::UnknownVariable(name.to_string()));
        };
        let task = TaskId(task);
        if !ts.contains(task) || c < 1 || c > m || t < 1 || t > h {
            return Err(LpError::OutOfRange(name.to_string()));
        }
        schedule.place(task, t, c);
    }
    Ok(schedule)
}
