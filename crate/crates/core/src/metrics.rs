//! Quantitative schedule measures: allocation jitter, distribution,
//! stability and slot-allocation histograms.
//!
//! All metrics are computed in exact rational arithmetic so thresholds stay
//! bit-stable.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Schedule, TaskSet};

pub type Rational = Ratio<i64>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("schedules have different dimensions")]
    DimensionMismatch,
    #[error("empty schedule corpus")]
    EmptyCorpus,
}

/// Jitter, distribution, stability and slot histogram for one schedule (or
/// schedule pair, for `stability`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    pub mean_jitter: Rational,
    pub distribution: Rational,
}

/// Mean of the per-task mean jitter.
///
/// Per task with sorted executions `e_1..e_n`: `Σ_i ((e_i - e_1) mod P_T) / n`;
/// the report averages over all tasks. An empty schedule yields 0 by
/// convention.
pub fn jitter(schedule: &Schedule, ts: &TaskSet) -> Rational {
    if ts.tasks().is_empty() {
        return Rational::from_integer(0);
    }
    let mut total = Rational::from_integer(0);
    for task in ts.tasks() {
        let slots = schedule.execution_slots(task.id);
        if slots.is_empty() {
            continue;
        }
        let p = ts.period_of(task.id) as i64;
        let first = slots[0] as i64;
        let sum: i64 = slots.iter().map(|&e| (e as i64 - first).rem_euclid(p)).sum();
        total += Rational::new(sum, slots.len() as i64);
    }
    total / Rational::from_integer(ts.tasks().len() as i64)
}

/// Distribution metric: used→unused time-slot transitions per scheduled
/// execution.
///
/// `x_t = 1` iff slot `t-1` is used and slot `t` is unused; slot 0 counts as
/// unused, so `x_1 = 0`. No wrap-around at the hyperperiod boundary. A
/// schedule with zero executions yields 0 by convention.
pub fn distribution(schedule: &Schedule) -> Rational {
    let executions = schedule.execution_count() as i64;
    if executions == 0 {
        return Rational::from_integer(0);
    }
    let mut transitions = 0i64;
    for t in 2..=schedule.horizon() {
        if schedule.time_slot_used(t - 1) && !schedule.time_slot_used(t) {
            transitions += 1;
        }
    }
    Rational::new(transitions, executions)
}

/// Distribution of a schedule pair: the sum of the individual distributions,
/// in [0, 2].
pub fn pair_distribution(a: &Schedule, b: &Schedule) -> Rational {
    distribution(a) + distribution(b)
}

/// Schedule stability: the number of unmoved allocations between two
/// schedules of equal horizon — `Σ_T Σ_t occ_before(T,t) · occ_after(T,t)`
/// on channel-collapsed occupancy.
pub fn stability(before: &Schedule, after: &Schedule) -> Result<u64, MetricsError> {
    if before.horizon() != after.horizon() || before.channels() != after.channels() {
        return Err(MetricsError::DimensionMismatch);
    }
    let mut ids = before.task_ids();
    ids.extend(after.task_ids());
    ids.sort();
    ids.dedup();
    let mut count = 0u64;
    for id in ids {
        for t in 1..=before.horizon() {
            if before.occupies(id, t) && after.occupies(id, t) {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Per-time-slot allocation probability over a corpus of schedules sharing a
/// horizon, plus the mean used fraction as the uniform-allocation reference.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlotHistogram {
    /// `probability[t-1]` = fraction of schedules with time-slot t used.
    pub probability: Vec<Rational>,
    /// Mean of `probability`; the reference line for a uniform allocation.
    pub reference: Rational,
}

pub fn slot_histogram(corpus: &[&Schedule]) -> Result<SlotHistogram, MetricsError> {
    let Some(first) = corpus.first() else {
        return Err(MetricsError::EmptyCorpus);
    };
    let h = first.horizon();
    if corpus.iter().any(|s| s.horizon() != h) {
        return Err(MetricsError::DimensionMismatch);
    }
    let n = corpus.len() as i64;
    let probability: Vec<Rational> = (1..=h)
        .map(|t| {
            let used = corpus.iter().filter(|s| s.time_slot_used(t)).count() as i64;
            Rational::new(used, n)
        })
        .collect();
    let reference = probability.iter().sum::<Rational>() / Rational::from_integer(h as i64);
    Ok(SlotHistogram {
        probability,
        reference,
    })
}
