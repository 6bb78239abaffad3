//! Acceptance suite: nine pinned criteria covering solver correctness,
//! engine soundness, objective effect, the distribution hypothesis, mode
//! dominance, merge success, histogram shape, runtime predictability and
//! metric unit correctness. Each test prints a single PASS line with the
//! measured quantities; a failed assertion is the FAIL line.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use tc_sched_core::bench::{run_hypothesis, run_merge_benchmark, Engine, MergeStats};
use tc_sched_core::exact::{misalignment_count, solve, Objective, SolveStatus};
use tc_sched_core::gen::{generate, generate_pairs, GenParams};
use tc_sched_core::heuristic::{schedule as heur_schedule, SchedulerMode};
use tc_sched_core::metrics::{
    distribution, jitter, pair_distribution, slot_histogram, stability, Rational,
};
use tc_sched_core::model::{
    intersection_matrix, JobId, JobSpec, NodeId, RawTaskSet, Schedule, TaskId, TaskSet, TaskSpec,
};
use tc_sched_core::validator::validate;

const MODE_00: SchedulerMode = SchedulerMode::ALL[0];
const MODE_01: SchedulerMode = SchedulerMode::ALL[1];
const MODE_10: SchedulerMode = SchedulerMode::ALL[2];
const MODE_11: SchedulerMode = SchedulerMode::ALL[3];

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Standard single-taskset corpus parameters: moderately constrained
/// instances that all four heuristic modes schedule most of the time.
fn standard_params(seed: u64) -> GenParams {
    GenParams {
        hyperperiod: 16,
        dependencies: 6,
        jobs: 2,
        tasks: 8,
        nodes: 12,
        channels: 3,
        seed,
        jitter_range: (1, 3),
        age_range: (3, 10),
    }
}

/// Shared pair corpus (same shape within each pair): 500 pairs.
fn pair_corpus() -> &'static Vec<(TaskSet, TaskSet)> {
    static PAIRS: OnceLock<Vec<(TaskSet, TaskSet)>> = OnceLock::new();
    PAIRS.get_or_init(|| {
        generate_pairs(&standard_params(400), 500).expect("pair corpus parameters are feasible")
    })
}

/// Merge benchmark over all four heuristic modes on the shared pair corpus,
/// computed once and reused by the dominance and merge-floor criteria.
fn merge_stats() -> &'static Vec<MergeStats> {
    static STATS: OnceLock<Vec<MergeStats>> = OnceLock::new();
    STATS.get_or_init(|| {
        let engines = [
            Engine::Heur(MODE_00),
            Engine::Heur(MODE_01),
            Engine::Heur(MODE_10),
            Engine::Heur(MODE_11),
        ];
        run_merge_benchmark(pair_corpus(), &engines, Duration::from_secs(5))
            .expect("merge benchmark emits only validated schedules")
    })
}

// ---------------------------------------------------------------------------
// Criterion 1: exact-solver feasibility and optimal objective values match a
// brute-force enumeration oracle on an exhaustive suite of small instances.
// ---------------------------------------------------------------------------

/// Plain depth-first enumeration over one (slot, channel) choice per task
/// window. Prunes only on cell collisions and same-slot intersections; every
/// complete assignment is checked by the validator, so feasibility and the
/// minimal misalignment count are established independently of the solver's
/// search order, bounding and domain filtering.
struct BruteForce<'a> {
    ts: &'a TaskSet,
    vars: Vec<(TaskId, u32)>,
    iota: tc_sched_core::model::IntersectionMatrix,
    schedule: Schedule,
    nodes: u64,
    feasible: bool,
    best: Option<i64>,
}

const BRUTE_NODE_CAP: u64 = 2_000_000;

impl<'a> BruteForce<'a> {
    fn new(ts: &'a TaskSet) -> Self {
        let mut vars = Vec::new();
        for task in ts.tasks() {
            let p = ts.period_of(task.id);
            for w in 0..ts.hyperperiod() / p {
                vars.push((task.id, w));
            }
        }
        BruteForce {
            ts,
            vars,
            iota: intersection_matrix(ts),
            schedule: Schedule::new(ts.hyperperiod(), ts.channels()),
            nodes: 0,
            feasible: false,
            best: None,
        }
    }

    /// Returns `true` when the node cap was hit and the result is unusable.
    fn search(&mut self, i: usize) -> bool {
        self.nodes += 1;
        if self.nodes > BRUTE_NODE_CAP {
            return true;
        }
        if i == self.vars.len() {
            let report = validate(&self.schedule, self.ts).expect("dimensions match");
            if report.overall {
                self.feasible = true;
                let m = misalignment_count(&self.schedule, self.ts);
                self.best = Some(self.best.map_or(m, |b| b.min(m)));
            }
            return false;
        }
        let (task, w) = self.vars[i];
        let p = self.ts.period_of(task);
        let lo = w * p + 1;
        for t in lo..lo + p {
            if self
                .schedule
                .tasks_at_time(t)
                .any(|(q, _)| self.iota.intersects(task, q))
            {
                continue;
            }
            for c in 1..=self.ts.channels() {
                if !self.schedule.cell(t, c).is_empty() {
                    continue;
                }
                self.schedule.place(task, t, c);
                let aborted = self.search(i + 1);
                self.schedule.remove(task, t, c);
                if aborted {
                    return true;
                }
            }
        }
        false
    }
}

/// Small-instance parameter sampler for the oracle suite.
fn small_params(s: u64) -> GenParams {
    let tasks = 2 + (s % 4) as u32; // 2..=5
    let jobs = 1 + (s / 4 % 2) as u32;
    GenParams {
        hyperperiod: [4, 6, 8][(s / 8 % 3) as usize],
        dependencies: tasks - jobs.min(tasks) + (s / 24 % 2) as u32,
        jobs: jobs.min(tasks),
        tasks,
        nodes: 1 + (s % 3) as u32,
        channels: 1 + (s % 2) as u32,
        seed: s,
        jitter_range: (0, 2),
        age_range: (1, 6),
    }
}

/// A-priori bound on the enumeration space: product over windows of
/// (window length × channels).
fn search_space(ts: &TaskSet) -> f64 {
    let m = ts.channels() as f64;
    let mut product = 1.0f64;
    for task in ts.tasks() {
        let p = ts.period_of(task.id) as f64;
        let windows = (ts.hyperperiod() / ts.period_of(task.id)) as f64;
        product *= (p * m).powf(windows);
    }
    product
}

#[test]
fn c1_exact_solver_matches_brute_force_oracle() {
    let started = Instant::now();
    let mut checked = 0u32;
    let mut feasible_count = 0u32;
    let mut seed = 0u64;
    while checked < 200 {
        seed += 1;
        let params = small_params(seed);
        let Ok(ts) = generate(&params) else { continue };
        if search_space(&ts) > 200_000.0 {
            continue;
        }
        let mut oracle = BruteForce::new(&ts);
        if oracle.search(0) {
            continue; // node cap hit; instance too large for the oracle
        }
        let outcome = solve(&ts, Objective::MinimizeSlotChanges, Duration::from_secs(30));
        assert!(
            outcome.stats.proven,
            "seed {seed}: solver must terminate within budget on small instances"
        );
        match outcome.status {
            SolveStatus::Feasible => {
                assert!(
                    oracle.feasible,
                    "seed {seed}: solver claims feasible, oracle found no schedule"
                );
                let n: i64 = ts
                    .tasks()
                    .iter()
                    .map(|t| (ts.hyperperiod() / ts.period_of(t.id)) as i64 - 1)
                    .sum();
                let expected = if n == 0 {
                    Rational::from_integer(0)
                } else {
                    Rational::new(oracle.best.unwrap(), n)
                };
                assert_eq!(
                    outcome.objective_value,
                    Some(expected),
                    "seed {seed}: objective value differs from the enumerated optimum"
                );
                feasible_count += 1;
            }
            SolveStatus::Infeasible => {
                assert!(
                    !oracle.feasible,
                    "seed {seed}: solver claims infeasible, oracle found a schedule"
                );
            }
            SolveStatus::TimedOut => panic!("seed {seed}: unexpected timeout"),
        }
        checked += 1;
    }
    assert!(started.elapsed() < Duration::from_secs(300), "oracle suite exceeded 5 minutes");
    println!(
        "criterion 1 (oracle equivalence): PASS — {checked} instances, {feasible_count} feasible, \
         status and optimum matched on all, {:.1}s",
        started.elapsed().as_secs_f64()
    );
}

// ---------------------------------------------------------------------------
// Criterion 2: every schedule emitted by any engine passes the validator;
// merge outputs additionally pass the transition check. Corpus of 5000.
// ---------------------------------------------------------------------------

#[test]
fn c2_all_emitted_schedules_validate() {
    let mut validated = 0u64;
    for seed in 0..5000u64 {
        let ts = generate(&standard_params(seed)).expect("corpus parameters are feasible");
        for mode in [MODE_00, MODE_11] {
            let outcome = heur_schedule(&ts, mode);
            if let Some(s) = outcome.schedule {
                let report = validate(&s, &ts).expect("dimensions match");
                assert!(
                    report.overall,
                    "seed {seed} mode {mode}: heuristic emitted an invalid schedule: {:?}",
                    report.violations.first()
                );
                validated += 1;
            }
        }
        if seed < 200 {
            let outcome = solve(&ts, Objective::None, Duration::from_secs(1));
            if let Some(s) = outcome.schedule {
                let report = validate(&s, &ts).expect("dimensions match");
                assert!(
                    report.overall,
                    "seed {seed}: exact solver emitted an invalid schedule: {:?}",
                    report.violations.first()
                );
                validated += 1;
            }
        }
    }
    // Merge outputs: the benchmark revalidates every merged schedule against
    // both the full constraint set and the transition constraint and returns
    // an error on any violation.
    let merge_checked: u32 = merge_stats().iter().map(|s| s.successes).sum();
    println!(
        "criterion 2 (soundness): PASS — 5000 tasksets, {validated} emitted schedules validated, \
         {merge_checked} merge outputs passed the transition check"
    );
}

// ---------------------------------------------------------------------------
// Criterion 3: the jitter objective drives mean allocation jitter to (almost)
// zero and strictly below the objective-free solver's mean.
// ---------------------------------------------------------------------------

#[test]
fn c3_jitter_objective_reduces_mean_jitter() {
    let params = |seed| GenParams {
        hyperperiod: 8,
        dependencies: 4,
        jobs: 2,
        tasks: 6,
        nodes: 12,
        channels: 3,
        seed,
        jitter_range: (1, 3),
        age_range: (3, 10),
    };
    let budget = Duration::from_secs(60);
    let mut with_obj = Rational::from_integer(0);
    let mut without_obj = Rational::from_integer(0);
    let mut n = 0i64;
    for seed in 0..500u64 {
        let ts = generate(&params(seed)).expect("corpus parameters are feasible");
        let plain = solve(&ts, Objective::None, budget);
        let optimized = solve(&ts, Objective::MinimizeSlotChanges, budget);
        let (Some(sp), Some(so)) = (plain.schedule, optimized.schedule) else {
            continue;
        };
        with_obj += jitter(&so, &ts);
        without_obj += jitter(&sp, &ts);
        n += 1;
    }
    assert!(n >= 400, "too few feasible instances: {n}");
    let mean_with = with_obj / Rational::from_integer(n);
    let mean_without = without_obj / Rational::from_integer(n);
    assert!(
        mean_with <= rat(1, 10),
        "mean jitter with objective {mean_with} exceeds 0.1"
    );
    assert!(
        mean_with < mean_without,
        "objective did not improve mean jitter: {mean_with} vs {mean_without}"
    );
    println!(
        "criterion 3 (jitter objective): PASS — {n} feasible instances, mean jitter \
         {:.4} with objective vs {:.4} without",
        ratio_f64(mean_with),
        ratio_f64(mean_without)
    );
}

fn ratio_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

// ---------------------------------------------------------------------------
// Criterion 4: reschedulable fraction binned by pair distribution rises with
// the distribution (positive rank correlation).
// ---------------------------------------------------------------------------

#[test]
fn c4_distribution_predicts_merge_success() {
    let table = run_hypothesis(
        pair_corpus(),
        Engine::Heur(MODE_10),
        Duration::from_secs(5),
        8,
    )
    .expect("pair corpus is non-empty");
    assert!(
        table.spearman > 0.5,
        "Spearman rank correlation {:.3} not above 0.5 (bins: {:?})",
        table.spearman,
        table.bins
    );
    println!(
        "criterion 4 (distribution hypothesis): PASS — {} pairs, {} bins, Spearman {:.3}",
        pair_corpus().len(),
        table.bins.len(),
        table.spearman
    );
}

// ---------------------------------------------------------------------------
// Criterion 5: channel-first shifting dominates time-first shifting in both
// aggregate schedulability and merge success.
// ---------------------------------------------------------------------------

#[test]
fn c5_channel_first_dominates_time_first() {
    // Schedulability over 2000 fresh tasksets.
    let mut scheduled = [0u32; 4];
    let corpus_size = 2000u64;
    for seed in 0..corpus_size {
        let ts = generate(&standard_params(10_000 + seed)).expect("corpus parameters are feasible");
        for (i, mode) in SchedulerMode::ALL.iter().enumerate() {
            if heur_schedule(&ts, *mode).is_feasible() {
                scheduled[i] += 1;
            }
        }
    }
    let tf_sched = (scheduled[0] + scheduled[1]) as f64 / (2.0 * corpus_size as f64);
    let cf_sched = (scheduled[2] + scheduled[3]) as f64 / (2.0 * corpus_size as f64);
    assert!(
        cf_sched >= tf_sched,
        "channel-first schedulability {cf_sched:.3} below time-first {tf_sched:.3}"
    );

    // Merge success over the shared 500-pair corpus.
    let stats = merge_stats();
    let rate = |mode: SchedulerMode| {
        stats
            .iter()
            .find(|s| s.engine == Engine::Heur(mode))
            .expect("engine present")
            .rate()
    };
    let tf_merge = (rate(MODE_00) + rate(MODE_01)) / 2.0;
    let cf_merge = (rate(MODE_10) + rate(MODE_11)) / 2.0;
    assert!(
        cf_merge >= tf_merge,
        "channel-first merge rate {cf_merge:.3} below time-first {tf_merge:.3}"
    );
    println!(
        "criterion 5 (mode dominance): PASS — schedulability CF {cf_sched:.3} ≥ TF {tf_sched:.3} \
         on {corpus_size} tasksets; merge CF {cf_merge:.3} ≥ TF {tf_merge:.3} on {} pairs",
        pair_corpus().len()
    );
}

// ---------------------------------------------------------------------------
// Criterion 6: channel-first merge success stays at or above 40% on the
// same-shape pair corpus.
// ---------------------------------------------------------------------------

#[test]
fn c6_channel_first_merge_success_floor() {
    let stats = merge_stats();
    for mode in [MODE_10, MODE_11] {
        let s = stats
            .iter()
            .find(|s| s.engine == Engine::Heur(mode))
            .expect("engine present");
        assert!(
            s.rate() >= 0.40,
            "mode {mode}: merge success {:.3} ({} of {}) below 0.40",
            s.rate(),
            s.successes,
            s.attempts
        );
    }
    let s10 = stats.iter().find(|s| s.engine == Engine::Heur(MODE_10)).unwrap();
    let s11 = stats.iter().find(|s| s.engine == Engine::Heur(MODE_11)).unwrap();
    println!(
        "criterion 6 (merge success floor): PASS — mode 10: {}/{} ({:.1}%), mode 11: {}/{} ({:.1}%)",
        s10.successes,
        s10.attempts,
        100.0 * s10.rate(),
        s11.successes,
        s11.attempts,
        100.0 * s11.rate()
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: at H=24 the channel-first heuristic allocates divisor slots of
// 24 more often than non-divisor slots; the exact solver instead concentrates
// on slot 1 without divisor elevation.
// ---------------------------------------------------------------------------

#[test]
fn c7_slot_histogram_shapes() {
    let params = |seed| GenParams {
        hyperperiod: 24,
        dependencies: 3,
        jobs: 3,
        tasks: 6,
        nodes: 12,
        channels: 3,
        seed,
        jitter_range: (1, 3),
        age_range: (3, 10),
    };
    let mut heur_schedules = Vec::new();
    let mut exact_schedules = Vec::new();
    for seed in 200..240u64 {
        let ts = generate(&params(seed)).expect("corpus parameters are feasible");
        if let Some(s) = heur_schedule(&ts, MODE_10).schedule {
            heur_schedules.push(s);
        }
        if let Some(s) = solve(&ts, Objective::None, Duration::from_secs(2)).schedule {
            exact_schedules.push(s);
        }
    }
    assert!(heur_schedules.len() >= 20, "too few heuristic schedules");
    assert!(exact_schedules.len() >= 20, "too few exact schedules");

    let divisors = [1u32, 2, 3, 4, 6, 8, 12, 24];
    let mean = |probability: &[Rational], slots: &[u32]| {
        slots
            .iter()
            .map(|&t| ratio_f64(probability[t as usize - 1]))
            .sum::<f64>()
            / slots.len() as f64
    };
    let non_divisors: Vec<u32> = (1..=24).filter(|t| !divisors.contains(t)).collect();

    let refs: Vec<&Schedule> = heur_schedules.iter().collect();
    let h = slot_histogram(&refs).unwrap();
    let h_div = mean(&h.probability, &divisors);
    let h_non = mean(&h.probability, &non_divisors);
    assert!(
        h_div > h_non,
        "heuristic divisor mean {h_div:.3} not above non-divisor mean {h_non:.3}"
    );

    let refs: Vec<&Schedule> = exact_schedules.iter().collect();
    let e = slot_histogram(&refs).unwrap();
    let slot1 = ratio_f64(e.probability[0]);
    let rest: Vec<u32> = (2..=24).collect();
    let e_rest = mean(&e.probability, &rest);
    assert!(
        slot1 > e_rest,
        "exact slot-1 probability {slot1:.3} not above the mean of the others {e_rest:.3}"
    );
    let divisors_no1: Vec<u32> = divisors[1..].to_vec();
    let e_div = mean(&e.probability, &divisors_no1);
    let e_non = mean(&e.probability, &non_divisors);
    assert!(
        e_div <= e_non,
        "exact shows divisor elevation ({e_div:.3} > {e_non:.3}) beyond slot 1"
    );
    println!(
        "criterion 7 (slot histogram): PASS — heuristic divisor mean {h_div:.3} > non-divisor \
         {h_non:.3} ({} schedules); exact slot-1 {slot1:.3} > rest {e_rest:.3}, divisor mean \
         {e_div:.3} ≤ non-divisor {e_non:.3} ({} schedules)",
        heur_schedules.len(),
        exact_schedules.len()
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: heuristic runtimes are fast and far more uniform across
// hyperperiods than the exact solver's.
// ---------------------------------------------------------------------------

#[test]
fn c8_heuristic_runtime_predictability() {
    let mut heur_times = Vec::new();
    let mut exact_times = Vec::new();
    for &h in &[8u32, 12, 16, 25, 35] {
        for seed in 0..12u64 {
            let params = GenParams {
                hyperperiod: h,
                seed: 600 * h as u64 + seed,
                ..standard_params(0)
            };
            let ts = generate(&params).expect("corpus parameters are feasible");
            let started = Instant::now();
            let _ = heur_schedule(&ts, MODE_11);
            heur_times.push(started.elapsed().as_secs_f64());
            let started = Instant::now();
            let _ = solve(&ts, Objective::None, Duration::from_secs(1));
            exact_times.push(started.elapsed().as_secs_f64());
        }
    }
    let fast = heur_times.iter().filter(|&&t| t < 1.0).count();
    let fast_fraction = fast as f64 / heur_times.len() as f64;
    assert!(
        fast_fraction >= 0.95,
        "only {fast_fraction:.3} of heuristic runs finished below one second"
    );
    let iqr = |values: &[f64]| {
        let mut v = values.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v[3 * v.len() / 4] - v[v.len() / 4]
    };
    let heur_iqr = iqr(&heur_times);
    let exact_iqr = iqr(&exact_times);
    assert!(
        heur_iqr < exact_iqr,
        "heuristic IQR {heur_iqr:.6}s not below exact IQR {exact_iqr:.6}s"
    );
    println!(
        "criterion 8 (runtime predictability): PASS — {:.1}% of {} heuristic runs < 1s, \
         heuristic IQR {heur_iqr:.6}s < exact IQR {exact_iqr:.6}s",
        100.0 * fast_fraction,
        heur_times.len()
    );
}

// ---------------------------------------------------------------------------
// Criterion 9: metric definitions reproduce their worked examples exactly in
// rational arithmetic.
// ---------------------------------------------------------------------------

/// Two independent tasks: task 0 with period 5, task 1 with period 10 (so
/// the hyperperiod is 10 and task 0 has two execution windows).
fn two_task_p5_p10() -> TaskSet {
    let raw = RawTaskSet {
        channels: 2,
        nodes: vec![NodeId(0), NodeId(1)],
        tasks: vec![
            TaskSpec { id: TaskId(0), node: NodeId(0), max_jitter: 4 },
            TaskSpec { id: TaskId(1), node: NodeId(1), max_jitter: 0 },
        ],
        edges: vec![],
        jobs: vec![
            JobSpec { id: JobId(0), period: 5, leaf: TaskId(0), members: vec![TaskId(0)] },
            JobSpec { id: JobId(1), period: 10, leaf: TaskId(1), members: vec![TaskId(1)] },
        ],
        hyperperiod: None,
    };
    TaskSet::build(raw).expect("hand-built taskset is valid")
}

#[test]
fn c9_metric_examples_reproduce_exactly() {
    let ts = two_task_p5_p10();

    // Jitter: executions at 2 and 7 with period 5 are exactly periodic.
    let mut s = Schedule::new(10, 2);
    s.place(TaskId(0), 2, 1);
    s.place(TaskId(0), 7, 1);
    s.place(TaskId(1), 1, 2);
    assert_eq!(jitter(&s, &ts), rat(0, 1));

    // Jitter: executions at 2 and 8 give ((0) + (6 mod 5))/2 = 1/2 for the
    // task; the report mean over task jitters {1/2, 0} is 1/4.
    let mut s = Schedule::new(10, 2);
    s.place(TaskId(0), 2, 1);
    s.place(TaskId(0), 8, 1);
    s.place(TaskId(1), 1, 2);
    assert_eq!(jitter(&s, &ts), rat(1, 4));

    // Distribution: H=6, used slots {1,4,6}, 3 executions -> transitions at
    // t=2 and t=5 -> 2/3.
    let mut s = Schedule::new(6, 1);
    s.place(TaskId(0), 1, 1);
    s.place(TaskId(1), 4, 1);
    s.place(TaskId(2), 6, 1);
    assert_eq!(distribution(&s), rat(2, 3));

    // Distribution: fully dense schedule -> no used-to-unused transition.
    let mut dense = Schedule::new(4, 1);
    for t in 1..=4 {
        dense.place(TaskId(0), t, 1);
    }
    assert_eq!(distribution(&dense), rat(0, 1));

    // Distribution: single execution at t=1 with H=2 -> x_2 = 1 -> 1/1.
    let mut s = Schedule::new(2, 1);
    s.place(TaskId(0), 1, 1);
    assert_eq!(distribution(&s), rat(1, 1));

    // Pair distribution is the exact sum of the individual distributions.
    let mut a = Schedule::new(6, 1);
    a.place(TaskId(0), 1, 1);
    a.place(TaskId(1), 4, 1);
    let mut b = Schedule::new(6, 1);
    b.place(TaskId(2), 6, 1);
    assert_eq!(pair_distribution(&a, &b), distribution(&a) + distribution(&b));

    // Stability: identical schedules keep every execution; fully moved
    // schedules keep none; one moved task of three keeps two.
    let mut before = Schedule::new(6, 1);
    before.place(TaskId(0), 1, 1);
    before.place(TaskId(1), 3, 1);
    before.place(TaskId(2), 5, 1);
    assert_eq!(stability(&before, &before).unwrap(), 3);
    let mut moved = Schedule::new(6, 1);
    moved.place(TaskId(0), 2, 1);
    moved.place(TaskId(1), 4, 1);
    moved.place(TaskId(2), 6, 1);
    assert_eq!(stability(&before, &moved).unwrap(), 0);
    let mut one_moved = before.clone();
    one_moved.remove(TaskId(2), 5, 1);
    one_moved.place(TaskId(2), 6, 1);
    assert_eq!(stability(&before, &one_moved).unwrap(), 2);

    // Slot histogram: a single schedule yields its indicator vector; a slot
    // used in one of two schedules has probability 1/2.
    let h = slot_histogram(&[&before]).unwrap();
    assert_eq!(
        h.probability,
        vec![rat(1, 1), rat(0, 1), rat(1, 1), rat(0, 1), rat(1, 1), rat(0, 1)]
    );
    let h = slot_histogram(&[&before, &moved]).unwrap();
    assert_eq!(h.probability, vec![rat(1, 2); 6]);

    println!("criterion 9 (metric unit correctness): PASS — all worked examples exact");
}
