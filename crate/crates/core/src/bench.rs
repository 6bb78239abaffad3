//! Experiment orchestration: schedulability sweeps, distribution-vs-merge
//! hypothesis tables, merge success rates, and CSV/SVG emission.
//!
//! Every feasible schedule is re-validated before being counted; a validator
//! failure aborts the experiment. Outputs are a pure function of the corpus
//! manifest, engine set and timeout (solve times excepted).

use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{self, merge_schedules, Objective, SolveStatus};
use crate::gen::{self, GenError, Manifest};
use crate::heuristic::{self, SchedulerMode};
use crate::metrics::{self, Rational};
use crate::model::{Schedule, TaskSet};
use crate::validator::{validate, validate_transition};

/// A scheduling engine selectable in experiment plans. Serialized by its
/// display name (`exact-none`, `exact-jitter`, `heur-00`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    ExactNone,
    ExactJitter,
    Heur(SchedulerMode),
}

impl Engine {
    pub const ALL: [Engine; 6] = [
        Engine::ExactNone,
        Engine::ExactJitter,
        Engine::Heur(SchedulerMode::ALL[0]),
        Engine::Heur(SchedulerMode::ALL[1]),
        Engine::Heur(SchedulerMode::ALL[2]),
        Engine::Heur(SchedulerMode::ALL[3]),
    ];
}

impl Serialize for Engine {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Engine {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Engine::ExactNone => write!(f, "exact-none"),
            Engine::ExactJitter => write!(f, "exact-jitter"),
            Engine::Heur(mode) => write!(f, "heur-{}", mode.code()),
        }
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact-none" => Ok(Engine::ExactNone),
            "exact-jitter" => Ok(Engine::ExactJitter),
            _ => s
                .strip_prefix("heur-")
                .and_then(SchedulerMode::from_code)
                .map(Engine::Heur)
                .ok_or_else(|| format!("unknown engine '{s}'")),
        }
    }
}

/// Outcome class of one (taskset, engine) run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Feasible,
    Infeasible,
    Timeout,
    Unschedulable,
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RowStatus::Feasible => "feasible",
            RowStatus::Infeasible => "infeasible",
            RowStatus::Timeout => "timeout",
            RowStatus::Unschedulable => "unschedulable",
        };
        f.write_str(s)
    }
}

/// One result row of a schedulability or merge experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentRow {
    /// Corpus seed identifying the task set (or pair).
    pub taskset_id: u64,
    pub engine: Engine,
    pub status: RowStatus,
    pub solve_time: Duration,
    pub jitter: Option<Rational>,
    pub distribution: Option<Rational>,
    /// Unmoved-allocation count; merge experiments only.
    pub stability: Option<u64>,
}

/// A full experiment: which corpus, which engines, and resource limits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub manifest: Manifest,
    pub engines: Vec<Engine>,
    pub timeout: Duration,
    pub workers: usize,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("experiment plan selects no engines")]
    NoEngines,
    #[error("empty input")]
    EmptyInput,
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("unsound result: engine {engine} emitted an invalid schedule for taskset {taskset_id}: {detail}")]
    Unsound {
        engine: Engine,
        taskset_id: u64,
        detail: String,
    },
}

/// Runs one engine on one task set under a per-instance time budget.
///
/// The heuristic has no internal timeout; its wall time on desk-scale
/// instances is far below any sensible budget.
pub fn run_engine(
    engine: Engine,
    ts: &TaskSet,
    timeout: Duration,
) -> (RowStatus, Option<Schedule>, Duration) {
    let start = Instant::now();
    match engine {
        Engine::ExactNone | Engine::ExactJitter => {
            let objective = if engine == Engine::ExactJitter {
                Objective::MinimizeSlotChanges
            } else {
                Objective::None
            };
            let out = exact::solve(ts, objective, timeout);
            let status = match out.status {
                SolveStatus::Feasible => RowStatus::Feasible,
                SolveStatus::Infeasible => RowStatus::Infeasible,
                SolveStatus::TimedOut => RowStatus::Timeout,
            };
            (status, out.schedule, start.elapsed())
        }
        Engine::Heur(mode) => {
            let out = heuristic::schedule(ts, mode);
            let status = if out.is_feasible() {
                RowStatus::Feasible
            } else {
                RowStatus::Unschedulable
            };
            (status, out.schedule, start.elapsed())
        }
    }
}

fn feasibility_row(
    taskset_id: u64,
    engine: Engine,
    ts: &TaskSet,
    timeout: Duration,
) -> Result<ExperimentRow, BenchError> {
    let (status, schedule, solve_time) = run_engine(engine, ts, timeout);
    let (jitter, distribution) = match &schedule {
        Some(s) => {
            let report = validate(s, ts).map_err(|e| BenchError::Unsound {
                engine,
                taskset_id,
                detail: e.to_string(),
            })?;
            if !report.overall {
                return Err(BenchError::Unsound {
                    engine,
                    taskset_id,
                    detail: format!("{:?}", report.violations.first()),
                });
            }
            (Some(metrics::jitter(s, ts)), Some(metrics::distribution(s)))
        }
        None => (None, None),
    };
    Ok(ExperimentRow {
        taskset_id,
        engine,
        status,
        solve_time,
        jitter,
        distribution,
        stability: None,
    })
}

/// Runs every selected engine over an explicit corpus.
///
/// Rows come back sorted by (taskset id, engine position); work items are
/// distributed over `workers` threads.
pub fn run_corpus(
    corpus: &[(u64, TaskSet)],
    engines: &[Engine],
    timeout: Duration,
    workers: usize,
) -> Result<Vec<ExperimentRow>, BenchError> {
    if engines.is_empty() {
        return Err(BenchError::NoEngines);
    }
    let items: Vec<(usize, u64, &TaskSet, Engine)> = corpus
        .iter()
        .flat_map(|(id, ts)| {
            engines
                .iter()
                .enumerate()
                .map(move |(ei, &e)| (ei, *id, ts, e))
        })
        .collect();
    let workers = workers.max(1).min(items.len().max(1));
    let results: Mutex<Vec<(u64, usize, Result<ExperimentRow, BenchError>)>> =
        Mutex::new(Vec::with_capacity(items.len()));
    std::thread::scope(|scope| {
        for w in 0..workers {
            let items = &items;
            let results = &results;
            scope.spawn(move || {
                for (ei, id, ts, engine) in items.iter().skip(w).step_by(workers) {
                    let row = feasibility_row(*id, *engine, ts, timeout);
                    results.lock().unwrap().push((*id, *ei, row));
                }
            });
        }
    });
    let mut keyed = results.into_inner().unwrap();
    keyed.sort_by_key(|(id, ei, _)| (*id, *ei));
    keyed.into_iter().map(|(_, _, row)| row).collect()
}

/// Generates the manifest's corpus and runs the schedulability experiment.
pub fn run_schedulability(plan: &ExperimentPlan) -> Result<Vec<ExperimentRow>, BenchError> {
    let corpus: Vec<(u64, TaskSet)> = plan
        .manifest
        .instances()
        .map(|(seed, params)| Ok((seed, gen::generate(&params)?)))
        .collect::<Result<_, GenError>>()?;
    run_corpus(&corpus, &plan.engines, plan.timeout, plan.workers)
}

/// Fraction of decided instances (timeouts excluded) an engine found
/// feasible. `None` when the engine decided nothing.
pub fn success_fraction(rows: &[ExperimentRow], engine: Engine) -> Option<f64> {
    let decided: Vec<&ExperimentRow> = rows
        .iter()
        .filter(|r| r.engine == engine && r.status != RowStatus::Timeout)
        .collect();
    if decided.is_empty() {
        return None;
    }
    let ok = decided
        .iter()
        .filter(|r| r.status == RowStatus::Feasible)
        .count();
    Some(ok as f64 / decided.len() as f64)
}

/// One bin of the distribution-vs-reschedulability table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisBin {
    /// Midpoint of the pair-distribution interval covered by the bin.
    pub midpoint: f64,
    pub attempts: u32,
    pub successes: u32,
}

impl HypothesisBin {
    pub fn fraction(&self) -> f64 {
        self.successes as f64 / self.attempts as f64
    }
}

/// Result of the distribution hypothesis experiment: populated bins plus the
/// Spearman rank correlation of bin midpoints vs success fractions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisTable {
    pub bins: Vec<HypothesisBin>,
    pub spearman: f64,
}

/// Schedules each pair member individually with `engine`, bins the pair
/// distribution over [0, 2] into `bin_count` intervals, and records whether
/// the merged schedule could be adapted.
pub fn run_hypothesis(
    pairs: &[(TaskSet, TaskSet)],
    engine: Engine,
    timeout: Duration,
    bin_count: usize,
) -> Result<HypothesisTable, BenchError> {
    if pairs.is_empty() || bin_count == 0 {
        return Err(BenchError::EmptyInput);
    }
    let mut attempts = vec![0u32; bin_count];
    let mut successes = vec![0u32; bin_count];
    let width = 2.0 / bin_count as f64;
    for (id, (a, b)) in pairs.iter().enumerate() {
        let Some((sa, sb)) = schedule_pair(engine, a, b, timeout) else {
            continue;
        };
        let dist = ratio_to_f64(metrics::pair_distribution(&sa, &sb));
        let bin = ((dist / width) as usize).min(bin_count - 1);
        attempts[bin] += 1;
        if merge_pair(engine, a, &sa, b, &sb, timeout, id as u64)?.is_some() {
            successes[bin] += 1;
        }
    }
    let bins: Vec<HypothesisBin> = (0..bin_count)
        .filter(|&i| attempts[i] > 0)
        .map(|i| HypothesisBin {
            midpoint: width * (i as f64 + 0.5),
            attempts: attempts[i],
            successes: successes[i],
        })
        .collect();
    let xs: Vec<f64> = bins.iter().map(|b| b.midpoint).collect();
    let ys: Vec<f64> = bins.iter().map(|b| b.fraction()).collect();
    Ok(HypothesisTable {
        bins,
        spearman: spearman(&xs, &ys),
    })
}

/// Per-engine merge success rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeStats {
    pub engine: Engine,
    /// Pairs where both members were individually schedulable by the engine.
    pub attempts: u32,
    pub successes: u32,
}

impl MergeStats {
    pub fn rate(&self) -> f64 {
        if self.attempts == 0 {
            0.0
        } else {
            self.successes as f64 / self.attempts as f64
        }
    }
}

fn schedule_pair(
    engine: Engine,
    a: &TaskSet,
    b: &TaskSet,
    timeout: Duration,
) -> Option<(Schedule, Schedule)> {
    let (sa_status, sa, _) = run_engine(engine, a, timeout);
    let (sb_status, sb, _) = run_engine(engine, b, timeout);
    if sa_status == RowStatus::Feasible && sb_status == RowStatus::Feasible {
        Some((sa.unwrap(), sb.unwrap()))
    } else {
        None
    }
}

/// Attempts the merge adaptation for one scheduled pair; a successful result
/// is re-validated against both sources (C1–C7 plus the transition check)
/// and returned, a validation failure aborts with [`BenchError::Unsound`].
fn merge_pair(
    engine: Engine,
    a: &TaskSet,
    sa: &Schedule,
    b: &TaskSet,
    sb: &Schedule,
    timeout: Duration,
    pair_id: u64,
) -> Result<Option<(TaskSet, Schedule, Schedule)>, BenchError> {
    let unsound = |detail: String| BenchError::Unsound {
        engine,
        taskset_id: pair_id,
        detail,
    };
    let adapted: Option<(TaskSet, Schedule, Schedule)> = match engine {
        Engine::ExactNone | Engine::ExactJitter => {
            let Ok(m) = merge_schedules(a, sa, b, sb) else {
                return Ok(None);
            };
            let out =
                exact::solve_adaptation(&m.taskset, &m.combined, &[&m.first, &m.second], timeout);
            out.schedule.map(|s| (m.taskset, m.combined, s))
        }
        Engine::Heur(mode) => {
            let result = heuristic::adapt(a, sa, b, sb, mode);
            let Ok(r) = result else { return Ok(None) };
            r.outcome
                .schedule
                .map(|s| (r.taskset, r.merge.combined, s))
        }
    };
    let Some((merged, combined, schedule)) = adapted else {
        return Ok(None);
    };
    let report = validate(&schedule, &merged).map_err(|e| unsound(e.to_string()))?;
    if !report.overall {
        return Err(unsound(format!("{:?}", report.violations.first())));
    }
    for source in [sa, sb] {
        let report = validate_transition(source, &schedule, &merged)
            .map_err(|e| unsound(e.to_string()))?;
        if !report.overall {
            return Err(unsound(format!(
                "transition: {:?}",
                report.violations.first()
            )));
        }
    }
    Ok(Some((merged, combined, schedule)))
}

/// Per-engine merge success rates over a pair corpus. Attempts count only
/// pairs whose members the engine scheduled individually.
pub fn run_merge_benchmark(
    pairs: &[(TaskSet, TaskSet)],
    engines: &[Engine],
    timeout: Duration,
) -> Result<Vec<MergeStats>, BenchError> {
    if engines.is_empty() {
        return Err(BenchError::NoEngines);
    }
    let mut stats = Vec::with_capacity(engines.len());
    for &engine in engines {
        let mut attempts = 0;
        let mut successes = 0;
        for (id, (a, b)) in pairs.iter().enumerate() {
            let Some((sa, sb)) = schedule_pair(engine, a, b, timeout) else {
                continue;
            };
            attempts += 1;
            if merge_pair(engine, a, &sa, b, &sb, timeout, id as u64)?.is_some() {
                successes += 1;
            }
        }
        stats.push(MergeStats {
            engine,
            attempts,
            successes,
        });
    }
    Ok(stats)
}

/// Empirical CDF: ascending distinct values with cumulative fractions; the
/// final point carries fraction 1 and marks the maximum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cdf {
    pub points: Vec<(f64, f64)>,
}

pub fn emit_cdf(values: &[f64]) -> Result<Cdf, BenchError> {
    if values.is_empty() {
        return Err(BenchError::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut points: Vec<(f64, f64)> = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        let frac = (i + 1) as f64 / n;
        match points.last_mut() {
            Some(last) if last.0 == v => last.1 = frac,
            _ => points.push((v, frac)),
        }
    }
    Ok(Cdf { points })
}

impl Cdf {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,fraction\n");
        for (v, f) in &self.points {
            out.push_str(&format!("{v},{f}\n"));
        }
        out
    }

    /// Minimal step-plot render: axes, the CDF polyline, and a marker at the
    /// maximum value.
    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 400.0;
        const PAD: f64 = 40.0;
        let xmin = self.points.first().unwrap().0;
        let xmax = self.points.last().unwrap().0;
        let span = if xmax > xmin { xmax - xmin } else { 1.0 };
        let sx = |v: f64| PAD + (v - xmin) / span * (W - 2.0 * PAD);
        let sy = |f: f64| H - PAD - f * (H - 2.0 * PAD);
        let mut path = format!("{:.1},{:.1}", sx(xmin), sy(0.0));
        let mut prev = 0.0;
        for &(v, f) in &self.points {
            path.push_str(&format!(" {:.1},{:.1} {:.1},{:.1}", sx(v), sy(prev), sx(v), sy(f)));
            prev = f;
        }
        let (mx, my) = (sx(xmax), sy(1.0));
        format!(
            concat!(
                r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">"#,
                r#"<line x1="{pad}" y1="{ybase}" x2="{xend}" y2="{ybase}" stroke="black"/>"#,
                r#"<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{ybase}" stroke="black"/>"#,
                r#"<polyline points="{path}" fill="none" stroke="steelblue"/>"#,
                r#"<circle cx="{mx:.1}" cy="{my:.1}" r="4" fill="crimson"/>"#,
                r#"<text x="{mx:.1}" y="{mty:.1}" font-size="12">max {xmax}</text>"#,
                "</svg>"
            ),
            w = W,
            h = H,
            pad = PAD,
            ybase = H - PAD,
            xend = W - PAD,
            path = path,
            mx = mx,
            my = my,
            mty = my - 8.0,
            xmax = xmax,
        )
    }
}

/// Spearman rank correlation with average ranks for ties; 0 for fewer than
/// two points or when either side is constant.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let rx = ranks(xs);
    let ry = ranks(ys);
    pearson(&rx, &ry)
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        cov += (x - mx) * (y - my);
        vx += (x - mx).powi(2);
        vy += (y - my).powi(2);
    }
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    cov / (vx * vy).sqrt()
}

fn ratio_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Renders experiment rows as CSV with a fixed header.
pub fn rows_to_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::from("taskset_id,engine,status,solve_time_s,jitter,distribution,stability\n");
    for r in rows {
        let opt_ratio = |v: &Option<Rational>| {
            v.map(|r| format!("{:.6}", ratio_to_f64(r))).unwrap_or_default()
        };
        out.push_str(&format!(
            "{},{},{},{:.6},{},{},{}\n",
            r.taskset_id,
            r.engine,
            r.status,
            r.solve_time.as_secs_f64(),
            opt_ratio(&r.jitter),
            opt_ratio(&r.distribution),
            r.stability.map(|s| s.to_string()).unwrap_or_default(),
        ));
    }
    out
}
