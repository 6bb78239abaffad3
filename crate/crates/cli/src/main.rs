//! `tc-sched`: generate, solve, adapt, validate and benchmark collision-free
//! multi-channel time-slot schedules.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use tc_sched_core::bench::{
    self, emit_cdf, run_corpus, run_hypothesis, run_merge_benchmark, rows_to_csv, Engine,
};
use tc_sched_core::exact::{
    self, export_milp, export_solution, import_solution, merge_schedules, MilpInstance, Objective,
    SolveStatus,
};
use tc_sched_core::gen::{self, GenParams, Manifest};
use tc_sched_core::heuristic::{self, SchedulerMode};
use tc_sched_core::io::{
    read_schedule, read_taskset, schedule_to_json, write_schedule, write_taskset,
};
use tc_sched_core::model::TaskSet;
use tc_sched_core::validator::{validate, validate_transition};

#[derive(Parser)]
#[command(name = "tc-sched", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random task-set corpus plus its reproducibility manifest.
    Gen(GenCmd),
    /// Solve a task set exactly (branch and bound), or export/import MILP.
    Exact(ExactCmd),
    /// Schedule a task set with the construction heuristic.
    Heur(HeurCmd),
    /// Merge two scheduled task sets and adapt the combined schedule.
    Merge(MergeCmd),
    /// Check a schedule against the constraints; exit code 0 iff valid.
    Validate(ValidateCmd),
    /// Run corpus experiments: schedulability, merge rates, hypothesis table.
    Bench(BenchCmd),
    /// Empirical CDF (CSV + SVG) of a numeric column of a results CSV.
    Cdf(CdfCmd),
}

#[derive(Args)]
struct GenCommon {
    #[arg(long, default_value_t = 12)]
    hyperperiod: u32,
    #[arg(long, default_value_t = 9)]
    dependencies: u32,
    #[arg(long = "job-count", default_value_t = 3)]
    job_count: u32,
    #[arg(long, default_value_t = 8)]
    tasks: u32,
    #[arg(long, default_value_t = 4)]
    nodes: u32,
    #[arg(long, default_value_t = 3)]
    channels: u32,
    /// Inclusive jitter bound range, e.g. 0,2.
    #[arg(long, default_value = "0,2", value_parser = parse_range)]
    jitter: (u32, u32),
    /// Inclusive max-age range; upper end is clamped per edge.
    #[arg(long, default_value = "1,4294967295", value_parser = parse_range)]
    age: (u32, u32),
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected LO,HI")?;
    Ok((
        lo.trim().parse().map_err(|e| format!("{e}"))?,
        hi.trim().parse().map_err(|e| format!("{e}"))?,
    ))
}

impl GenCommon {
    fn params(&self, seed: u64) -> GenParams {
        GenParams {
            hyperperiod: self.hyperperiod,
            dependencies: self.dependencies,
            jobs: self.job_count,
            tasks: self.tasks,
            nodes: self.nodes,
            channels: self.channels,
            seed,
            jitter_range: self.jitter,
            age_range: self.age,
        }
    }
}

#[derive(Args)]
struct GenCmd {
    #[command(flatten)]
    common: GenCommon,
    /// Number of task sets (or pairs) to generate.
    #[arg(long, default_value_t = 1)]
    count: u64,
    /// Base seed; instance i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Generate same-shape task-set pairs instead of single sets.
    #[arg(long)]
    pairs: bool,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExactCmd {
    #[arg(long)]
    taskset: PathBuf,
    /// Optimization objective: `none` or `jitter`.
    #[arg(long, default_value = "none")]
    objective: String,
    /// Per-instance budget in seconds.
    #[arg(long, default_value_t = 60)]
    timeout: u64,
    /// Write the schedule here on success.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Export the model in CPLEX-LP format instead of solving.
    #[arg(long)]
    lp: Option<PathBuf>,
    /// Import an external solver's `name value` solution and validate it.
    #[arg(long)]
    import: Option<PathBuf>,
}

#[derive(Args)]
struct HeurCmd {
    #[arg(long)]
    taskset: PathBuf,
    /// Scheduler mode code: 00, 01, 10 or 11.
    #[arg(long, default_value = "00")]
    mode: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MergeCmd {
    #[arg(long)]
    taskset_a: PathBuf,
    #[arg(long)]
    schedule_a: PathBuf,
    #[arg(long)]
    taskset_b: PathBuf,
    #[arg(long)]
    schedule_b: PathBuf,
    /// Adaptation engine (exact-none, exact-jitter, heur-00, ...).
    #[arg(long, default_value = "heur-10")]
    engine: String,
    #[arg(long, default_value_t = 60)]
    timeout: u64,
    /// Write the adapted schedule here on success.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the merged task set.
    #[arg(long)]
    out_taskset: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateCmd {
    #[arg(long)]
    taskset: PathBuf,
    #[arg(long)]
    schedule: PathBuf,
    /// Optional predecessor schedule; additionally checks the switchover.
    #[arg(long)]
    old_schedule: Option<PathBuf>,
}

#[derive(Args)]
struct BenchCmd {
    /// Corpus manifest written by `gen`.
    #[arg(long)]
    manifest: PathBuf,
    /// Comma-separated engine list; defaults to all six.
    #[arg(long)]
    engines: Option<String>,
    #[arg(long, default_value_t = 60)]
    timeout: u64,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Histogram bins for the pair-distribution hypothesis table.
    #[arg(long, default_value_t = 8)]
    bins: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CdfCmd {
    /// Input CSV with a header row.
    #[arg(long)]
    input: PathBuf,
    /// Column to aggregate.
    #[arg(long, default_value = "solve_time_s")]
    column: String,
    /// Output path prefix; writes PREFIX.csv and PREFIX.svg.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen(cmd) => cmd_gen(cmd),
        Command::Exact(cmd) => cmd_exact(cmd),
        Command::Heur(cmd) => cmd_heur(cmd),
        Command::Merge(cmd) => cmd_merge(cmd),
        Command::Validate(cmd) => cmd_validate(cmd),
        Command::Bench(cmd) => cmd_bench(cmd),
        Command::Cdf(cmd) => cmd_cdf(cmd),
    }
}

fn load_taskset(path: &Path) -> Result<TaskSet> {
    read_taskset(path).with_context(|| format!("reading task set {}", path.display()))
}

fn cmd_gen(cmd: GenCmd) -> Result<ExitCode> {
    fs::create_dir_all(&cmd.out)?;
    let seeds: Vec<u64> = (0..cmd.count).map(|i| cmd.seed + i).collect();
    for &seed in &seeds {
        let params = cmd.common.params(seed);
        if cmd.pairs {
            let pair = gen::generate_pairs(&params, 1)?.remove(0);
            write_taskset(&cmd.out.join(format!("pair-{seed}-a.json")), &pair.0)?;
            write_taskset(&cmd.out.join(format!("pair-{seed}-b.json")), &pair.1)?;
        } else {
            let ts = gen::generate(&params)?;
            write_taskset(&cmd.out.join(format!("ts-{seed}.json")), &ts)?;
        }
    }
    let manifest = Manifest {
        params: cmd.common.params(cmd.seed),
        seeds,
        pairs: cmd.pairs,
    };
    fs::write(
        cmd.out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    println!(
        "generated {} {} under {}",
        cmd.count,
        if cmd.pairs { "pairs" } else { "task sets" },
        cmd.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn parse_objective(s: &str) -> Result<Objective> {
    match s {
        "none" => Ok(Objective::None),
        "jitter" => Ok(Objective::MinimizeSlotChanges),
        other => bail!("unknown objective '{other}' (expected none|jitter)"),
    }
}

fn cmd_exact(cmd: ExactCmd) -> Result<ExitCode> {
    let ts = load_taskset(&cmd.taskset)?;
    let objective = parse_objective(&cmd.objective)?;

    if let Some(lp_path) = &cmd.lp {
        let instance = MilpInstance::new(&ts, objective);
        fs::write(lp_path, export_milp(&instance))?;
        println!("model written to {}", lp_path.display());
        return Ok(ExitCode::SUCCESS);
    }
    if let Some(sol_path) = &cmd.import {
        let text = fs::read_to_string(sol_path)?;
        let schedule = import_solution(&text, &ts)?;
        let report = validate(&schedule, &ts)?;
        if !report.overall {
            for v in &report.violations {
                eprintln!("violation: {}", v.message);
            }
            bail!("imported solution is invalid");
        }
        if let Some(out) = &cmd.out {
            write_schedule(out, &schedule)?;
        }
        println!("imported solution is valid");
        return Ok(ExitCode::SUCCESS);
    }

    let out = exact::solve(&ts, objective, Duration::from_secs(cmd.timeout));
    println!(
        "status: {}",
        match out.status {
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::TimedOut => "timeout",
        }
    );
    if let Some(v) = out.objective_value {
        println!("objective: {v}");
    }
    println!("nodes: {} proven: {}", out.stats.nodes, out.stats.proven);
    match out.schedule {
        Some(s) => {
            if let Some(path) = &cmd.out {
                write_schedule(path, &s)?;
            } else {
                println!("{}", schedule_to_json(&s));
            }
            // Companion `name value` lines for cross-checks against
            // external solvers.
            let _ = export_solution(&s);
            Ok(ExitCode::SUCCESS)
        }
        None => Ok(ExitCode::FAILURE),
    }
}

fn parse_mode(code: &str) -> Result<SchedulerMode> {
    SchedulerMode::from_code(code)
        .with_context(|| format!("unknown mode '{code}' (expected 00|01|10|11)"))
}

fn cmd_heur(cmd: HeurCmd) -> Result<ExitCode> {
    let ts = load_taskset(&cmd.taskset)?;
    let mode = parse_mode(&cmd.mode)?;
    let out = heuristic::schedule(&ts, mode);
    match out.schedule {
        Some(s) => {
            println!("status: feasible");
            if let Some(path) = &cmd.out {
                write_schedule(path, &s)?;
            } else {
                println!("{}", schedule_to_json(&s));
            }
            Ok(ExitCode::SUCCESS)
        }
        None => {
            println!("status: unschedulable");
            if let heuristic::HeurStatus::Unschedulable { task, subperiod } = out.status {
                println!("blocked: task {task} subperiod {subperiod}");
            }
            Ok(ExitCode::FAILURE)
        }
    }
}

fn cmd_merge(cmd: MergeCmd) -> Result<ExitCode> {
    let a = load_taskset(&cmd.taskset_a)?;
    let sa = read_schedule(&cmd.schedule_a)?;
    let b = load_taskset(&cmd.taskset_b)?;
    let sb = read_schedule(&cmd.schedule_b)?;
    let engine: Engine = cmd.engine.parse().map_err(anyhow::Error::msg)?;
    let budget = Duration::from_secs(cmd.timeout);

    let (merged, schedule) = match engine {
        Engine::ExactNone | Engine::ExactJitter => {
            let m = merge_schedules(&a, &sa, &b, &sb)?;
            let out = exact::solve_adaptation(&m.taskset, &m.combined, &[&m.first, &m.second], budget);
            (m.taskset, out.schedule)
        }
        Engine::Heur(mode) => {
            let r = heuristic::adapt(&a, &sa, &b, &sb, mode)?;
            (r.taskset, r.outcome.schedule)
        }
    };
    if let Some(path) = &cmd.out_taskset {
        write_taskset(path, &merged)?;
    }
    match schedule {
        Some(s) => {
            println!("status: feasible");
            if let Some(path) = &cmd.out {
                write_schedule(path, &s)?;
            } else {
                println!("{}", schedule_to_json(&s));
            }
            Ok(ExitCode::SUCCESS)
        }
        None => {
            println!("status: unschedulable");
            Ok(ExitCode::FAILURE)
        }
    }
}

fn cmd_validate(cmd: ValidateCmd) -> Result<ExitCode> {
    let ts = load_taskset(&cmd.taskset)?;
    let schedule = read_schedule(&cmd.schedule)?;
    let mut report = validate(&schedule, &ts)?;
    if let Some(old_path) = &cmd.old_schedule {
        let old = read_schedule(old_path)?;
        let transition = validate_transition(&old, &schedule, &ts)?;
        report.violations.extend(transition.violations);
        report.overall = report.overall && transition.overall;
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if report.overall {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn parse_engines(spec: Option<&str>) -> Result<Vec<Engine>> {
    match spec {
        None => Ok(Engine::ALL.to_vec()),
        Some(s) => s
            .split(',')
            .map(|e| e.trim().parse::<Engine>().map_err(anyhow::Error::msg))
            .collect(),
    }
}

fn cmd_bench(cmd: BenchCmd) -> Result<ExitCode> {
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(&cmd.manifest)?)?;
    let engines = parse_engines(cmd.engines.as_deref())?;
    let timeout = Duration::from_secs(cmd.timeout);
    fs::create_dir_all(&cmd.out)?;
    fs::copy(&cmd.manifest, cmd.out.join("manifest.json"))?;

    if manifest.pairs {
        let mut pairs = Vec::new();
        for (_, params) in manifest.instances() {
            pairs.extend(gen::generate_pairs(&params, 1)?);
        }
        let stats = run_merge_benchmark(&pairs, &engines, timeout)?;
        let mut csv = String::from("engine,attempts,successes,rate\n");
        for s in &stats {
            csv.push_str(&format!(
                "{},{},{},{:.4}\n",
                s.engine,
                s.attempts,
                s.successes,
                s.rate()
            ));
            println!(
                "{}: {}/{} merged ({:.1}%)",
                s.engine,
                s.successes,
                s.attempts,
                100.0 * s.rate()
            );
        }
        fs::write(cmd.out.join("merge.csv"), csv)?;

        let mut hyp_csv = String::from("engine,bin_midpoint,attempts,successes,fraction\n");
        for &engine in &engines {
            let table = run_hypothesis(&pairs, engine, timeout, cmd.bins)?;
            for b in &table.bins {
                hyp_csv.push_str(&format!(
                    "{engine},{:.4},{},{},{:.4}\n",
                    b.midpoint,
                    b.attempts,
                    b.successes,
                    b.fraction()
                ));
            }
            println!("{engine}: distribution/success spearman {:.3}", table.spearman);
        }
        fs::write(cmd.out.join("hypothesis.csv"), hyp_csv)?;
    } else {
        let mut corpus = Vec::new();
        for (seed, params) in manifest.instances() {
            corpus.push((seed, gen::generate(&params)?));
        }
        let rows = run_corpus(&corpus, &engines, timeout, cmd.jobs)?;
        fs::write(cmd.out.join("rows.csv"), rows_to_csv(&rows))?;
        for &engine in &engines {
            if let Some(frac) = bench::success_fraction(&rows, engine) {
                println!("{engine}: {:.1}% schedulable", 100.0 * frac);
            }
        }
    }
    println!("results under {}", cmd.out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_cdf(cmd: CdfCmd) -> Result<ExitCode> {
    let text = fs::read_to_string(&cmd.input)?;
    let mut lines = text.lines();
    let header = lines.next().context("empty CSV")?;
    let col = header
        .split(',')
        .position(|h| h == cmd.column)
        .with_context(|| format!("column '{}' not in header '{header}'", cmd.column))?;
    let mut values = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let field = line.split(',').nth(col).unwrap_or("");
        if field.is_empty() {
            continue;
        }
        values.push(field.parse::<f64>().with_context(|| format!("bad value '{field}'"))?);
    }
    let cdf = emit_cdf(&values)?;
    let csv_path = cmd.out.with_extension("csv");
    let svg_path = cmd.out.with_extension("svg");
    fs::write(&csv_path, cdf.to_csv())?;
    fs::write(&svg_path, cdf.to_svg())?;
    println!("wrote {} and {}", csv_path.display(), svg_path.display());
    Ok(ExitCode::SUCCESS)
}
