//! Command-line front end: instance/config parsing and CSV output.
//!
//! Exit codes: 0 success, 1 demo self-test failure, 2 input error, 3 an exact
//! solver refused an instance as too large.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use thiserror::Error;

use crate::codec::{build_codeword, decode, default_demands, place_caches, Library};
use crate::harness::{compare_solvers, sweep_points, sweep_tlim, Comparison, ExperimentConfig};
use crate::model::{full_cc_time, uncoded_time, CapacitySpec, DeliveryProblem, Instance, Memory};
use crate::solver::{Algorithm, SolverReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    ResourceCap(String),
    #[error("demo self-test failed: {0}")]
    AnchorMismatch(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::AnchorMismatch(_) => 1,
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::ResourceCap(_) => 3,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::TooLargeForExact { .. } => CliError::ResourceCap(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "cc-qoe", version, about = "QoE-maximizing coded caching delivery schedulers")]
pub struct Cli {
    /// Master seed; overrides the seed of a compare config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for compare trials (0 = one per core).
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the five-user example network and check its known results.
    Demo,
    /// Solve one instance and write the per-group decisions.
    Solve {
        #[arg(long)]
        algo: String,
        #[arg(long)]
        instance: PathBuf,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve one instance over a grid of time budgets.
    Sweep {
        #[arg(long)]
        solver: String,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        start: f64,
        #[arg(long)]
        stop: f64,
        #[arg(long)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare solvers over seeded random instances.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Demo => cmd_demo(stdout),
        Command::Solve { algo, instance, out } => {
            let csv = cmd_solve(&instance, &parse_algorithm(&algo)?)?;
            emit(out.as_deref(), &csv, stdout)
        }
        Command::Sweep {
            solver,
            instance,
            start,
            stop,
            step,
            out,
        } => {
            let csv = cmd_sweep(&instance, &parse_algorithm(&solver)?, start, stop, step)?;
            emit(out.as_deref(), &csv, stdout)
        }
        Command::Compare { config, out } => {
            let csv = cmd_compare(&config, cli.seed, cli.jobs)?;
            emit(out.as_deref(), &csv, stdout)
        }
    }
}

fn emit(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn parse_algorithm(name: &str) -> CliResult<Algorithm> {
    name.parse().map_err(|e: crate::Error| CliError::Input(e.to_string()))
}

/// On-disk instance document (JSON). Exactly one of `capacities` or
/// `channels` must be present; `channels` also needs `P_T` and `N_0`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    #[serde(rename = "K")]
    users: usize,
    t: usize,
    #[serde(rename = "T_lim")]
    time_limit: f64,
    capacities: Option<Vec<f64>>,
    channels: Option<Vec<[f64; 2]>>,
    #[serde(rename = "P_T")]
    tx_power: Option<f64>,
    #[serde(rename = "N_0")]
    noise_power: Option<f64>,
    log_base: Option<f64>,
    #[serde(rename = "M")]
    cache_files: Option<f64>,
    #[serde(rename = "N")]
    library_files: Option<f64>,
}

pub fn parse_instance(text: &str) -> CliResult<Instance> {
    let f: InstanceFile = serde_json::from_str(text).map_err(|e| CliError::Input(format!("instance: {e}")))?;
    let spec = match (f.capacities, f.channels) {
        (Some(c), None) => {
            if f.tx_power.is_some() || f.noise_power.is_some() || f.log_base.is_some() {
                return Err(CliError::Input("P_T, N_0 and log_base only apply to `channels`".into()));
            }
            CapacitySpec::Direct(c)
        }
        (None, Some(h)) => {
            let (Some(tx_power), Some(noise_power)) = (f.tx_power, f.noise_power) else {
                return Err(CliError::Input("`channels` requires P_T and N_0".into()));
            };
            CapacitySpec::Channels {
                coefficients: h.iter().map(|[re, im]| Complex64::new(*re, *im)).collect(),
                tx_power,
                noise_power,
                log_base: f.log_base.unwrap_or(2.0),
            }
        }
        _ => {
            return Err(CliError::Input(
                "instance needs exactly one of `capacities` or `channels`".into(),
            ))
        }
    };
    let memory = match (f.cache_files, f.library_files) {
        (Some(m), Some(n)) => Some(Memory {
            cache_files: m,
            library_files: n,
        }),
        (None, None) => None,
        _ => return Err(CliError::Input("M and N must be given together".into())),
    };
    Ok(Instance::new(f.users, f.t, f.time_limit, spec, memory)?)
}

pub fn load_instance(path: &Path) -> CliResult<Instance> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_instance(&text)
}

pub fn load_config(path: &Path) -> CliResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let cfg: ExperimentConfig = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("config: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().flexible(true).from_writer(Vec::new())
}

fn csv_finish(w: csv::Writer<Vec<u8>>) -> CliResult<String> {
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

/// Per-group decisions. The last row is `qoe_sum=..,total_time=..,wall_time=..`.
pub fn schedule_csv(problem: &DeliveryProblem, report: &SolverReport) -> CliResult<String> {
    let mut w = csv_writer();
    w.write_record(["group_members", "j", "time_seconds"])
        .map_err(csv_err)?;
    for (group, &j) in problem.groups.iter().zip(&report.schedule.decisions) {
        w.write_record([group.label(), j.to_string(), group.time(j).to_string()])
            .map_err(csv_err)?;
    }
    w.write_record([
        format!("qoe_sum={}", report.schedule.qoe_sum),
        format!("total_time={}", report.schedule.total_time),
        format!("wall_time={}", report.wall_time),
    ])
    .map_err(csv_err)?;
    csv_finish(w)
}

pub fn cmd_solve(instance_path: &Path, algorithm: &Algorithm) -> CliResult<String> {
    let instance = load_instance(instance_path)?;
    let problem = instance.problem()?;
    let report = algorithm.solve(&problem, instance.time_limit())?;
    schedule_csv(&problem, &report)
}

pub fn cmd_sweep(instance_path: &Path, algorithm: &Algorithm, start: f64, stop: f64, step: f64) -> CliResult<String> {
    let instance = load_instance(instance_path)?;
    let problem = instance.problem()?;
    let points = sweep_points(start, stop, step)?;
    let rows = sweep_tlim(&problem, *algorithm, &points)?;
    let mut w = csv_writer();
    let mut header = vec!["T_lim".to_string(), "qoe_sum".to_string()];
    header.extend((1..=instance.users()).map(|k| format!("qoe_user_{k}")));
    w.write_record(&header).map_err(csv_err)?;
    for row in rows {
        let mut rec = vec![row.time_limit.to_string(), row.qoe_sum.to_string()];
        rec.extend(row.qoe_per_user.iter().map(u64::to_string));
        w.write_record(&rec).map_err(csv_err)?;
    }
    csv_finish(w)
}

fn opt_cell(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

pub const COMPARE_COLUMNS: [&str; 12] = [
    "K",
    "t",
    "trials",
    "mean_qoe_opt",
    "mean_qoe_pdt",
    "mean_qoe_sdt",
    "pdt_gap_pct",
    "sdt_gap_pct",
    "pdt_over_sdt_pct",
    "pdt_runtime_vs_opt_pct",
    "sdt_runtime_vs_opt_pct",
    "pdt_sdt_runtime_ratio",
];

/// Aggregate table, preceded by `#` lines describing the run.
pub fn comparison_csv(config: &ExperimentConfig, cmp: &Comparison) -> CliResult<String> {
    let mut out = String::new();
    let solvers: Vec<String> = config.algorithms()?.iter().map(|a| a.to_string()).collect();
    writeln!(out, "# seed={}", config.seed).unwrap();
    writeln!(out, "# capacity={}", config.capacity.describe()).unwrap();
    writeln!(out, "# trials={}", config.trials).unwrap();
    writeln!(out, "# T_lim={}", config.time_limit).unwrap();
    writeln!(out, "# solvers={}", solvers.join(" ")).unwrap();
    writeln!(out, "# runtime=median of {} repetitions", config.runtime_reps.max(1)).unwrap();
    let mut w = csv_writer();
    w.write_record(COMPARE_COLUMNS).map_err(csv_err)?;
    for a in &cmp.aggregates {
        let opt = a
            .mean_qoe
            .get(&Algorithm::Dp)
            .or_else(|| a.mean_qoe.get(&Algorithm::Exhaustive))
            .copied();
        w.write_record([
            a.users.to_string(),
            a.gain.to_string(),
            a.trials.to_string(),
            opt_cell(opt),
            opt_cell(a.mean_qoe.get(&Algorithm::Pdt).copied()),
            opt_cell(a.mean_qoe.get(&Algorithm::Sdt).copied()),
            opt_cell(a.pdt_gap_pct),
            opt_cell(a.sdt_gap_pct),
            opt_cell(a.pdt_over_sdt_pct),
            opt_cell(a.pdt_runtime_vs_opt_pct),
            opt_cell(a.sdt_runtime_vs_opt_pct),
            opt_cell(a.pdt_sdt_runtime_ratio),
        ])
        .map_err(csv_err)?;
    }
    out.push_str(&csv_finish(w)?);
    Ok(out)
}

pub fn cmd_compare(config_path: &Path, seed: Option<u64>, jobs: usize) -> CliResult<String> {
    let mut config = load_config(config_path)?;
    if let Some(s) = seed {
        config.seed = s;
    }
    let cmp = compare_solvers(&config, jobs)?;
    comparison_csv(&config, &cmp)
}

fn ids(v: &[u64]) -> String {
    let parts: Vec<String> = v.iter().map(u64::to_string).collect();
    format!("({})", parts.join(", "))
}

/// Runs every solver on the five-user example at budgets 10 s and 45 s,
/// checks the known results, and replays the exact 10 s schedule through the
/// XOR codec.
pub fn cmd_demo(out: &mut dyn Write) -> CliResult<()> {
    let instance = Instance::demo(10.0);
    let problem = instance.problem()?;
    let mut failures = Vec::new();
    let mut check = |ok: bool, what: String| {
        if !ok {
            failures.push(what);
        }
    };

    writeln!(
        out,
        "K=5 t=2 P=10, c_k = 1/(10k): one descriptor reaches user k in k seconds"
    )?;
    let uncoded = uncoded_time(&instance)?;
    let full = full_cc_time(&instance)?;
    writeln!(out, "uncoded delivery time: {uncoded} s")?;
    writeln!(out, "full coded caching time: {full} s")?;
    check((uncoded - 90.0).abs() <= 1e-9, format!("uncoded time {uncoded} != 90"));
    check(
        (full - 45.0).abs() <= 1e-9,
        format!("full coded caching time {full} != 45"),
    );

    for (budget, want) in [(10.0, 10u64), (45.0, 30)] {
        writeln!(out, "\nT_lim = {budget} s")?;
        for algorithm in Algorithm::ALL {
            let r = algorithm.solve(&problem, budget)?;
            let s = &r.schedule;
            let decisions: Vec<u64> = s.decisions.iter().map(|&j| j as u64).collect();
            writeln!(
                out,
                "  {:<10} qoe_sum={:<3} total_time={:<6} j={} per_user={}",
                algorithm.name(),
                s.qoe_sum,
                s.total_time,
                ids(&decisions),
                ids(&s.qoe_per_user),
            )?;
            check(
                s.qoe_sum == want,
                format!("{algorithm} at T_lim={budget}: qoe_sum {} != {want}", s.qoe_sum),
            );
            check(
                s.fits(budget),
                format!("{algorithm} at T_lim={budget} overruns the budget"),
            );
            if algorithm.is_exact() && budget == 10.0 {
                check(
                    (s.total_time - 10.0).abs() <= 1e-9,
                    format!("{algorithm} total time {} != 10", s.total_time),
                );
            }
        }
    }

    let exact = Algorithm::Dp.solve(&problem, 10.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let library = Library::random(5, 5, 2, 64, &mut rng)?;
    let caches = place_caches(&library)?;
    let demands = default_demands(5, 5);
    let mut delivered = 0;
    for (group, &j) in problem.groups.iter().zip(&exact.schedule.decisions) {
        if j == 0 {
            continue;
        }
        let codeword = build_codeword(group, j, &demands, &library)?;
        for &user in &group.order()[..j] {
            let got = decode(user, &codeword, &caches[user], &demands)?;
            let want = library.descriptor(got.file, got.subset)?;
            check(got == want, format!("user {} decoded a corrupted descriptor", user + 1));
            delivered += 1;
        }
    }
    writeln!(
        out,
        "\ncodec replay at T_lim = 10 s: {delivered} descriptors decoded byte-exact"
    )?;
    check(
        delivered == 10,
        format!("{delivered} descriptors delivered, expected 10"),
    );

    if failures.is_empty() {
        writeln!(out, "all checks passed")?;
        Ok(())
    } else {
        for f in &failures {
            writeln!(out, "FAILED: {f}")?;
        }
        Err(CliError::AnchorMismatch(failures.join("; ")))
    }
}
