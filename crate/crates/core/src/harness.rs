//! Experiment driver: random channel instances, budget sweeps, and seeded
//! solver-comparison grids with runtime measurement.

use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{CapacitySpec, DeliveryProblem, Instance};
use crate::solver::Algorithm;

pub const DEFAULT_SNR_DB: f64 = 10.0;
pub const DEFAULT_RUNTIME_REPS: usize = 3;

/// `K` i.i.d. CN(0, 1) samples, unnormalized.
pub fn sample_channels<R: Rng + ?Sized>(users: usize, rng: &mut R) -> Vec<Complex64> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    (0..users)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * scale, im * scale)
        })
        .collect()
}

/// Scales the coefficients so the strongest one has unit amplitude.
pub fn normalize_channels(channels: &mut [Complex64]) {
    let peak = channels.iter().map(|h| h.norm()).fold(0.0, f64::max);
    if peak > 0.0 {
        for h in channels.iter_mut() {
            *h /= peak;
        }
    }
}

/// Random channels with `max |h_k| = 1`.
pub fn gen_channels<R: Rng + ?Sized>(users: usize, rng: &mut R) -> Vec<Complex64> {
    let mut h = sample_channels(users, rng);
    normalize_channels(&mut h);
    h
}

/// Independent RNG stream for one cell of an experiment grid.
pub fn trial_rng(seed: u64, users: usize, gain: usize, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((users as u64 & 0xFFFF) << 48) | ((gain as u64 & 0xFFFF) << 32) | (trial & 0xFFFF_FFFF));
    rng
}

/// How trial capacities are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum CapacityMode {
    /// Normalized Gaussian channels pushed through the Shannon formula at
    /// the given `P_T / N_0`.
    Channels {
        #[serde(default = "default_snr_db")]
        snr_db: f64,
        #[serde(default = "default_log_base")]
        log_base: f64,
    },
    /// Rates drawn uniformly from `[min, max]`.
    Direct { min: f64, max: f64 },
}

fn default_snr_db() -> f64 {
    DEFAULT_SNR_DB
}

fn default_log_base() -> f64 {
    2.0
}

impl Default for CapacityMode {
    fn default() -> Self {
        CapacityMode::Channels {
            snr_db: DEFAULT_SNR_DB,
            log_base: 2.0,
        }
    }
}

impl CapacityMode {
    fn validate(&self) -> Result<()> {
        match *self {
            CapacityMode::Channels { snr_db, log_base } => {
                if !snr_db.is_finite() || log_base.is_nan() || log_base <= 0.0 || log_base == 1.0 {
                    return Err(invalid("channel mode needs a finite snr_db and a log base > 0, != 1"));
                }
            }
            CapacityMode::Direct { min, max } => {
                if !(min >= 0.0 && max >= min && max.is_finite()) {
                    return Err(invalid(format!("direct capacity range [{min}, {max}] is invalid")));
                }
            }
        }
        Ok(())
    }

    /// Short description for output headers.
    pub fn describe(&self) -> String {
        match self {
            CapacityMode::Channels { snr_db, log_base } => format!("channels snr_db={snr_db} log_base={log_base}"),
            CapacityMode::Direct { min, max } => format!("direct uniform [{min}, {max}]"),
        }
    }
}

/// One random instance drawn from `rng` under `mode`.
pub fn random_instance<R: Rng + ?Sized>(
    users: usize,
    gain: usize,
    time_limit: f64,
    mode: &CapacityMode,
    rng: &mut R,
) -> Result<Instance> {
    let spec = match *mode {
        CapacityMode::Channels { snr_db, log_base } => CapacitySpec::Channels {
            coefficients: gen_channels(users, rng),
            tx_power: 10f64.powf(snr_db / 10.0),
            noise_power: 1.0,
            log_base,
        },
        CapacityMode::Direct { min, max } => {
            CapacitySpec::Direct((0..users).map(|_| rng.random_range(min..=max)).collect())
        }
    };
    Instance::new(users, gain, time_limit, spec, None)
}

/// Runs `f` `reps` times (at least once) and returns the last result with the
/// median wall time in seconds.
pub fn measure_runtime<T>(reps: usize, mut f: impl FnMut() -> T) -> (T, f64) {
    let mut times = Vec::with_capacity(reps.max(1));
    let mut out = None;
    for _ in 0..reps.max(1) {
        let started = Instant::now();
        let value = f();
        times.push(started.elapsed().as_secs_f64());
        out = Some(value);
    }
    times.sort_by(f64::total_cmp);
    (out.expect("at least one repetition"), times[times.len() / 2])
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub time_limit: f64,
    pub qoe_sum: u64,
    pub qoe_per_user: Vec<u64>,
}

/// Budgets `start, start + step, ..` up to `stop` (inclusive within 1e-9).
pub fn sweep_points(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || !start.is_finite() || !stop.is_finite() {
        return Err(invalid(format!(
            "sweep needs finite bounds and step > 0, got step {step}"
        )));
    }
    let mut points = Vec::new();
    let mut i = 0u64;
    loop {
        let x = start + i as f64 * step;
        if x > stop + 1e-9 {
            break;
        }
        points.push(x);
        i += 1;
    }
    Ok(points)
}

pub fn sweep_tlim(problem: &DeliveryProblem, algorithm: Algorithm, points: &[f64]) -> Result<Vec<SweepRow>> {
    points
        .iter()
        .map(|&time_limit| {
            let report = algorithm.solve(problem, time_limit)?;
            Ok(SweepRow {
                time_limit,
                qoe_sum: report.schedule.qoe_sum,
                qoe_per_user: report.schedule.qoe_per_user,
            })
        })
        .collect()
}

/// A solver-comparison grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(rename = "K")]
    pub users: Vec<usize>,
    /// Caching gains to run for every `K`; all of `1..K` when absent.
    #[serde(rename = "t", default)]
    pub gains: Option<Vec<usize>>,
    #[serde(rename = "T_lim")]
    pub time_limit: f64,
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    pub solvers: Vec<String>,
    #[serde(default)]
    pub capacity: CapacityMode,
    #[serde(default = "default_runtime_reps")]
    pub runtime_reps: usize,
}

fn default_runtime_reps() -> usize {
    DEFAULT_RUNTIME_REPS
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials must be >= 1"));
        }
        if self.time_limit.is_nan() || self.time_limit < 0.0 {
            return Err(invalid("T_lim must be >= 0"));
        }
        if self.users.is_empty() {
            return Err(invalid("K list is empty"));
        }
        self.algorithms()?;
        self.capacity.validate()?;
        for (k, t) in self.grid() {
            if t < 1 || t + 1 > k {
                return Err(invalid(format!("invalid (K, t) pair ({k}, {t})")));
            }
        }
        Ok(())
    }

    pub fn algorithms(&self) -> Result<Vec<Algorithm>> {
        if self.solvers.is_empty() {
            return Err(invalid("no solvers requested"));
        }
        let mut algs = self
            .solvers
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<Algorithm>>>()?;
        algs.sort();
        algs.dedup();
        Ok(algs)
    }

    /// `(K, t)` cells in configuration order.
    pub fn grid(&self) -> Vec<(usize, usize)> {
        self.users
            .iter()
            .flat_map(|&k| {
                let gains = match &self.gains {
                    Some(g) => g.clone(),
                    None => (1..k).collect(),
                };
                gains.into_iter().map(move |t| (k, t))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOutcome {
    pub qoe_sum: u64,
    pub qoe_per_user: Vec<u64>,
    pub total_time: f64,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub users: usize,
    pub gain: usize,
    pub seed: u64,
    pub trial: u64,
    pub time_limit: f64,
    pub outcomes: BTreeMap<Algorithm, SolverOutcome>,
}

impl TrialResult {
    /// The optimum, from whichever exact solver ran.
    pub fn optimum(&self) -> Option<u64> {
        [Algorithm::Dp, Algorithm::Exhaustive]
            .iter()
            .find_map(|a| self.outcomes.get(a).map(|o| o.qoe_sum))
    }

    pub fn qoe(&self, algorithm: Algorithm) -> Option<u64> {
        self.outcomes.get(&algorithm).map(|o| o.qoe_sum)
    }
}

pub fn run_trial(config: &ExperimentConfig, users: usize, gain: usize, trial: u64) -> Result<TrialResult> {
    let mut rng = trial_rng(config.seed, users, gain, trial);
    let instance = random_instance(users, gain, config.time_limit, &config.capacity, &mut rng)?;
    let problem = instance.problem()?;
    let mut outcomes = BTreeMap::new();
    for algorithm in config.algorithms()? {
        let (report, wall_time) = measure_runtime(config.runtime_reps, || algorithm.solve(&problem, config.time_limit));
        let report = report?;
        outcomes.insert(
            algorithm,
            SolverOutcome {
                qoe_sum: report.schedule.qoe_sum,
                qoe_per_user: report.schedule.qoe_per_user,
                total_time: report.schedule.total_time,
                wall_time,
            },
        );
    }
    Ok(TrialResult {
        users,
        gain,
        seed: config.seed,
        trial,
        time_limit: config.time_limit,
        outcomes,
    })
}

/// Per-`(K, t)` means over all trials. Percentages are `100 * (a - b) / b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub users: usize,
    pub gain: usize,
    pub trials: u64,
    pub mean_qoe: BTreeMap<Algorithm, f64>,
    pub mean_wall_time: BTreeMap<Algorithm, f64>,
    /// Mean per-trial relative QoE gap of PDT vs the optimum, percent.
    pub pdt_gap_pct: Option<f64>,
    pub sdt_gap_pct: Option<f64>,
    /// Mean QoE improvement of PDT over SDT, percent.
    pub pdt_over_sdt_pct: Option<f64>,
    /// Mean runtime change vs the exact solver, percent.
    pub pdt_runtime_vs_opt_pct: Option<f64>,
    pub sdt_runtime_vs_opt_pct: Option<f64>,
    /// Mean PDT wall time over mean SDT wall time.
    pub pdt_sdt_runtime_ratio: Option<f64>,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

fn pct_change(new: f64, base: f64) -> f64 {
    if base == 0.0 {
        if new == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        100.0 * (new - base) / base
    }
}

pub fn aggregate(users: usize, gain: usize, trials: &[TrialResult]) -> Aggregate {
    let algs: Vec<Algorithm> = trials
        .first()
        .map(|t| t.outcomes.keys().copied().collect())
        .unwrap_or_default();
    let mean_qoe: BTreeMap<_, _> = algs
        .iter()
        .map(|&a| (a, mean(trials.iter().map(|t| t.outcomes[&a].qoe_sum as f64))))
        .collect();
    let mean_wall_time: BTreeMap<_, _> = algs
        .iter()
        .map(|&a| (a, mean(trials.iter().map(|t| t.outcomes[&a].wall_time))))
        .collect();
    let exact = [Algorithm::Dp, Algorithm::Exhaustive]
        .into_iter()
        .find(|a| algs.contains(a));
    let gap = |heuristic: Algorithm| -> Option<f64> {
        exact?;
        algs.contains(&heuristic).then(|| {
            mean(trials.iter().map(|t| {
                let opt = t.optimum().unwrap() as f64;
                pct_change(t.outcomes[&heuristic].qoe_sum as f64, opt)
            }))
        })
    };
    let runtime_vs_opt = |heuristic: Algorithm| -> Option<f64> {
        let e = exact?;
        mean_wall_time
            .get(&heuristic)
            .map(|&h| pct_change(h, mean_wall_time[&e]))
    };
    let both = algs.contains(&Algorithm::Pdt) && algs.contains(&Algorithm::Sdt);
    Aggregate {
        users,
        gain,
        trials: trials.len() as u64,
        pdt_gap_pct: gap(Algorithm::Pdt),
        sdt_gap_pct: gap(Algorithm::Sdt),
        pdt_over_sdt_pct: both.then(|| pct_change(mean_qoe[&Algorithm::Pdt], mean_qoe[&Algorithm::Sdt])),
        pdt_runtime_vs_opt_pct: runtime_vs_opt(Algorithm::Pdt),
        sdt_runtime_vs_opt_pct: runtime_vs_opt(Algorithm::Sdt),
        pdt_sdt_runtime_ratio: both.then(|| mean_wall_time[&Algorithm::Pdt] / mean_wall_time[&Algorithm::Sdt]),
        mean_qoe,
        mean_wall_time,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub trials: Vec<TrialResult>,
    pub aggregates: Vec<Aggregate>,
}

/// Runs every `(K, t, trial)` cell of `config`, using up to `jobs` threads
/// (0 = rayon default). Results are in grid order regardless of `jobs`.
pub fn compare_solvers(config: &ExperimentConfig, jobs: usize) -> Result<Comparison> {
    config.validate()?;
    let cells: Vec<(usize, usize, u64)> = config
        .grid()
        .into_iter()
        .flat_map(|(k, t)| (0..config.trials).map(move |i| (k, t, i)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| invalid(format!("thread pool: {e}")))?;
    let trials = pool.install(|| {
        cells
            .par_iter()
            .map(|&(k, t, i)| run_trial(config, k, t, i))
            .collect::<Result<Vec<_>>>()
    })?;
    let aggregates = trials
        .chunks(config.trials as usize)
        .map(|chunk| aggregate(chunk[0].users, chunk[0].gain, chunk))
        .collect();
    Ok(Comparison { trials, aggregates })
}
