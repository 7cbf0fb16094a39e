//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use cc_qoe::codec::{build_codeword, decode, default_demands, place_caches, Library};
use cc_qoe::harness::{compare_solvers, ExperimentConfig};
use cc_qoe::model::{build_group, full_cc_time, uncoded_time, CapacityVector, TIME_EPS};
use cc_qoe::solver::{solve_exhaustive, DEFAULT_EXHAUSTIVE_CAP};
use cc_qoe::subsets::{binomial, subsets};
use cc_qoe::{Algorithm, DeliveryProblem, Error, Instance};
use common::{by_subset, full_codeword, random_channel_instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exhaustive_fits(problem: &DeliveryProblem) -> bool {
    let gain = problem.gain as f64;
    (gain + 2.0).powf(problem.groups.len() as f64) <= DEFAULT_EXHAUSTIVE_CAP
}

fn within(started: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let took = started.elapsed();
    ensure(took < limit, || format!("{what} took {took:.1?}, limit {limit:?}"))
}

fn demo_exactness() -> Check {
    let started = Instant::now();
    let problem = Instance::demo(0.0).problem().map_err(|e| e.to_string())?;
    for algo in [Algorithm::Exhaustive, Algorithm::Dp] {
        for (budget, want) in [(10.0, 10), (45.0, 30)] {
            let r = algo.solve(&problem, budget).map_err(|e| e.to_string())?;
            let s = &r.schedule;
            ensure(s.qoe_sum == want, || {
                format!("{algo} at T_lim={budget}: qoe_sum {} != {want}", s.qoe_sum)
            })?;
            if budget == 10.0 {
                ensure((s.total_time - 10.0).abs() <= TIME_EPS, || {
                    format!("{algo} at T_lim=10: total_time {}", s.total_time)
                })?;
            }
        }
    }
    within(started, Duration::from_secs(10), "demo")?;
    Ok(format!("qoe 10 @ 10 s, 30 @ 45 s, in {:.1?}", started.elapsed()))
}

fn baselines() -> Check {
    let inst = Instance::demo(0.0);
    let uncoded = uncoded_time(&inst).map_err(|e| e.to_string())?;
    let full = full_cc_time(&inst).map_err(|e| e.to_string())?;
    ensure((uncoded - 90.0).abs() <= 1e-9, || format!("uncoded {uncoded}"))?;
    ensure((full - 45.0).abs() <= 1e-9, || format!("full coded caching {full}"))?;
    Ok(format!("uncoded {uncoded:.12}, full {full:.12}"))
}

fn oracle_equivalence() -> Check {
    let mut n = 0;
    for users in [4, 5] {
        for gain in 1..users {
            for trial in 0..40 {
                let (inst, budget) = random_channel_instance(101, users, gain, trial);
                let problem = inst.problem().map_err(|e| e.to_string())?;
                let dp = Algorithm::Dp.solve(&problem, budget).map_err(|e| e.to_string())?;
                let ex = solve_exhaustive(&problem, budget).map_err(|e| e.to_string())?;
                ensure(dp.schedule.qoe_sum == ex.schedule.qoe_sum, || {
                    format!(
                        "K={users} t={gain} trial {trial}: dp {} vs exhaustive {}",
                        dp.schedule.qoe_sum, ex.schedule.qoe_sum
                    )
                })?;
                n += 1;
            }
        }
    }
    Ok(format!("{n} instances agree"))
}

fn heuristic_quality() -> Check {
    let started = Instant::now();
    let config = ExperimentConfig {
        users: vec![5],
        gains: Some(vec![2]),
        time_limit: 4.0,
        trials: 1000,
        seed: 2024,
        solvers: vec!["exhaustive".into(), "dp".into(), "sdt".into(), "pdt".into()],
        capacity: Default::default(),
        runtime_reps: 1,
    };
    let cmp = compare_solvers(&config, 0).map_err(|e| e.to_string())?;
    for t in &cmp.trials {
        let opt = t.optimum().unwrap();
        ensure(t.qoe(Algorithm::Exhaustive) == Some(opt), || {
            format!("trial {}: exact solvers disagree", t.trial)
        })?;
        for h in [Algorithm::Sdt, Algorithm::Pdt] {
            let q = t.qoe(h).unwrap();
            ensure(q <= opt, || format!("trial {}: {h} {q} exceeds optimum {opt}", t.trial))?;
        }
    }
    let agg = &cmp.aggregates[0];
    let pdt = agg.pdt_gap_pct.unwrap();
    let sdt = agg.sdt_gap_pct.unwrap();
    ensure(pdt.abs() <= 1.0, || format!("PDT gap {pdt:.4}%"))?;
    ensure(sdt.abs() <= 2.0, || format!("SDT gap {sdt:.4}%"))?;
    within(started, Duration::from_secs(300), "1000 trials")?;
    Ok(format!(
        "{} trials, PDT gap {pdt:.4}%, SDT gap {sdt:.4}%, in {:.1?}",
        cmp.trials.len(),
        started.elapsed()
    ))
}

fn dominance_and_feasibility() -> Check {
    let mut instances = 0;
    let mut sdt_vs_pdt_only = 0;
    for users in 3..=12 {
        for gain in 1..users {
            let trials = if users <= 8 { 25 } else { 4 };
            for trial in 0..trials {
                let (inst, budget) = random_channel_instance(202, users, gain, trial);
                let problem = inst.problem().map_err(|e| e.to_string())?;
                let tag = format!("K={users} t={gain} trial {trial}");
                let exact = match Algorithm::Dp.solve(&problem, budget) {
                    Ok(r) => Some(r),
                    Err(Error::TooLargeForExact { .. }) => None,
                    Err(e) => return Err(e.to_string()),
                };
                let sdt = Algorithm::Sdt.solve(&problem, budget).map_err(|e| e.to_string())?;
                let pdt = Algorithm::Pdt.solve(&problem, budget).map_err(|e| e.to_string())?;
                for r in [Some(&sdt), Some(&pdt), exact.as_ref()].into_iter().flatten() {
                    ensure(r.schedule.total_time <= budget + TIME_EPS, || {
                        format!("{tag}: {} uses {} > {budget}", r.algorithm, r.schedule.total_time)
                    })?;
                }
                match &exact {
                    Some(opt) => {
                        for h in [&sdt, &pdt] {
                            ensure(h.schedule.qoe_sum <= opt.schedule.qoe_sum, || {
                                format!("{tag}: {} beats the optimum", h.algorithm)
                            })?;
                        }
                    }
                    None => {
                        sdt_vs_pdt_only += 1;
                        ensure(sdt.schedule.qoe_sum <= pdt.schedule.qoe_sum, || {
                            format!("{tag}: SDT {} > PDT {}", sdt.schedule.qoe_sum, pdt.schedule.qoe_sum)
                        })?;
                    }
                }

                let full = problem.full_cc_time();
                let grid_algos: &[Algorithm] = if exact.is_some() {
                    &[Algorithm::Dp, Algorithm::Sdt]
                } else {
                    &[Algorithm::Sdt]
                };
                for &algo in grid_algos {
                    let mut last = 0;
                    for step in 0..=24 {
                        let b = full * step as f64 / 20.0;
                        let q = algo.solve(&problem, b).map_err(|e| e.to_string())?.schedule.qoe_sum;
                        ensure(q >= last, || {
                            format!("{tag}: {algo} drops from {last} to {q} at T_lim={b}")
                        })?;
                        last = q;
                    }
                }
                instances += 1;
            }
        }
    }
    Ok(format!(
        "{instances} instances ({sdt_vs_pdt_only} without an exact reference)"
    ))
}

fn decodability() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut decoded = 0;
    for draw in 0..600 {
        let users = rng.random_range(2..=6);
        let gain = rng.random_range(1..users);
        let files = rng.random_range(1..=users + 1);
        let len = rng.random_range(1..=48);
        let lib = Library::random(files, users, gain, len, &mut rng).map_err(|e| e.to_string())?;
        let caches = place_caches(&lib).map_err(|e| e.to_string())?;
        let demands: Vec<usize> = if rng.random_bool(0.5) {
            default_demands(users, files)
        } else {
            (0..users).map(|_| rng.random_range(0..files)).collect()
        };
        let caps: Vec<f64> = (0..users).map(|_| rng.random_range(0.1..4.0)).collect();
        let caps = CapacityVector::new(caps).map_err(|e| e.to_string())?;
        let groups: Vec<Vec<usize>> = subsets(users, gain + 1).collect();
        let members = groups[rng.random_range(0..groups.len())].clone();
        let group = build_group(members.clone(), &caps, binomial(users, gain));
        let served = rng.random_range(1..=gain + 1);
        let cw = build_codeword(&group, served, &demands, &lib).map_err(|e| e.to_string())?;
        for &u in &group.order()[..served] {
            let d = decode(u, &cw, &caches[u], &demands).map_err(|e| e.to_string())?;
            let original = lib.get(d.file, d.subset).unwrap();
            ensure(d.payload == original, || {
                format!("draw {draw}: user {u} decoded wrong bytes")
            })?;
            decoded += 1;
        }
        let full = build_codeword(&group, gain + 1, &demands, &lib).map_err(|e| e.to_string())?;
        let want = full_codeword(&members, &demands, &by_subset(&lib), len);
        ensure(full.payload == want, || {
            format!("draw {draw}: full codeword differs from reference XOR")
        })?;
    }
    Ok(format!("600 draws, {decoded} descriptors recovered"))
}

fn moderate_scale() -> Check {
    let started = Instant::now();
    let config = ExperimentConfig {
        users: vec![16],
        gains: Some((1..=10).collect()),
        time_limit: 4.0,
        trials: 50,
        seed: 2024,
        solvers: vec!["sdt".into(), "pdt".into()],
        capacity: Default::default(),
        runtime_reps: 3,
    };
    let cmp = compare_solvers(&config, 1).map_err(|e| e.to_string())?;
    // dominance and feasibility on these instances too; no exact reference at this size
    for t in &cmp.trials {
        let (sdt, pdt) = (&t.outcomes[&Algorithm::Sdt], &t.outcomes[&Algorithm::Pdt]);
        ensure(sdt.qoe_sum <= pdt.qoe_sum, || {
            format!(
                "K=16 t={} trial {}: SDT {} > PDT {}",
                t.gain, t.trial, sdt.qoe_sum, pdt.qoe_sum
            )
        })?;
        ensure(sdt.total_time.max(pdt.total_time) <= t.time_limit + TIME_EPS, || {
            format!("K=16 t={} trial {}: over budget", t.gain, t.trial)
        })?;
    }
    let mut worst_ratio = f64::INFINITY;
    for agg in &cmp.aggregates {
        let (qp, qs) = (agg.mean_qoe[&Algorithm::Pdt], agg.mean_qoe[&Algorithm::Sdt]);
        let (wp, ws) = (agg.mean_wall_time[&Algorithm::Pdt], agg.mean_wall_time[&Algorithm::Sdt]);
        ensure(qp >= qs, || format!("t={}: mean qoe PDT {qp} < SDT {qs}", agg.gain))?;
        ensure(wp > ws, || {
            format!("t={}: mean wall time PDT {wp:e} <= SDT {ws:e}", agg.gain)
        })?;
        worst_ratio = worst_ratio.min(wp / ws);
    }
    within(started, Duration::from_secs(900), "K=16 sweep")?;
    Ok(format!(
        "t=1..10, min PDT/SDT runtime ratio {worst_ratio:.2}, in {:.1?}",
        started.elapsed()
    ))
}

fn saturation() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut exhaustive_runs = 0;
    for i in 0..50u64 {
        let users = rng.random_range(3..=8);
        let gain = rng.random_range(1..users);
        let (inst, _) = random_channel_instance(404, users, gain, i);
        let problem = inst.problem().map_err(|e| e.to_string())?;
        let full = problem.full_cc_time();
        let want = (gain as u64 + 1) * binomial(users, gain + 1);
        for algo in Algorithm::ALL {
            if algo == Algorithm::Exhaustive {
                if !exhaustive_fits(&problem) {
                    continue;
                }
                exhaustive_runs += 1;
            }
            let q = algo.solve(&problem, full).map_err(|e| e.to_string())?.schedule.qoe_sum;
            ensure(q == want, || {
                format!("K={users} t={gain}: {algo} gives {q}, expected {want}")
            })?;
        }
    }
    Ok(format!("50 instances, exhaustive on {exhaustive_runs}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 demo exactness", demo_exactness),
        ("2 baselines", baselines),
        ("3 oracle equivalence", oracle_equivalence),
        ("4 heuristic quality band", heuristic_quality),
        ("5 dominance and feasibility", dominance_and_feasibility),
        ("6 decodability", decodability),
        ("7 moderate-scale behavior", moderate_scale),
        ("8 saturation", saturation),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                println!("FAIL  {name}: {why}");
                failed += 1;
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
