//! Test-only oracles, kept independent of the solver implementations.
#![allow(dead_code)]

use std::collections::HashMap;

use cc_qoe::codec::Library;
use cc_qoe::harness::{random_instance, trial_rng, CapacityMode};
use cc_qoe::model::{DeliveryProblem, Instance, TIME_EPS};
use cc_qoe::subsets::subsets;
use rand::Rng;

/// Best `Σ j` over every decision vector in `[0, L]^γ`, by mixed-radix
/// counting. Ladders are plain nested vectors so nothing from the solver is
/// reused.
pub fn brute_force(ladders: &[Vec<f64>], time_limit: f64) -> u64 {
    let mut digits = vec![0usize; ladders.len()];
    let mut best = 0;
    loop {
        let time: f64 = digits.iter().zip(ladders).map(|(&j, l)| l[j]).sum();
        if time <= time_limit + TIME_EPS {
            best = best.max(digits.iter().sum::<usize>() as u64);
        }
        let mut i = 0;
        loop {
            if i == digits.len() {
                return best;
            }
            digits[i] += 1;
            if digits[i] < ladders[i].len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

pub fn ladders(problem: &DeliveryProblem) -> Vec<Vec<f64>> {
    problem.groups.iter().map(|g| g.ladder().to_vec()).collect()
}

/// The five-user example's ladders from first principles: a descriptor for
/// user k takes k seconds, and a codeword runs at its slowest served user.
pub fn demo_ladders_by_hand() -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for a in 1..=5 {
        for b in a + 1..=5 {
            for c in b + 1..=5 {
                out.push(vec![0.0, a as f64, b as f64, c as f64]);
            }
        }
    }
    out
}

/// SDT by full re-scan each iteration.
pub fn sdt_rescan(problem: &DeliveryProblem, time_limit: f64) -> Vec<usize> {
    let groups = &problem.groups;
    let mut alpha = vec![0usize; groups.len()];
    let mut spent = 0.0;
    loop {
        let mut pick: Option<(f64, usize)> = None;
        for (g, grp) in groups.iter().enumerate() {
            if alpha[g] == grp.max_level() {
                continue;
            }
            let cost = grp.time(alpha[g] + 1) - grp.time(alpha[g]);
            if !cost.is_finite() {
                continue;
            }
            if pick.is_none_or(|(c, _)| cost < c) {
                pick = Some((cost, g));
            }
        }
        match pick {
            Some((cost, g)) if spent + cost <= time_limit + TIME_EPS => {
                alpha[g] += 1;
                spent += cost;
            }
            _ => return alpha,
        }
    }
}

/// PDT by full re-scan of every (group, target level) action.
pub fn pdt_rescan(problem: &DeliveryProblem, time_limit: f64) -> Vec<usize> {
    let groups = &problem.groups;
    let mut alpha = vec![0usize; groups.len()];
    let mut spent = 0.0;
    loop {
        let mut pick: Option<(f64, usize, usize, f64)> = None;
        for (g, grp) in groups.iter().enumerate() {
            for level in alpha[g] + 1..=grp.max_level() {
                let cost = grp.time(level) - grp.time(alpha[g]);
                if !(cost.is_finite() && spent + cost <= time_limit + TIME_EPS) {
                    continue;
                }
                let ratio = cost / (level - alpha[g]) as f64;
                if pick.is_none_or(|(r, ..)| ratio < r) {
                    pick = Some((ratio, g, level, cost));
                }
            }
        }
        match pick {
            Some((_, g, level, cost)) => {
                alpha[g] = level;
                spent += cost;
            }
            None => return alpha,
        }
    }
}

/// Normalized-Gaussian-channel instance at 10 dB with a budget drawn
/// uniformly from `[0, 1.2 * full coded-caching time]`.
pub fn random_channel_instance(seed: u64, users: usize, gain: usize, trial: u64) -> (Instance, f64) {
    let mut rng = trial_rng(seed, users, gain, trial);
    let inst = random_instance(users, gain, 0.0, &CapacityMode::default(), &mut rng).unwrap();
    let full = inst.problem().unwrap().full_cc_time();
    let budget = rng.random_range(0.0..=1.2 * full);
    (inst, budget)
}

/// `W_T(file)` keyed by the subset itself, built from enumeration order
/// rather than the ranking function.
pub fn by_subset(lib: &Library) -> HashMap<(usize, Vec<usize>), Vec<u8>> {
    let mut out = HashMap::new();
    for file in 0..lib.files() {
        for (id, subset) in subsets(lib.users(), lib.gain()).enumerate() {
            out.insert((file, subset), lib.get(file, id).unwrap().to_vec());
        }
    }
    out
}

/// Classic coded-caching codeword: XOR over every member k of
/// `W_{S \ {k}}(demand of k)`.
pub fn full_codeword(
    members: &[usize],
    demands: &[usize],
    table: &HashMap<(usize, Vec<usize>), Vec<u8>>,
    len: usize,
) -> Vec<u8> {
    let mut out = vec![0u8; len];
    for &k in members {
        let rest: Vec<usize> = members.iter().copied().filter(|&u| u != k).collect();
        for (o, b) in out.iter_mut().zip(&table[&(demands[k], rest)]) {
            *o ^= b;
        }
    }
    out
}
