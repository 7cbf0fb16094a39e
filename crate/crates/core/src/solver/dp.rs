use std::time::Instant;

use super::{check_time_limit, finish, Algorithm, SolverReport};
use crate::error::{Error, Result};
use crate::model::{DeliveryProblem, TIME_EPS};

/// Default bound on `γ * (V + 1)` back-trace cells (one byte each).
pub const DEFAULT_DP_CELL_CAP: u64 = 1 << 28;

pub fn solve_dp(problem: &DeliveryProblem, time_limit: f64) -> Result<SolverReport> {
    solve_dp_capped(problem, time_limit, DEFAULT_DP_CELL_CAP)
}

/// Exact solver over the value dimension: `best[v]` is the least total time
/// with `Σ j_S = v` over the groups processed so far. Each group is one
/// multiple-choice class whose items are its ladder levels.
pub fn solve_dp_capped(problem: &DeliveryProblem, time_limit: f64, cell_cap: u64) -> Result<SolverReport> {
    check_time_limit(time_limit)?;
    let groups = &problem.groups;
    let max_value = problem.max_qoe() as usize;
    let cells = groups.len() as u64 * (max_value as u64 + 1);
    if cells > cell_cap || problem.gain + 1 > u8::MAX as usize {
        return Err(Error::TooLargeForExact {
            solver: "dp",
            detail: format!("{cells} back-trace cells exceed {cell_cap}"),
        });
    }
    let started = Instant::now();
    let width = max_value + 1;
    let mut best = vec![f64::INFINITY; width];
    best[0] = 0.0;
    let mut next = vec![f64::INFINITY; width];
    let mut choice = vec![0u8; groups.len() * width];
    let mut reach = 0;
    let mut iterations = 0u64;

    for (g, group) in groups.iter().enumerate() {
        let levels = group.max_level();
        let row = &mut choice[g * width..(g + 1) * width];
        next[..=reach + levels].fill(f64::INFINITY);
        for v in 0..=reach {
            let base = best[v];
            if base.is_infinite() {
                continue;
            }
            for j in 0..=levels {
                let t = group.time(j);
                if t.is_infinite() {
                    break;
                }
                iterations += 1;
                let candidate = base + t;
                if candidate < next[v + j] {
                    next[v + j] = candidate;
                    row[v + j] = j as u8;
                }
            }
        }
        reach += levels;
        std::mem::swap(&mut best, &mut next);
    }

    let target = (0..=reach)
        .rev()
        .find(|&v| best[v] <= time_limit + TIME_EPS)
        .unwrap_or(0);
    let mut decisions = vec![0; groups.len()];
    let mut v = target;
    for g in (0..groups.len()).rev() {
        let j = choice[g * width + v] as usize;
        decisions[g] = j;
        v -= j;
    }
    debug_assert_eq!(v, 0);
    finish(problem, Algorithm::Dp, &decisions, started, iterations)
}
