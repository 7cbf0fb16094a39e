use std::time::Instant;

use super::{check_time_limit, finish, Algorithm, SolverReport};
use crate::error::{Error, Result};
use crate::model::{DeliveryProblem, MulticastGroup, TIME_EPS};

/// Largest `(t+2)^γ` search space accepted by default.
pub const DEFAULT_EXHAUSTIVE_CAP: f64 = 1e8;

pub fn solve_exhaustive(problem: &DeliveryProblem, time_limit: f64) -> Result<SolverReport> {
    solve_exhaustive_capped(problem, time_limit, DEFAULT_EXHAUSTIVE_CAP)
}

/// Full enumeration of the `(t+2)^γ` decision vectors by recursion over the
/// groups, with no memoization. Only branches that fit the remaining budget
/// are explored; among equally good choices for a group the smallest `j`
/// wins.
pub fn solve_exhaustive_capped(problem: &DeliveryProblem, time_limit: f64, cap: f64) -> Result<SolverReport> {
    check_time_limit(time_limit)?;
    let groups = &problem.groups;
    let space = groups.len() as f64 * ((problem.gain + 2) as f64).ln();
    if space > cap.ln() {
        return Err(Error::TooLargeForExact {
            solver: "exhaustive",
            detail: format!("(t+2)^γ = {}^{} exceeds {cap:e}", problem.gain + 2, groups.len()),
        });
    }
    let started = Instant::now();
    let n = groups.len();
    let mut search = Search {
        groups,
        time_limit,
        calls: 0,
        n,
        rows: vec![0; n * n],
    };
    search.best(0, 0.0);
    let decisions = search.rows[..n].to_vec();
    finish(problem, Algorithm::Exhaustive, &decisions, started, search.calls)
}

struct Search<'a> {
    groups: &'a [MulticastGroup],
    time_limit: f64,
    calls: u64,
    n: usize,
    // row d holds the best decisions for groups d.. found by the call at depth d
    rows: Vec<usize>,
}

impl Search<'_> {
    fn fits(&self, spent: f64, extra: f64) -> bool {
        extra.is_finite() && spent + extra <= self.time_limit + TIME_EPS
    }

    fn best(&mut self, depth: usize, spent: f64) -> u64 {
        self.calls += 1;
        let group = &self.groups[depth];
        let n = self.n;
        if depth + 1 == n {
            let level = (1..=group.max_level())
                .rev()
                .find(|&i| self.fits(spent, group.time(i)))
                .unwrap_or(0);
            self.rows[depth * n + depth] = level;
            return level as u64;
        }
        let mut best_value = 0;
        let mut best_level = None;
        for i in 0..=group.max_level() {
            let t = group.time(i);
            // the ladder is nondecreasing, so no larger level fits either
            if !self.fits(spent, t) {
                break;
            }
            let value = i as u64 + self.best(depth + 1, spent + t);
            if best_level.is_none() || value > best_value {
                best_value = value;
                best_level = Some(i);
                let (head, tail) = self.rows.split_at_mut((depth + 1) * n);
                head[depth * n + depth + 1..(depth + 1) * n].copy_from_slice(&tail[depth + 1..n]);
            }
        }
        self.rows[depth * n + depth] = best_level.unwrap_or(0);
        best_value
    }
}
