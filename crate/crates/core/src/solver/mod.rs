//! Schedulers for the QoE-sum problem: pick `j_S ∈ [0, t+1]` per group to
//! maximize `Σ j_S` subject to `Σ T(S, j_S) <= T_lim`.
//!
//! The problem is a multiple-choice knapsack with one class per group. Two
//! exact solvers (plain recursion and a value-indexed dynamic program) serve
//! as mutual oracles; two greedy heuristics trade optimality for speed.

mod dp;
mod exhaustive;
mod greedy;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{invalid, Result};
use crate::model::{DeliveryProblem, Schedule};

pub use dp::{solve_dp, solve_dp_capped, DEFAULT_DP_CELL_CAP};
pub use exhaustive::{solve_exhaustive, solve_exhaustive_capped, DEFAULT_EXHAUSTIVE_CAP};
pub use greedy::{solve_pdt, solve_sdt, GreedyState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Exhaustive,
    Dp,
    Sdt,
    Pdt,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Exhaustive, Algorithm::Dp, Algorithm::Sdt, Algorithm::Pdt];

    pub fn is_exact(self) -> bool {
        matches!(self, Algorithm::Exhaustive | Algorithm::Dp)
    }

    pub fn solve(self, problem: &DeliveryProblem, time_limit: f64) -> Result<SolverReport> {
        match self {
            Algorithm::Exhaustive => solve_exhaustive(problem, time_limit),
            Algorithm::Dp => solve_dp(problem, time_limit),
            Algorithm::Sdt => solve_sdt(problem, time_limit),
            Algorithm::Pdt => solve_pdt(problem, time_limit),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Exhaustive => "exhaustive",
            Algorithm::Dp => "dp",
            Algorithm::Sdt => "sdt",
            Algorithm::Pdt => "pdt",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exhaustive" => Ok(Algorithm::Exhaustive),
            // "exact" picks the scalable exact solver
            "dp" | "exact" => Ok(Algorithm::Dp),
            "sdt" => Ok(Algorithm::Sdt),
            "pdt" => Ok(Algorithm::Pdt),
            other => Err(invalid(format!(
                "unknown algorithm `{other}` (expected exhaustive, dp, sdt or pdt)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub schedule: Schedule,
    pub algorithm: Algorithm,
    /// Seconds spent inside the solver.
    pub wall_time: f64,
    pub iterations: u64,
}

pub(crate) fn check_time_limit(time_limit: f64) -> Result<()> {
    if time_limit.is_nan() || time_limit < 0.0 {
        return Err(invalid(format!("time limit must be >= 0, got {time_limit}")));
    }
    Ok(())
}

pub(crate) fn finish(
    problem: &DeliveryProblem,
    algorithm: Algorithm,
    decisions: &[usize],
    started: Instant,
    iterations: u64,
) -> Result<SolverReport> {
    let wall_time = started.elapsed().as_secs_f64();
    Ok(SolverReport {
        schedule: problem.evaluate(decisions)?,
        algorithm,
        wall_time,
        iterations,
    })
}
