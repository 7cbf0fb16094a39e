//! Greedy schedulers.
//!
//! SDT repeatedly takes the single-descriptor step (`j_S -> j_S + 1`) with the
//! smallest time increase and stops at the first step that does not fit.
//!
//! PDT considers every jump `j_S -> j'` and takes the feasible one with the
//! smallest time increase per new descriptor, `(T(S,j') - T(S,j_S)) / (j' - j_S)`,
//! until no feasible jump is left.
//!
//! Both pick candidates from a min-heap. Ties go to the lexicographically
//! smaller group, then (PDT) the smaller target level. Infinite rungs (zero
//! capacity) are never selected.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::time::Instant;

use super::{check_time_limit, finish, Algorithm, SolverReport};
use crate::error::Result;
use crate::model::{DeliveryProblem, TIME_EPS};

/// Progress of a greedy run.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyState {
    /// Current `j_S` per group.
    pub alpha: Vec<usize>,
    pub time_limit: f64,
    /// Σ_S T(S, alpha[S]), accumulated step by step.
    pub spent: f64,
    /// Σ_S alpha[S].
    pub accumulated_qoe: u64,
}

impl GreedyState {
    fn new(groups: usize, time_limit: f64) -> Self {
        Self {
            alpha: vec![0; groups],
            time_limit,
            spent: 0.0,
            accumulated_qoe: 0,
        }
    }

    pub fn remaining_budget(&self) -> f64 {
        (self.time_limit - self.spent).max(0.0)
    }

    fn affords(&self, cost: f64) -> bool {
        cost.is_finite() && self.spent + cost <= self.time_limit + TIME_EPS
    }

    fn apply(&mut self, group: usize, level: usize, cost: f64) {
        self.accumulated_qoe += (level - self.alpha[group]) as u64;
        self.alpha[group] = level;
        self.spent += cost;
    }
}

/// Total order on f64 for heap keys; inputs are never NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

pub fn solve_sdt(problem: &DeliveryProblem, time_limit: f64) -> Result<SolverReport> {
    check_time_limit(time_limit)?;
    let started = Instant::now();
    let groups = &problem.groups;
    let mut state = GreedyState::new(groups.len(), time_limit);
    let step_cost = |g: usize, from: usize| groups[g].time(from + 1) - groups[g].time(from);

    let mut heap: BinaryHeap<Reverse<(Key, usize)>> = groups
        .iter()
        .enumerate()
        .filter(|(_, grp)| grp.time(1).is_finite())
        .map(|(g, _)| Reverse((Key(step_cost(g, 0)), g)))
        .collect();

    let mut steps = 0u64;
    while let Some(Reverse((Key(cost), g))) = heap.pop() {
        if !state.affords(cost) {
            break;
        }
        let level = state.alpha[g] + 1;
        state.apply(g, level, cost);
        steps += 1;
        if level < groups[g].max_level() {
            let next = step_cost(g, level);
            if next.is_finite() {
                heap.push(Reverse((Key(next), g)));
            }
        }
    }
    debug_assert_eq!(
        state.accumulated_qoe,
        state.alpha.iter().map(|&a| a as u64).sum::<u64>()
    );
    finish(problem, Algorithm::Sdt, &state.alpha, started, steps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Action {
    ratio: Key,
    group: usize,
    level: usize,
    // alpha[group] when the action was priced; stale once it changes
    from: usize,
}

pub fn solve_pdt(problem: &DeliveryProblem, time_limit: f64) -> Result<SolverReport> {
    check_time_limit(time_limit)?;
    let started = Instant::now();
    let groups = &problem.groups;
    let mut state = GreedyState::new(groups.len(), time_limit);
    let mut heap: BinaryHeap<Reverse<Action>> = BinaryHeap::new();

    let push_actions = |heap: &mut BinaryHeap<Reverse<Action>>, state: &GreedyState, g: usize| {
        let group = &groups[g];
        let from = state.alpha[g];
        let base = group.time(from);
        for level in from + 1..=group.max_level() {
            let cost = group.time(level) - base;
            // the remaining budget only shrinks, so an unaffordable jump stays so
            if !state.affords(cost) {
                break;
            }
            heap.push(Reverse(Action {
                ratio: Key(cost / (level - from) as f64),
                group: g,
                level,
                from,
            }));
        }
    };

    for g in 0..groups.len() {
        push_actions(&mut heap, &state, g);
    }

    let mut steps = 0u64;
    while let Some(Reverse(action)) = heap.pop() {
        let g = action.group;
        if state.alpha[g] != action.from {
            continue;
        }
        let cost = groups[g].time(action.level) - groups[g].time(action.from);
        if !state.affords(cost) {
            continue;
        }
        state.apply(g, action.level, cost);
        steps += 1;
        push_actions(&mut heap, &state, g);
    }
    debug_assert_eq!(
        state.accumulated_qoe,
        state.alpha.iter().map(|&a| a as u64).sum::<u64>()
    );
    finish(problem, Algorithm::Pdt, &state.alpha, started, steps)
}
