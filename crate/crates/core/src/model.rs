//! Network model: per-user link capacities, multicast groups with their
//! delivery-time ladders, schedule evaluation, and the two reference delivery
//! baselines (uncoded unicast and full coded caching).
//!
//! Users are 0-based indices internally. Everything user-facing (CSV, reports)
//! prints them 1-based.

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::subsets;

/// Absolute tolerance, in seconds, for every budget comparison.
pub const TIME_EPS: f64 = 1e-9;

/// Shannon capacity `log_base(1 + tx_power * |h|^2 / noise_power)` of a
/// single-antenna link with coefficient `h`.
pub fn capacity(h: Complex64, tx_power: f64, noise_power: f64, log_base: f64) -> Result<f64> {
    if !(tx_power > 0.0 && tx_power.is_finite()) {
        return Err(invalid(format!("transmit power must be positive, got {tx_power}")));
    }
    if !(noise_power > 0.0 && noise_power.is_finite()) {
        return Err(invalid(format!("noise power must be positive, got {noise_power}")));
    }
    check_log_base(log_base)?;
    let snr = tx_power * h.norm_sqr() / noise_power;
    Ok(snr.ln_1p() / log_base.ln())
}

fn check_log_base(log_base: f64) -> Result<()> {
    if !(log_base > 0.0 && log_base.is_finite()) || log_base == 1.0 {
        return Err(invalid(format!("log base must be positive and != 1, got {log_base}")));
    }
    Ok(())
}

/// Per-user achievable rate in data units per second.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityVector(Vec<f64>);

impl CapacityVector {
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        if let Some((k, c)) = rates.iter().enumerate().find(|(_, c)| !(c.is_finite() && **c >= 0.0)) {
            return Err(invalid(format!(
                "capacity of user {} must be finite and >= 0, got {c}",
                k + 1
            )));
        }
        Ok(Self(rates))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, user: usize) -> f64 {
        self.0[user]
    }
}

/// Where user capacities come from.
#[derive(Debug, Clone, PartialEq)]
pub enum CapacitySpec {
    /// Rates given directly.
    Direct(Vec<f64>),
    /// Rates derived from channel coefficients through [`capacity`].
    Channels {
        coefficients: Vec<Complex64>,
        tx_power: f64,
        noise_power: f64,
        log_base: f64,
    },
}

impl CapacitySpec {
    fn len(&self) -> usize {
        match self {
            CapacitySpec::Direct(c) => c.len(),
            CapacitySpec::Channels { coefficients, .. } => coefficients.len(),
        }
    }
}

/// Cache and library sizes, in files.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Memory {
    pub cache_files: f64,
    pub library_files: f64,
}

/// One delivery-phase problem: network size, caching gain, time budget and
/// link capacities.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    users: usize,
    gain: usize,
    time_limit: f64,
    capacity: CapacitySpec,
    memory: Option<Memory>,
}

impl Instance {
    pub fn new(
        users: usize,
        gain: usize,
        time_limit: f64,
        capacity: CapacitySpec,
        memory: Option<Memory>,
    ) -> Result<Self> {
        check_gain(users, gain)?;
        if time_limit.is_nan() || time_limit < 0.0 {
            return Err(invalid(format!("time limit must be >= 0, got {time_limit}")));
        }
        if capacity.len() != users {
            return Err(invalid(format!(
                "expected {users} capacities/channels, got {}",
                capacity.len()
            )));
        }
        if let Some(m) = memory {
            if m.library_files.is_nan() || m.library_files <= 0.0 || m.cache_files.is_nan() || m.cache_files < 0.0 {
                return Err(invalid("cache and library sizes must be positive"));
            }
            let implied = users as f64 * m.cache_files / m.library_files;
            if (implied - gain as f64).abs() > 1e-9 {
                return Err(invalid(format!(
                    "K*M/N = {implied} does not equal the caching gain t = {gain}"
                )));
            }
        }
        let instance = Self {
            users,
            gain,
            time_limit,
            capacity,
            memory,
        };
        // surfaces bad rates / channel parameters at construction time
        instance.capacities()?;
        Ok(instance)
    }

    /// Direct-capacity instance without cache/library sizes.
    pub fn with_capacities(gain: usize, time_limit: f64, capacities: Vec<f64>) -> Result<Self> {
        Self::new(
            capacities.len(),
            gain,
            time_limit,
            CapacitySpec::Direct(capacities),
            None,
        )
    }

    /// The five-user example network: `c_k = 1/(10k)`, `t = 2`, so a single
    /// descriptor reaches user `k` in `k` seconds.
    pub fn demo(time_limit: f64) -> Self {
        let caps = (1..=5).map(|k| 1.0 / (10.0 * k as f64)).collect();
        Self::with_capacities(2, time_limit, caps).expect("demo instance is valid")
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn gain(&self) -> usize {
        self.gain
    }

    pub fn time_limit(&self) -> f64 {
        self.time_limit
    }

    pub fn capacity_spec(&self) -> &CapacitySpec {
        &self.capacity
    }

    pub fn memory(&self) -> Option<Memory> {
        self.memory
    }

    pub fn with_time_limit(&self, time_limit: f64) -> Result<Self> {
        Self::new(self.users, self.gain, time_limit, self.capacity.clone(), self.memory)
    }

    /// Number of descriptors per file, `C(K, t)`.
    pub fn subpacketization(&self) -> u64 {
        subsets::binomial(self.users, self.gain)
    }

    pub fn capacities(&self) -> Result<CapacityVector> {
        match &self.capacity {
            CapacitySpec::Direct(c) => CapacityVector::new(c.clone()),
            CapacitySpec::Channels {
                coefficients,
                tx_power,
                noise_power,
                log_base,
            } => coefficients
                .iter()
                .map(|h| capacity(*h, *tx_power, *noise_power, *log_base))
                .collect::<Result<Vec<_>>>()
                .and_then(CapacityVector::new),
        }
    }

    /// All multicast groups in lexicographic member order, with ladders.
    pub fn problem(&self) -> Result<DeliveryProblem> {
        let caps = self.capacities()?;
        let p = self.subpacketization();
        let groups = enumerate_groups(self.users, self.gain)?
            .into_iter()
            .map(|m| build_group(m, &caps, p))
            .collect();
        Ok(DeliveryProblem {
            users: self.users,
            gain: self.gain,
            groups,
        })
    }
}

fn check_gain(users: usize, gain: usize) -> Result<()> {
    if gain < 1 || gain + 1 > users {
        return Err(invalid(format!(
            "caching gain t must satisfy 1 <= t <= K-1, got t={gain}, K={users}"
        )));
    }
    Ok(())
}

/// A `(t+1)`-user multicast group.
#[derive(Debug, Clone, PartialEq)]
pub struct MulticastGroup {
    members: Vec<usize>,
    order: Vec<usize>,
    rates: Vec<f64>,
    ladder: Vec<f64>,
}

impl MulticastGroup {
    /// Sorted member ids.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Members by descending capacity; `order()[i - 1]` is the rank-`i` user.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// `ladder()[j]` is the time to send the codeword serving the top `j`
    /// users; `ladder()[0] == 0`.
    pub fn ladder(&self) -> &[f64] {
        &self.ladder
    }

    pub fn time(&self, j: usize) -> f64 {
        self.ladder[j]
    }

    /// Transmission rate of the codeword serving the top `j >= 1` users, i.e.
    /// the capacity of the rank-`j` user.
    pub fn rate(&self, j: usize) -> f64 {
        self.rates[j - 1]
    }

    /// Largest decision value, `t + 1`.
    pub fn max_level(&self) -> usize {
        self.members.len()
    }

    /// 1-based rank of `user` in this group.
    pub fn rank_of(&self, user: usize) -> Option<usize> {
        self.order.iter().position(|&u| u == user).map(|i| i + 1)
    }

    /// Members rendered 1-based, e.g. `{1,2,3}`.
    pub fn label(&self) -> String {
        let ids: Vec<String> = self.members.iter().map(|u| (u + 1).to_string()).collect();
        format!("{{{}}}", ids.join(","))
    }
}

/// All `C(K, t+1)` member sets, lexicographic.
pub fn enumerate_groups(users: usize, gain: usize) -> Result<Vec<Vec<usize>>> {
    check_gain(users, gain)?;
    Ok(subsets::subsets(users, gain + 1).collect())
}

/// Sorts `members` by capacity (ties by ascending id) and builds the time
/// ladder `T(S, j) = (1/P) / c(S, j)`. A zero rate yields an infinite rung.
pub fn build_group(mut members: Vec<usize>, capacities: &CapacityVector, subpacketization: u64) -> MulticastGroup {
    members.sort_unstable();
    let mut order = members.clone();
    order.sort_by(|&a, &b| capacities.get(b).total_cmp(&capacities.get(a)).then(a.cmp(&b)));
    let rates: Vec<f64> = order.iter().map(|&u| capacities.get(u)).collect();
    let unit = 1.0 / subpacketization as f64;
    let ladder = std::iter::once(0.0)
        .chain(rates.iter().map(|&c| if c > 0.0 { unit / c } else { f64::INFINITY }))
        .collect();
    MulticastGroup {
        members,
        order,
        rates,
        ladder,
    }
}

/// Solver input: the groups of one instance plus its dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DeliveryProblem {
    pub users: usize,
    pub gain: usize,
    pub groups: Vec<MulticastGroup>,
}

impl DeliveryProblem {
    /// `(t+1) * C(K, t+1)`, the QoE of full coded-caching delivery.
    pub fn max_qoe(&self) -> u64 {
        self.groups.iter().map(|g| g.max_level() as u64).sum()
    }

    pub fn evaluate(&self, decisions: &[usize]) -> Result<Schedule> {
        evaluate_schedule(decisions, &self.groups, self.users, self.gain)
    }

    /// Σ_S T(S, t+1).
    pub fn full_cc_time(&self) -> f64 {
        self.groups.iter().map(|g| g.time(g.max_level())).sum()
    }
}

/// A decision `j_S` per group plus its time and QoE accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    /// Indexed like the problem's group list.
    pub decisions: Vec<usize>,
    pub total_time: f64,
    pub qoe_sum: u64,
    pub qoe_per_user: Vec<u64>,
}

impl Schedule {
    pub fn fits(&self, time_limit: f64) -> bool {
        self.total_time <= time_limit + TIME_EPS
    }
}

/// Totals time and QoE for `decisions`. The budget is not checked.
pub fn evaluate_schedule(
    decisions: &[usize],
    groups: &[MulticastGroup],
    users: usize,
    gain: usize,
) -> Result<Schedule> {
    if decisions.len() != groups.len() {
        return Err(invalid(format!(
            "{} decisions for {} groups",
            decisions.len(),
            groups.len()
        )));
    }
    let mut total_time = 0.0;
    let mut qoe_sum = 0;
    let mut qoe_per_user = vec![0u64; users];
    for (g, &j) in groups.iter().zip(decisions) {
        if j > gain + 1 || j > g.max_level() {
            return Err(invalid(format!(
                "decision {j} for group {} exceeds t+1 = {}",
                g.label(),
                gain + 1
            )));
        }
        if j > 0 {
            total_time += g.time(j);
        }
        qoe_sum += j as u64;
        for &u in &g.order()[..j] {
            qoe_per_user[u] += 1;
        }
    }
    Ok(Schedule {
        decisions: decisions.to_vec(),
        total_time,
        qoe_sum,
        qoe_per_user,
    })
}

/// Total time of classic coded-caching delivery: every group at `j = t+1`.
pub fn full_cc_time(instance: &Instance) -> Result<f64> {
    Ok(instance.problem()?.full_cc_time())
}

/// Total time of uncoded unicast delivery: each user fetches its `C(K-1, t)`
/// missing descriptors at its own rate.
pub fn uncoded_time(instance: &Instance) -> Result<f64> {
    let caps = instance.capacities()?;
    let missing = subsets::binomial(instance.users() - 1, instance.gain()) as f64;
    let unit = 1.0 / instance.subpacketization() as f64;
    Ok(caps
        .as_slice()
        .iter()
        .map(|&c| if c > 0.0 { missing * unit / c } else { f64::INFINITY })
        .sum())
}
