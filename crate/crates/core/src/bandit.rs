//! Black-box bandit subroutines fed with the shifted history.
//!
//! A policy only ever sees the [`ShiftedHistory`] and a fresh uniform draw
//! `u_t`; it keeps its own sufficient statistics and refreshes them from the
//! records it has not consumed yet.

use serde::{Deserialize, Serialize};

use crate::env::{benchmark_mu, MabInstance};
use crate::error::{Error, Result};

/// One round seen by the subroutine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryRecord {
    pub round: usize,
    pub arm: usize,
    pub u: f64,
    pub reward: f64,
}

/// Append-only log of (recommended arm, uniform draw, shifted reward).
#[derive(Debug, Clone, Default)]
pub struct ShiftedHistory {
    k: usize,
    records: Vec<HistoryRecord>,
}

impl ShiftedHistory {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            records: Vec::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[HistoryRecord] {
        &self.records
    }

    pub fn push(&mut self, rec: HistoryRecord) -> Result<()> {
        if rec.arm >= self.k {
            return Err(Error::Input(format!("arm {} out of range for K = {}", rec.arm, self.k)));
        }
        if let Some(last) = self.records.last() {
            if rec.round <= last.round {
                return Err(Error::Input(format!(
                    "round {} does not follow round {}",
                    rec.round, last.round
                )));
            }
        }
        self.records.push(rec);
        Ok(())
    }
}

/// `Alg: (u_t, H_{t-1}) -> arm`.
pub trait BanditPolicy {
    fn name(&self) -> String;
    fn next(&mut self, history: &ShiftedHistory, u: f64) -> usize;
}

/// Which subroutine IPA runs in its second phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Subroutine {
    Ucb,
    EpsGreedy { m: f64, alpha: f64 },
}

impl Subroutine {
    pub fn build(&self, k: usize, horizon: u64) -> Box<dyn BanditPolicy + Send> {
        match *self {
            Subroutine::Ucb => Box::new(Ucb::new(k, horizon)),
            Subroutine::EpsGreedy { m, alpha } => Box::new(EpsGreedy::new(k, m, alpha)),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Subroutine::Ucb => "ucb",
            Subroutine::EpsGreedy { .. } => "eps-greedy",
        }
    }
}

/// Running count and mean per arm.
#[derive(Debug, Clone)]
struct ArmStats {
    counts: Vec<u64>,
    means: Vec<f64>,
    seen: usize,
}

impl ArmStats {
    fn new(k: usize) -> Self {
        Self {
            counts: vec![0; k],
            means: vec![0.0; k],
            seen: 0,
        }
    }

    fn sync(&mut self, history: &ShiftedHistory) {
        for rec in &history.records()[self.seen..] {
            let n = &mut self.counts[rec.arm];
            *n += 1;
            self.means[rec.arm] += (rec.reward - self.means[rec.arm]) / *n as f64;
        }
        self.seen = history.len();
    }
}

fn argmax_first(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, v) in values.enumerate() {
        if v > best_v {
            best = i;
            best_v = v;
        }
    }
    best
}

/// Fixed-horizon UCB: each arm once, then `argmax mean_a + 2 sqrt(ln T / n_a)`.
/// The log is natural.
#[derive(Debug, Clone)]
pub struct Ucb {
    horizon: u64,
    stats: ArmStats,
}

impl Ucb {
    pub fn new(k: usize, horizon: u64) -> Self {
        assert!(k > 0, "need at least one arm");
        Self {
            horizon,
            stats: ArmStats::new(k),
        }
    }

    pub fn bonus(&self, pulls: u64) -> f64 {
        2.0 * ((self.horizon as f64).ln() / pulls as f64).sqrt()
    }

    pub fn index(&self, arm: usize) -> f64 {
        self.stats.means[arm] + self.bonus(self.stats.counts[arm])
    }
}

impl BanditPolicy for Ucb {
    fn name(&self) -> String {
        "ucb".into()
    }

    fn next(&mut self, history: &ShiftedHistory, _u: f64) -> usize {
        self.stats.sync(history);
        let k = self.stats.counts.len();
        let t = history.len() + 1;
        if t <= k {
            return t - 1;
        }
        argmax_first((0..k).map(|a| self.index(a)))
    }
}

/// Decaying epsilon-greedy: explore with probability `min(1, m K / (alpha t))`.
///
/// The single uniform draw decides both whether to explore and which arm.
#[derive(Debug, Clone)]
pub struct EpsGreedy {
    m: f64,
    alpha: f64,
    stats: ArmStats,
    last_explored: bool,
}

impl EpsGreedy {
    pub fn new(k: usize, m: f64, alpha: f64) -> Self {
        assert!(k > 0, "need at least one arm");
        assert!(m >= 1.0 && alpha > 0.0, "need m >= 1 and alpha > 0");
        Self {
            m,
            alpha,
            stats: ArmStats::new(k),
            last_explored: false,
        }
    }

    pub fn exploration_probability(&self, t: usize) -> f64 {
        let k = self.stats.counts.len() as f64;
        (self.m * k / (self.alpha * t as f64)).min(1.0)
    }

    pub fn last_explored(&self) -> bool {
        self.last_explored
    }

    /// Uses `u` to pick an arm at round `t`; records whether it explored.
    pub fn decide(&mut self, t: usize, u: f64) -> usize {
        let k = self.stats.counts.len();
        let p = self.exploration_probability(t);
        if u < p {
            self.last_explored = true;
            ((u / p * k as f64) as usize).min(k - 1)
        } else {
            self.last_explored = false;
            argmax_first(self.stats.means.iter().copied())
        }
    }

    pub fn observe(&mut self, arm: usize, reward: f64) {
        let n = &mut self.stats.counts[arm];
        *n += 1;
        self.stats.means[arm] += (reward - self.stats.means[arm]) / *n as f64;
    }
}

impl BanditPolicy for EpsGreedy {
    fn name(&self) -> String {
        "eps-greedy".into()
    }

    fn next(&mut self, history: &ShiftedHistory, u: f64) -> usize {
        self.stats.sync(history);
        self.decide(history.len() + 1, u)
    }
}

/// `Delta*_a = max_a' (theta + s)_a' - (theta_a + s_a)`.
pub fn reward_gaps(inst: &MabInstance) -> Vec<f64> {
    let b = benchmark_mu(inst);
    b.mu.iter().map(|m| b.mu_star - m).collect()
}

/// Regret bound of IPA run with UCB. `log T` in the last term is natural,
/// `log2 T` is explicit.
pub fn corollary1_bound(inst: &MabInstance, horizon: u64) -> Result<f64> {
    if horizon < 2 {
        return Err(Error::Input(format!("horizon must be >= 2, got {horizon}")));
    }
    let t = horizon as f64;
    let k = inst.k() as f64;
    let gaps = reward_gaps(inst);
    let positive: Vec<f64> = gaps.into_iter().filter(|g| *g > 0.0).collect();
    let gap_sum: f64 = positive.iter().sum();
    let worst_case = (t * k * t.ln()).sqrt();
    let instance_dependent: f64 = positive.iter().map(|g| 4.0 * t.ln() / g).sum();
    Ok(3.0
        + 3.0 * gap_sum
        + (1.0 + inst.theta_range()) * (1.0 + 9.0 * k * t.log2())
        + 8.0 * worst_case.min(instance_dependent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::NoiseLaw;
    use proptest::prelude::*;

    fn feed(history: &mut ShiftedHistory, arm: usize, reward: f64) {
        let round = history.len() + 1;
        history.push(HistoryRecord { round, arm, u: 0.5, reward }).unwrap();
    }

    #[test]
    fn ucb_initialisation_pulls_in_order() {
        let mut ucb = Ucb::new(5, 10_000);
        let mut h = ShiftedHistory::new(5);
        for expected in 0..5 {
            let arm = ucb.next(&h, 0.3);
            assert_eq!(arm, expected);
            feed(&mut h, arm, 0.0);
        }
    }

    #[test]
    fn ucb_bonus_value() {
        let ucb = Ucb::new(5, 10_000);
        assert!((ucb.bonus(1) - 6.069).abs() < 1e-3, "{}", ucb.bonus(1));
    }

    #[test]
    fn ucb_identical_statistics_pick_first() {
        let mut ucb = Ucb::new(2, 100);
        let mut h = ShiftedHistory::new(2);
        feed(&mut h, 0, 0.4);
        feed(&mut h, 1, 0.4);
        assert_eq!(ucb.next(&h, 0.9), 0);
    }

    #[test]
    fn eps_greedy_probabilities() {
        let eg = EpsGreedy::new(5, 500.0, 1.0);
        assert_eq!(eg.exploration_probability(1), 1.0);
        assert_eq!(eg.exploration_probability(2500), 1.0);
        assert!((eg.exploration_probability(5000) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn eps_greedy_exploits_dominant_arm() {
        let mut eg = EpsGreedy::new(3, 1.0, 1.0);
        let mut h = ShiftedHistory::new(3);
        feed(&mut h, 0, 0.1);
        feed(&mut h, 1, 0.9);
        feed(&mut h, 2, 0.2);
        // t = 4, p = 3/4: u above p exploits
        assert_eq!(eg.next(&h, 0.99), 1);
        assert!(!eg.last_explored());
        assert_eq!(eg.next(&h, 0.0), 0);
        assert!(eg.last_explored());
    }

    #[test]
    fn history_rejects_bad_records() {
        let mut h = ShiftedHistory::new(2);
        assert!(h.push(HistoryRecord { round: 3, arm: 2, u: 0.0, reward: 0.0 }).is_err());
        h.push(HistoryRecord { round: 3, arm: 1, u: 0.0, reward: 0.0 }).unwrap();
        assert!(h.push(HistoryRecord { round: 3, arm: 0, u: 0.0, reward: 0.0 }).is_err());
    }

    #[test]
    fn table3_gaps() {
        let gaps = reward_gaps(&MabInstance::table3());
        let expected = [0.67, 0.38, 0.0, 0.93, 0.37];
        for (g, e) in gaps.iter().zip(expected) {
            assert!((g - e).abs() < 1e-12, "{g} vs {e}");
        }
    }

    #[test]
    fn single_arm_bound() {
        let inst = MabInstance::new(vec![0.3], vec![0.7], NoiseLaw::default()).unwrap();
        let t = 1000u64;
        let b = corollary1_bound(&inst, t).unwrap();
        let expected = 3.0 + (1.0 + 9.0 * (t as f64).log2());
        assert!((b - expected).abs() < 1e-9);
        assert!(corollary1_bound(&inst, 1).is_err());
    }

    #[test]
    fn table3_bound_value() {
        // 3 + 3*2.35 + 1.81*(1 + 45 log2 1e4) + 8*min(sqrt(5e4 ln 1e4), sum 4 ln 1e4 / gap)
        let t = 10_000f64;
        let sum_inv: f64 = [0.67, 0.38, 0.93, 0.37].iter().map(|g| 4.0 * t.ln() / g).sum();
        let expected = 3.0
            + 3.0 * 2.35
            + 1.81 * (1.0 + 45.0 * t.log2())
            + 8.0 * (5.0 * t * t.ln()).sqrt().min(sum_inv);
        let b = corollary1_bound(&MabInstance::table3(), 10_000).unwrap();
        assert!((b - expected).abs() < 1e-6, "{b} vs {expected}");
    }

    fn replay(policy: &mut dyn BanditPolicy, rewards: &[(usize, f64)], shift: f64, k: usize) -> Vec<usize> {
        let mut h = ShiftedHistory::new(k);
        let mut out = Vec::new();
        for (i, &(arm, r)) in rewards.iter().enumerate() {
            let u = (i as f64 * 0.6180339887).fract();
            out.push(policy.next(&h, u));
            h.push(HistoryRecord { round: i + 1, arm, u, reward: r + shift }).unwrap();
        }
        out
    }

    proptest! {
        #[test]
        fn ucb_decisions_invariant_under_common_shift(
            rewards in prop::collection::vec((0usize..4, -1.0f64..1.0), 1..200),
            shift in -3.0f64..3.0,
        ) {
            let a = replay(&mut Ucb::new(4, 1000), &rewards, 0.0, 4);
            let b = replay(&mut Ucb::new(4, 1000), &rewards, shift, 4);
            let mismatches = a.iter().zip(&b).filter(|(x, y)| x != y).count();
            prop_assert!(mismatches == 0, "{} mismatches", mismatches);
        }

        #[test]
        fn policies_are_deterministic(
            rewards in prop::collection::vec((0usize..3, -1.0f64..1.0), 1..100),
        ) {
            let a = replay(&mut EpsGreedy::new(3, 2.0, 1.0), &rewards, 0.0, 3);
            let b = replay(&mut EpsGreedy::new(3, 2.0, 1.0), &rewards, 0.0, 3);
            prop_assert_eq!(a, b);
            let a = replay(&mut Ucb::new(3, 50), &rewards, 0.0, 3);
            let b = replay(&mut Ucb::new(3, 50), &rewards, 0.0, 3);
            prop_assert_eq!(a, b);
        }
    }
}
