//! IPA: binary search of every arm's optimal incentive, then black-box bandit
//! play on the shifted instance.

use std::io::{self, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bandit::{BanditPolicy, HistoryRecord, ShiftedHistory};
use crate::binsearch::{binary_search_arm, estimate_incentive, search_steps, IncentiveBracket};
use crate::env::{agent_choice_mab, benchmark_mu, MabInstance, Offer, TieBreak};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, REWARD_STREAM, SUBROUTINE_STREAM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Search,
    Bandit,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Search => "search",
            Phase::Bandit => "bandit",
        }
    }
}

/// One round of the multi-armed game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MabRound {
    pub t: usize,
    pub phase: Phase,
    pub offer: Offer,
    pub chosen: usize,
    pub reward: f64,
    pub paid: f64,
    pub recommendation: Option<usize>,
}

/// Per-round log of a run plus the incentive estimates it produced.
#[derive(Debug, Clone)]
pub struct MabTrajectory {
    instance: MabInstance,
    pub horizon: u64,
    pub rounds: Vec<MabRound>,
    pub brackets: Vec<IncentiveBracket>,
    pub estimates: Vec<f64>,
}

impl MabTrajectory {
    pub fn new(instance: MabInstance, horizon: u64) -> Self {
        Self {
            instance,
            horizon,
            rounds: Vec::with_capacity(horizon as usize),
            brackets: Vec::new(),
            estimates: Vec::new(),
        }
    }

    pub fn instance(&self) -> &MabInstance {
        &self.instance
    }

    /// Appends a round, deriving `paid` from the offer and the agent's choice.
    pub fn record(
        &mut self,
        phase: Phase,
        offer: Offer,
        chosen: usize,
        reward: f64,
        recommendation: Option<usize>,
    ) {
        let t = self.rounds.len() + 1;
        self.rounds.push(MabRound {
            t,
            phase,
            offer,
            chosen,
            reward,
            paid: offer.paid_for(chosen),
            recommendation,
        });
    }

    pub fn search_rounds(&self) -> usize {
        self.rounds.iter().filter(|r| r.phase == Phase::Search).count()
    }

    /// Bandit-phase rounds where the agent did not follow the recommendation.
    pub fn noncompliant_rounds(&self) -> usize {
        self.rounds
            .iter()
            .filter(|r| r.phase == Phase::Bandit)
            .filter(|r| r.recommendation.is_some_and(|a| a != r.chosen))
            .count()
    }

    fn increments(&self, inst: &MabInstance) -> Result<Vec<f64>> {
        if inst != &self.instance {
            return Err(Error::Input(
                "trajectory was produced on a different instance".into(),
            ));
        }
        let mu_star = benchmark_mu(inst).mu_star;
        Ok(self
            .rounds
            .iter()
            .map(|r| mu_star - (inst.theta()[r.chosen] - r.paid))
            .collect())
    }

    pub fn search_regret(&self, inst: &MabInstance) -> Result<f64> {
        let inc = self.increments(inst)?;
        Ok(self
            .rounds
            .iter()
            .zip(inc)
            .filter(|(r, _)| r.phase == Phase::Search)
            .map(|(_, x)| x)
            .sum())
    }

    pub fn bandit_regret(&self, inst: &MabInstance) -> Result<f64> {
        let inc = self.increments(inst)?;
        Ok(self
            .rounds
            .iter()
            .zip(inc)
            .filter(|(r, _)| r.phase == Phase::Bandit)
            .map(|(_, x)| x)
            .sum())
    }

    /// Cumulative regret using noisy rewards instead of their means.
    pub fn realized_regret_curve(&self) -> Vec<f64> {
        let mu_star = benchmark_mu(&self.instance).mu_star;
        let mut acc = 0.0;
        self.rounds
            .iter()
            .map(|r| {
                acc += mu_star - (r.reward - r.paid);
                acc
            })
            .collect()
    }

    /// `t, phase, offer_arm, offer_amount, chosen_arm, reward, paid, cum_regret`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let curve = regret_curve(self, &self.instance)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
        writeln!(w, "t,phase,offer_arm,offer_amount,chosen_arm,reward,paid,cum_regret")?;
        for (r, c) in self.rounds.iter().zip(curve) {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.t,
                r.phase.as_str(),
                r.offer.target,
                r.offer.amount,
                r.chosen,
                r.reward,
                r.paid,
                c
            )?;
        }
        Ok(())
    }

    /// `arm, lower, upper, estimate`.
    pub fn write_brackets_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "arm,lower,upper,estimate")?;
        for (a, (b, e)) in self.brackets.iter().zip(&self.estimates).enumerate() {
            writeln!(w, "{a},{},{},{e}", b.lower, b.upper)?;
        }
        Ok(())
    }
}

/// Cumulative conditional-expected regret `sum_t mu* - (theta_{A_t} - paid_t)`.
pub fn regret_curve(traj: &MabTrajectory, inst: &MabInstance) -> Result<Vec<f64>> {
    let mut acc = 0.0;
    Ok(traj
        .increments(inst)?
        .into_iter()
        .map(|x| {
            acc += x;
            acc
        })
        .collect())
}

/// Smallest horizon `T` with `T > K * ceil(log2 T)`.
pub fn minimum_horizon(k: usize) -> u64 {
    (2u64..)
        .find(|&t| t > k as u64 * search_steps(t) as u64)
        .expect("the search phase grows logarithmically")
}

/// Plays IPA for `horizon` rounds against the greedy agent.
pub fn run_ipa(
    inst: &MabInstance,
    policy: &mut dyn BanditPolicy,
    horizon: u64,
    seed: u64,
    tie: TieBreak,
) -> Result<MabTrajectory> {
    let k = inst.k();
    let steps = search_steps(horizon);
    let search_len = k as u64 * steps as u64;
    if horizon < 2 || horizon <= search_len {
        return Err(Error::Config(format!(
            "horizon {horizon} leaves no bandit rounds for K = {k}; minimum is {}",
            minimum_horizon(k)
        )));
    }
    let mut reward_rng = stream_rng(seed, REWARD_STREAM);
    let mut sub_rng = stream_rng(seed, SUBROUTINE_STREAM);
    let mut traj = MabTrajectory::new(inst.clone(), horizon);

    for arm in 0..k {
        let bracket = binary_search_arm(
            |offer| {
                let chosen = agent_choice_mab(inst, offer, tie)?;
                let reward = inst.draw_reward(chosen, &mut reward_rng);
                traj.record(Phase::Search, offer, chosen, reward, None);
                Ok(chosen)
            },
            k,
            arm,
            steps,
        )?;
        traj.brackets.push(bracket);
    }
    traj.estimates = traj
        .brackets
        .iter()
        .map(|b| estimate_incentive(b, horizon))
        .collect();

    let mut history = ShiftedHistory::new(k);
    for t in (search_len + 1)..=horizon {
        let u: f64 = sub_rng.gen();
        let rec = policy.next(&history, u);
        if rec >= k {
            return Err(Error::Protocol(format!("subroutine recommended arm {rec} of {k}")));
        }
        let offer = Offer::new(rec, traj.estimates[rec]);
        let chosen = agent_choice_mab(inst, offer, tie)?;
        let reward = inst.draw_reward(chosen, &mut reward_rng);
        traj.record(Phase::Bandit, offer, chosen, reward, Some(rec));
        history.push(HistoryRecord {
            round: t as usize,
            arm: rec,
            u,
            reward: reward - traj.estimates[rec],
        })?;
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bandit::Ucb;
    use crate::env::{optimal_incentive_mab, NoiseLaw};

    #[test]
    fn table3_search_phase_length() {
        let inst = MabInstance::table3();
        let mut ucb = Ucb::new(5, 10_000);
        let traj = run_ipa(&inst, &mut ucb, 10_000, 1, TieBreak::Adversarial).unwrap();
        assert_eq!(traj.search_rounds(), 70);
        assert_eq!(traj.rounds.len(), 10_000);
        assert!(traj.rounds.iter().enumerate().all(|(i, r)| r.t == i + 1));
        assert_eq!(traj.noncompliant_rounds(), 0);
        for r in &traj.rounds {
            let expected = if r.chosen == r.offer.target { r.offer.amount } else { 0.0 };
            assert_eq!(r.paid, expected);
        }
    }

    #[test]
    fn single_arm_game() {
        let inst = MabInstance::new(vec![0.4], vec![0.5], NoiseLaw::default()).unwrap();
        let t = 1000;
        let mut ucb = Ucb::new(1, t);
        let traj = run_ipa(&inst, &mut ucb, t, 3, TieBreak::Adversarial).unwrap();
        let expected = 0.5f64.powi(search_steps(t) as i32) + 1.0 / t as f64;
        assert!((traj.estimates[0] - expected).abs() < 1e-15);
        assert!(traj
            .rounds
            .iter()
            .filter(|r| r.phase == Phase::Bandit)
            .all(|r| r.recommendation == Some(0) && r.chosen == 0));
    }

    #[test]
    fn horizon_too_small_names_minimum() {
        let inst = MabInstance::table3();
        let mut ucb = Ucb::new(5, 20);
        let err = run_ipa(&inst, &mut ucb, 20, 0, TieBreak::Adversarial).unwrap_err();
        let min = minimum_horizon(5);
        assert!(min > 5 * search_steps(min) as u64);
        assert!(min - 1 <= 5 * search_steps(min - 1) as u64);
        match err {
            Error::Config(msg) => assert!(msg.contains(&min.to_string()), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn regret_increment_examples() {
        let inst = MabInstance::table3();
        let star = optimal_incentive_mab(&inst, 2).unwrap();
        let t = 10_000u64;
        let mut traj = MabTrajectory::new(inst.clone(), t);
        traj.record(Phase::Bandit, Offer::new(2, star), 2, 0.0, Some(2));
        traj.record(Phase::Bandit, Offer::new(2, star + 2.0 / t as f64), 2, 0.0, Some(2));
        let curve = regret_curve(&traj, &inst).unwrap();
        assert!(curve[0].abs() < 1e-12);
        assert!((curve[1] - 2.0 / t as f64).abs() < 1e-12);
    }

    #[test]
    fn search_increments_are_bounded() {
        let inst = MabInstance::table3();
        let mut ucb = Ucb::new(5, 10_000);
        let traj = run_ipa(&inst, &mut ucb, 10_000, 9, TieBreak::Adversarial).unwrap();
        let curve = regret_curve(&traj, &inst).unwrap();
        let bound = 1.0 + inst.theta_range();
        let mut prev = 0.0;
        for (r, c) in traj.rounds.iter().zip(&curve) {
            if r.phase == Phase::Search {
                assert!(c - prev <= bound + 1e-12);
            }
            prev = *c;
        }
    }

    #[test]
    fn mismatched_instance_is_rejected() {
        let inst = MabInstance::table3();
        let mut ucb = Ucb::new(5, 200);
        let traj = run_ipa(&inst, &mut ucb, 200, 0, TieBreak::Adversarial).unwrap();
        let other = MabInstance::new(vec![0.1; 5], vec![0.0; 5], NoiseLaw::default()).unwrap();
        assert!(matches!(regret_curve(&traj, &other), Err(Error::Input(_))));
    }

    #[test]
    fn csv_has_expected_header_and_rows() {
        let inst = MabInstance::table3();
        let mut ucb = Ucb::new(5, 200);
        let traj = run_ipa(&inst, &mut ucb, 200, 0, TieBreak::Adversarial).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,phase,offer_arm,offer_amount,chosen_arm,reward,paid,cum_regret"
        );
        assert_eq!(lines.count(), 200);
        let mut buf = Vec::new();
        traj.write_brackets_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 6);
    }

    #[test]
    fn same_seed_same_trajectory() {
        let inst = MabInstance::table3();
        let run = |seed| {
            let mut ucb = Ucb::new(5, 500);
            run_ipa(&inst, &mut ucb, 500, seed, TieBreak::Adversarial).unwrap().rounds
        };
        assert_eq!(run(4), run(4));
        assert_ne!(run(4), run(5));
    }
}
