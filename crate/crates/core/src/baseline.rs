//! Approximate principal epsilon-greedy baseline.
//!
//! Exploration rounds offer a uniform random amount in `[0, 1]` on a uniformly
//! drawn arm; every answer of the agent tightens a per-arm interval of
//! consistent incentives (accepted amounts bound `pi*_a` from above, refused
//! ones from below). Exploitation rounds pick the arm maximizing the
//! empirical reward minus the smallest accepted amount and offer that amount.

use rand::Rng;

use crate::bandit::EpsGreedy;
use crate::env::{agent_choice_mab, MabInstance, Offer, TieBreak};
use crate::error::Result;
use crate::ipa::{MabTrajectory, Phase};
use crate::rng::{stream_rng, BASELINE_STREAM, REWARD_STREAM, SUBROUTINE_STREAM};

/// Label used in outputs; the original algorithm's internals are not reproduced.
pub const EPS_GREEDY_LABEL: &str = "eps-greedy (approximate baseline)";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsGreedyParams {
    pub m: f64,
    pub alpha: f64,
}

impl Default for EpsGreedyParams {
    fn default() -> Self {
        Self { m: 500.0, alpha: 1.0 }
    }
}

pub fn run_eps_greedy_principal(
    inst: &MabInstance,
    horizon: u64,
    seed: u64,
    params: EpsGreedyParams,
    tie: TieBreak,
) -> Result<MabTrajectory> {
    let k = inst.k();
    let mut reward_rng = stream_rng(seed, REWARD_STREAM);
    let mut sub_rng = stream_rng(seed, SUBROUTINE_STREAM);
    let mut amount_rng = stream_rng(seed, BASELINE_STREAM);
    let mut traj = MabTrajectory::new(inst.clone(), horizon);

    // rewards of the principal, keyed by the arm the agent actually played
    let mut rewards = EpsGreedy::new(k, params.m, params.alpha);
    let mut accepted = vec![1.0f64; k];
    let mut refused = vec![0.0f64; k];
    let mut means = vec![0.0f64; k];
    let mut counts = vec![0u64; k];

    for t in 1..=horizon as usize {
        let u: f64 = sub_rng.gen();
        let arm = rewards.decide(t, u);
        let offer = if rewards.last_explored() {
            Offer::new(arm, amount_rng.gen::<f64>())
        } else {
            let best = (0..k)
                .max_by(|&a, &b| {
                    (means[a] - accepted[a])
                        .partial_cmp(&(means[b] - accepted[b]))
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then(b.cmp(&a))
                })
                .unwrap_or(0);
            Offer::new(best, accepted[best])
        };
        let chosen = agent_choice_mab(inst, offer, tie)?;
        let reward = inst.draw_reward(chosen, &mut reward_rng);
        if chosen == offer.target {
            accepted[offer.target] = accepted[offer.target].min(offer.amount);
        } else {
            refused[offer.target] = refused[offer.target].max(offer.amount);
        }
        counts[chosen] += 1;
        means[chosen] += (reward - means[chosen]) / counts[chosen] as f64;
        rewards.observe(chosen, reward);
        traj.record(Phase::Bandit, offer, chosen, reward, Some(offer.target));
    }
    traj.estimates = accepted;
    traj.brackets = refused
        .iter()
        .zip(&traj.estimates)
        .map(|(&lower, &upper)| crate::binsearch::IncentiveBracket {
            lower,
            upper,
            steps: 0,
        })
        .collect();
    Ok(traj)
}
