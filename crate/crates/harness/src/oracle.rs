//! The UCB oracle: a principal that already knows every `pi*_a`.

use rand::Rng;

use pa_core::bandit::{BanditPolicy, HistoryRecord, ShiftedHistory, Ucb};
use pa_core::env::{optimal_incentive_mab, MabInstance, Offer};
use pa_core::ipa::{MabTrajectory, Phase};
use pa_core::rng::{stream_rng, REWARD_STREAM, SUBROUTINE_STREAM};
use pa_core::Result;

/// UCB on the arms `N(mu_a, sigma)` with `mu_a = theta_a - pi*_a`.
///
/// Each round pays exactly `pi*_a` on the chosen arm and the agent is
/// assumed to follow it, so the trajectory's regret is `mu* - mu_{A_t}`.
pub fn oracle_ucb_run(inst: &MabInstance, horizon: u64, seed: u64) -> Result<MabTrajectory> {
    let k = inst.k();
    let prices = (0..k)
        .map(|a| optimal_incentive_mab(inst, a))
        .collect::<Result<Vec<_>>>()?;
    let mut reward_rng = stream_rng(seed, REWARD_STREAM);
    let mut sub_rng = stream_rng(seed, SUBROUTINE_STREAM);
    let mut ucb = Ucb::new(k, horizon);
    let mut history = ShiftedHistory::new(k);
    let mut traj = MabTrajectory::new(inst.clone(), horizon);
    for t in 1..=horizon as usize {
        let u: f64 = sub_rng.gen();
        let arm = ucb.next(&history, u);
        let reward = inst.draw_reward(arm, &mut reward_rng);
        traj.record(Phase::Bandit, Offer::new(arm, prices[arm]), arm, reward, Some(arm));
        history.push(HistoryRecord {
            round: t,
            arm,
            u,
            reward: reward - prices[arm],
        })?;
    }
    traj.estimates = prices;
    Ok(traj)
}
