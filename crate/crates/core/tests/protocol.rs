use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pa_core::bandit::{Subroutine, Ucb};
use pa_core::binsearch::search_steps;
use pa_core::cipa::{run_cipa, search_round_bound};
use pa_core::env::{optimal_incentive_mab, ContextualInstance, MabInstance, TieBreak};
use pa_core::ipa::{regret_curve, run_ipa, Phase};
use pa_core::Error;

#[test]
fn ipa_search_phase_then_compliant_bandit_phase() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for tie in [TieBreak::Adversarial, TieBreak::Lexicographic] {
        for _ in 0..20 {
            let k = 2 + (rand::Rng::gen_range(&mut rng, 0..8));
            let inst = MabInstance::random(k, &mut rng);
            let horizon = 2000;
            let traj = run_ipa(&inst, &mut Ucb::new(k, horizon), horizon, 7, tie).unwrap();
            let search = k * search_steps(horizon) as usize;
            assert_eq!(traj.search_rounds(), search);
            assert!(traj.rounds[..search].iter().all(|r| r.phase == Phase::Search));
            assert_eq!(traj.noncompliant_rounds(), 0);
            for (a, est) in traj.estimates.iter().enumerate() {
                let gap = est - optimal_incentive_mab(&inst, a).unwrap();
                assert!(gap > 0.0 && gap <= 2.0 / horizon as f64);
            }
            let curve = regret_curve(&traj, &inst).unwrap();
            assert_eq!(curve.len(), horizon as usize);
        }
    }
}

#[test]
fn ipa_is_reproducible_per_seed() {
    let inst = MabInstance::table3();
    let run = |seed| {
        let sub = Subroutine::EpsGreedy { m: 50.0, alpha: 1.0 };
        let mut policy = sub.build(inst.k(), 3000);
        run_ipa(&inst, policy.as_mut(), 3000, seed, TieBreak::Adversarial).unwrap()
    };
    assert_eq!(run(5).rounds, run(5).rounds);
    assert_ne!(run(5).rounds, run(6).rounds);
}

#[test]
fn ipa_rejects_too_short_horizons() {
    let inst = MabInstance::table3();
    let err = run_ipa(&inst, &mut Ucb::new(5, 20), 20, 0, TieBreak::Adversarial).unwrap_err();
    assert!(matches!(err, Error::Config(_)));
}

#[test]
fn cipa_short_run_keeps_every_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let horizon = 600;
    for d in [2, 3] {
        let inst = ContextualInstance::random(d, 10, &mut rng);
        let traj = run_cipa(&inst, horizon, 3).unwrap();
        assert_eq!(traj.rounds.len(), horizon as usize);
        assert!(traj.rounds.iter().all(|r| r.s_star_inside));
        assert_eq!(traj.noncompliant_rounds(), 0);
        assert!((traj.search_rounds() as f64) <= search_round_bound(d, horizon));
        for r in traj.rounds.iter().filter(|r| r.phase == Phase::Bandit) {
            let eps = r.epsilon.unwrap();
            assert!(eps.abs() <= 4.0 / horizon as f64);
        }
        assert!(traj.corruption_sum <= 4.0);
        let curve = traj.regret_curve();
        assert!(curve.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }
}
