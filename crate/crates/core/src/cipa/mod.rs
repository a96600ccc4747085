//! C-IPA for the linear contextual game.
//!
//! Each round first asks whether the localization body of `s*` is already
//! thinner than `1/T` along every difference of two available actions. If
//! not, the principal offers a pair of incentives whose outcome reveals on
//! which side of the approximate centroid `s*` lies and cuts the body. If
//! it is, the centroid prices every action to within `4/T` and a
//! corruption-robust linear bandit picks the recommendation.

mod robust;

use std::io::{self, Write};

use nalgebra::DVector;
use rand_chacha::ChaCha8Rng;

pub use robust::CorruptionRobustState;

use crate::env::{agent_choice_contextual, optimal_incentive_contextual, ContextualInstance, IncentiveMap, TieBreak};
use crate::error::{Error, Result};
use crate::geometry::{
    centroid_from_samples, projected_hit_and_run, update_small_directions, ConvexBody,
    DirectionBasis, KeepSide, SamplerConfig,
};
use crate::ipa::Phase;
use crate::rng::{stream_rng, GEOMETRY_STREAM, REWARD_STREAM};

/// Widths within this much of each other count as tied when picking a pair.
const PAIR_TIE: f64 = 1e-9;
/// Extra room on axis widths for the solver's gap.
const WIDTH_SLACK: f64 = 1e-9;
/// Samples used for cheap lower bounds on widths.
const PROBE_SAMPLES: usize = 256;

/// Comparison threshold for the round test: `1/T` less a margin that covers
/// support-function error.
pub fn et_threshold(horizon: u64) -> f64 {
    let inv = 1.0 / horizon as f64;
    inv - (1e-5f64).min(0.1 * inv)
}

/// Thinness threshold for tracked directions, `1 / (16 T^2 d (d+1)^2)`.
pub fn thin_threshold(d: usize, horizon: u64) -> f64 {
    let t = horizon as f64;
    let d = d as f64;
    1.0 / (16.0 * t * t * d * (d + 1.0) * (d + 1.0))
}

/// Almost-sure cap on the number of search rounds, `192 d ln(dT)`.
pub fn search_round_bound(d: usize, horizon: u64) -> f64 {
    192.0 * d as f64 * (d as f64 * horizon as f64).ln()
}

fn unit_difference(a: &DVector<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let diff = a - b;
    let n = diff.norm();
    (n > 0.0).then(|| diff / n)
}

fn pairs(m: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..m).flat_map(move |i| (i + 1..m).map(move |j| (i, j)))
}

/// Exhaustive round test: every pair direction has width below the threshold.
pub fn check_et(body: &ConvexBody, actions: &[DVector<f64>], horizon: u64) -> Result<bool> {
    let thr = et_threshold(horizon);
    for (i, j) in pairs(actions.len()) {
        if let Some(w) = unit_difference(&actions[i], &actions[j]) {
            if body.projected_diameter(&w)? >= thr {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `max_{a'} <s_hat, a'> - <s_hat, a> + 2/T`.
pub fn estimate_incentive_ctx(
    s_hat: &DVector<f64>,
    actions: &[DVector<f64>],
    idx: usize,
    horizon: u64,
) -> f64 {
    let best = actions
        .iter()
        .map(|a| s_hat.dot(a))
        .fold(f64::NEG_INFINITY, f64::max);
    best - s_hat.dot(&actions[idx]) + 2.0 / horizon as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CipaConfig {
    /// Incentive on the first action of a search pair; the second gets this
    /// plus the centroid's utility gap. Must exceed 2.
    pub base_offer: f64,
    pub sampler: SamplerConfig,
    pub tie: TieBreak,
}

impl Default for CipaConfig {
    fn default() -> Self {
        Self {
            base_offer: 3.0,
            sampler: SamplerConfig::default(),
            tie: TieBreak::Adversarial,
        }
    }
}

/// Samples, centroid and a bounding box of the current body.
#[derive(Debug, Clone)]
struct Localization {
    centroid: DVector<f64>,
    probe: Vec<DVector<f64>>,
    axes: Vec<(DVector<f64>, f64)>,
}

impl Localization {
    fn build(body: &ConvexBody, basis: &DirectionBasis, samples: &[DVector<f64>]) -> Result<Self> {
        let centroid = centroid_from_samples(body, basis, samples)?;
        let eig = body.shape().clone().symmetric_eigen();
        let mut axes = Vec::with_capacity(body.dim());
        for k in 0..body.dim() {
            let e = eig.eigenvectors.column(k).normalize();
            let width = body.projected_diameter(&e)? + WIDTH_SLACK;
            axes.push((e, width));
        }
        let mut probe: Vec<DVector<f64>> = samples.iter().take(PROBE_SAMPLES).cloned().collect();
        probe.push(body.interior_point().clone());
        Ok(Self {
            centroid,
            probe,
            axes,
        })
    }

    /// Sound bounds on the width along `w`: sample spread below, the
    /// principal-axis box above.
    fn width_bounds(&self, w: &DVector<f64>) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in &self.probe {
            let x = p.dot(w);
            lo = lo.min(x);
            hi = hi.max(x);
        }
        let upper = self.axes.iter().map(|(e, width)| e.dot(w).abs() * width).sum::<f64>();
        ((hi - lo).max(0.0), upper)
    }
}

/// Outcome of one search round.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchStep {
    pub first: usize,
    pub second: usize,
    pub width: f64,
    pub offers: IncentiveMap,
    pub chosen: usize,
}

#[derive(Debug, Clone)]
pub struct CipaState {
    horizon: u64,
    cfg: CipaConfig,
    body: ConvexBody,
    basis: DirectionBasis,
    bandit: CorruptionRobustState,
    loc: Localization,
    rng: ChaCha8Rng,
    search_rounds: usize,
    corruption_sum: f64,
}

impl CipaState {
    pub fn new(d: usize, horizon: u64, seed: u64, cfg: CipaConfig) -> Result<Self> {
        if d == 0 {
            return Err(Error::Config("dimension must be positive".into()));
        }
        if horizon < 2 {
            return Err(Error::Config(format!("horizon must be at least 2, got {horizon}")));
        }
        if !(cfg.base_offer > 2.0) || !cfg.base_offer.is_finite() {
            return Err(Error::Config(format!(
                "base offer must exceed 2 so the agent stays within the pair, got {}",
                cfg.base_offer
            )));
        }
        if cfg.sampler.samples == 0 {
            return Err(Error::Config("sampler needs at least one sample".into()));
        }
        let body = ConvexBody::ball(d);
        let basis = DirectionBasis::new(d, thin_threshold(d, horizon))?;
        let mut rng = stream_rng(seed, GEOMETRY_STREAM);
        let samples = projected_hit_and_run(&body, &basis, &cfg.sampler, &mut rng)?;
        let loc = Localization::build(&body, &basis, &samples)?;
        Ok(Self {
            horizon,
            cfg,
            body,
            basis,
            bandit: CorruptionRobustState::new(d, horizon),
            loc,
            rng,
            search_rounds: 0,
            corruption_sum: 0.0,
        })
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn basis(&self) -> &DirectionBasis {
        &self.basis
    }

    pub fn bandit(&self) -> &CorruptionRobustState {
        &self.bandit
    }

    /// Approximate centroid of the cylindrified body.
    pub fn centroid(&self) -> &DVector<f64> {
        &self.loc.centroid
    }

    pub fn search_rounds(&self) -> usize {
        self.search_rounds
    }

    pub fn corruption_sum(&self) -> f64 {
        self.corruption_sum
    }

    /// Same answer as [`check_et`], with cheap bounds settling most pairs.
    pub fn check_et(&self, actions: &[DVector<f64>]) -> Result<bool> {
        let thr = et_threshold(self.horizon);
        let mut unsettled = Vec::new();
        for (i, j) in pairs(actions.len()) {
            let Some(w) = unit_difference(&actions[i], &actions[j]) else {
                continue;
            };
            let (lo, hi) = self.loc.width_bounds(&w);
            if lo >= thr {
                return Ok(false);
            }
            if hi >= thr {
                unsettled.push(w);
            }
        }
        for w in unsettled {
            if self.body.projected_diameter(&w)? >= thr {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Widest pair, oriented so the centroid weakly prefers the first action.
    /// Near-ties go to the lexicographically first pair.
    pub fn select_pair(&self, actions: &[DVector<f64>]) -> Result<Option<(usize, usize, f64)>> {
        let mut cands = Vec::new();
        let mut best_lo = f64::NEG_INFINITY;
        for (i, j) in pairs(actions.len()) {
            if let Some(w) = unit_difference(&actions[i], &actions[j]) {
                let (lo, hi) = self.loc.width_bounds(&w);
                best_lo = best_lo.max(lo);
                cands.push((i, j, w, hi));
            }
        }
        let mut best: Option<(usize, usize, f64)> = None;
        for (i, j, w, hi) in cands {
            if hi < best_lo - PAIR_TIE {
                continue;
            }
            let width = self.body.projected_diameter(&w)?;
            if best.is_none_or(|(_, _, b)| width > b + PAIR_TIE) {
                best = Some((i, j, width));
            }
        }
        Ok(best.map(|(i, j, width)| {
            if self.loc.centroid.dot(&(&actions[i] - &actions[j])) >= 0.0 {
                (i, j, width)
            } else {
                (j, i, width)
            }
        }))
    }

    /// One search round: offer the pair, read the agent's answer, cut the body
    /// through the centroid and refresh the thin directions.
    pub fn projected_volume_step<F>(&mut self, actions: &[DVector<f64>], mut agent: F) -> Result<SearchStep>
    where
        F: FnMut(&IncentiveMap) -> Result<usize>,
    {
        let (first, second, width) = self
            .select_pair(actions)?
            .ok_or_else(|| Error::Internal("search round without two distinct actions".into()))?;
        let diff = &actions[first] - &actions[second];
        let gap = self.loc.centroid.dot(&diff);
        let offers = IncentiveMap::pair(
            (first, self.cfg.base_offer),
            (second, self.cfg.base_offer + gap),
        );
        let chosen = agent(&offers)?;
        if chosen != first && chosen != second {
            return Err(Error::Protocol(format!(
                "agent chose action {chosen} outside the offered pair ({first}, {second})"
            )));
        }
        let w = &diff / diff.norm();
        let x = self.loc.centroid.dot(&w);
        let side = if chosen == first { KeepSide::Above } else { KeepSide::Below };
        self.body = self.body.cut(&w, x, side)?;
        self.search_rounds += 1;
        self.relocalize()?;
        Ok(SearchStep {
            first,
            second,
            width,
            offers,
            chosen,
        })
    }

    fn relocalize(&mut self) -> Result<()> {
        let mut samples = projected_hit_and_run(&self.body, &self.basis, &self.cfg.sampler, &mut self.rng)?;
        if update_small_directions(&self.body, &mut self.basis, &samples)? > 0 {
            samples = projected_hit_and_run(&self.body, &self.basis, &self.cfg.sampler, &mut self.rng)?;
        }
        self.loc = Localization::build(&self.body, &self.basis, &samples)?;
        Ok(())
    }

    pub fn incentive_estimate(&self, actions: &[DVector<f64>], idx: usize) -> f64 {
        estimate_incentive_ctx(&self.loc.centroid, actions, idx, self.horizon)
    }

    pub fn recommend(&self, actions: &[DVector<f64>]) -> Result<usize> {
        self.bandit.next(actions)
    }

    /// Feeds the subroutine one bandit round and books its corruption.
    pub fn observe(&mut self, action: &DVector<f64>, reward: f64, corruption: f64) -> Result<()> {
        self.corruption_sum += corruption.abs();
        self.bandit.observe(action, reward)
    }
}

/// One round of a C-IPA run.
#[derive(Debug, Clone, PartialEq)]
pub struct CipaRound {
    pub t: usize,
    pub phase: Phase,
    pub pair: Option<(usize, usize)>,
    pub recommendation: Option<usize>,
    pub offers: IncentiveMap,
    pub chosen: usize,
    pub reward: f64,
    pub paid: f64,
    /// `pi*(t, a) - pi_hat(t, a)` for the recommended action.
    pub epsilon: Option<f64>,
    pub cut_count: usize,
    pub compliant: bool,
    pub s_star_inside: bool,
    /// Expected regret of the round.
    pub regret: f64,
}

#[derive(Debug, Clone)]
pub struct CipaTrajectory {
    pub horizon: u64,
    pub rounds: Vec<CipaRound>,
    pub corruption_sum: f64,
    pub thin_directions: usize,
}

impl CipaTrajectory {
    pub fn search_rounds(&self) -> usize {
        self.rounds.iter().filter(|r| r.phase == Phase::Search).count()
    }

    pub fn noncompliant_rounds(&self) -> usize {
        self.rounds.iter().filter(|r| !r.compliant).count()
    }

    pub fn regret_curve(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.rounds
            .iter()
            .map(|r| {
                acc += r.regret;
                acc
            })
            .collect()
    }

    pub fn total_regret(&self) -> f64 {
        self.rounds.iter().map(|r| r.regret).sum()
    }

    /// `t, phase, pair_first, pair_second, recommendation, chosen, offer_first,
    /// offer_second, reward, paid, epsilon_t, cut_count_so_far, cum_regret`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        fn opt<T: ToString>(x: Option<T>) -> String {
            x.map(|v| v.to_string()).unwrap_or_default()
        }
        writeln!(
            w,
            "t,phase,pair_first,pair_second,recommendation,chosen,offer_first,offer_second,reward,paid,epsilon_t,cut_count_so_far,cum_regret"
        )?;
        for (r, c) in self.rounds.iter().zip(self.regret_curve()) {
            let offers = r.offers.entries();
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.t,
                r.phase.as_str(),
                opt(r.pair.map(|p| p.0)),
                opt(r.pair.map(|p| p.1)),
                opt(r.recommendation),
                r.chosen,
                opt(offers.first().map(|o| o.1)),
                opt(offers.get(1).map(|o| o.1)),
                r.reward,
                r.paid,
                opt(r.epsilon),
                r.cut_count,
                c
            )?;
        }
        Ok(())
    }
}

pub fn run_cipa(inst: &ContextualInstance, horizon: u64, seed: u64) -> Result<CipaTrajectory> {
    run_cipa_with(inst, horizon, seed, &CipaConfig::default())
}

pub fn run_cipa_with(
    inst: &ContextualInstance,
    horizon: u64,
    seed: u64,
    cfg: &CipaConfig,
) -> Result<CipaTrajectory> {
    let mut state = CipaState::new(inst.d(), horizon, seed, *cfg)?;
    let sets = inst.action_sets(seed);
    let mut reward_rng = stream_rng(seed, REWARD_STREAM);
    let mut rounds = Vec::with_capacity(horizon as usize);

    for t in 1..=horizon as usize {
        let actions = sets.action_set(t);
        let agent = |offer: &IncentiveMap| agent_choice_contextual(inst.s_star(), &actions, offer, cfg.tie);
        let (phase, pair, recommendation, offers, chosen, epsilon);
        if state.check_et(&actions)? {
            let rec = state.recommend(&actions)?;
            let price = state.incentive_estimate(&actions, rec);
            offers = IncentiveMap::single(rec, price);
            chosen = agent(&offers)?;
            phase = Phase::Bandit;
            pair = None;
            recommendation = Some(rec);
            epsilon = Some(optimal_incentive_contextual(inst.s_star(), &actions, rec)? - price);
        } else {
            let step = state.projected_volume_step(&actions, agent)?;
            phase = Phase::Search;
            pair = Some((step.first, step.second));
            recommendation = None;
            offers = step.offers;
            chosen = step.chosen;
            epsilon = None;
        }
        let paid = offers.amount(chosen);
        let reward = inst.draw_reward(&actions[chosen], &mut reward_rng);
        if phase == Phase::Bandit {
            // shifting back by the centroid's best utility leaves a reward
            // linear in theta* + s*
            let anchor = actions
                .iter()
                .map(|a| state.centroid().dot(a))
                .fold(f64::NEG_INFINITY, f64::max);
            state.observe(&actions[chosen], reward - paid + anchor, epsilon.unwrap_or(0.0))?;
        }
        let regret = inst.round_benchmark(&actions) - (inst.theta_star().dot(&actions[chosen]) - paid);
        rounds.push(CipaRound {
            t,
            phase,
            pair,
            recommendation,
            offers,
            chosen,
            reward,
            paid,
            epsilon,
            cut_count: state.search_rounds(),
            compliant: recommendation.is_none_or(|r| r == chosen),
            s_star_inside: state.body().contains(inst.s_star(), 1e-12),
            regret,
        });
    }
    Ok(CipaTrajectory {
        horizon,
        rounds,
        corruption_sum: state.corruption_sum(),
        thin_directions: state.basis().len(),
    })
}
