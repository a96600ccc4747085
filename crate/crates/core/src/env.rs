//! Game instances, the greedy agent and the closed-form benchmarks.
//!
//! Two settings share the same agent model: in the multi-armed game the
//! agent picks `argmax_a s_a + 1[a = target] * amount`, in the linear game he
//! picks `argmax_{a in A_t} <s*, a> + tau(a)` for a finite-support incentive
//! function `tau`. Ties are resolved by a [`TieBreak`] policy.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Agent mean rewards of the five-arm instance used for the regret figure.
pub const TABLE3_S: [f64; 5] = [0.64, 0.99, 0.73, 0.61, 0.59];
/// Principal mean rewards of the same instance.
pub const TABLE3_THETA: [f64; 5] = [0.30, 0.24, 0.88, 0.07, 0.65];

/// Reward law around a mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NoiseLaw {
    Gaussian { sigma: f64 },
}

impl Default for NoiseLaw {
    fn default() -> Self {
        NoiseLaw::Gaussian { sigma: 1.0 }
    }
}

impl NoiseLaw {
    pub fn sigma(&self) -> f64 {
        match *self {
            NoiseLaw::Gaussian { sigma } => sigma,
        }
    }

    fn validate(&self) -> Result<()> {
        let sigma = self.sigma();
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::Input(format!(
                "field `noise.sigma`: must be finite and >= 0, got {sigma}"
            )));
        }
        Ok(())
    }

    /// One sample with the given mean. `sigma = 0` returns the mean exactly.
    pub fn sample<R: Rng + ?Sized>(&self, mean: f64, rng: &mut R) -> f64 {
        match *self {
            NoiseLaw::Gaussian { sigma } => {
                if sigma == 0.0 {
                    mean
                } else {
                    let z: f64 = rng.sample(StandardNormal);
                    mean + sigma * z
                }
            }
        }
    }
}

/// How the agent resolves exact utility ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TieBreak {
    /// Among tied maximizers prefer the ones carrying the smallest incentive,
    /// i.e. decide against the principal whenever possible.
    #[default]
    Adversarial,
    /// Smallest index among the tied maximizers.
    Lexicographic,
}

/// Single-target incentive used in the multi-armed game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Offer {
    pub target: usize,
    pub amount: f64,
}

impl Offer {
    pub fn new(target: usize, amount: f64) -> Self {
        Self { target, amount }
    }

    /// Incentive received by the agent when he plays `arm`.
    pub fn paid_for(&self, arm: usize) -> f64 {
        if arm == self.target {
            self.amount
        } else {
            0.0
        }
    }
}

/// Finite-support incentive function over the indices of an action set.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IncentiveMap {
    entries: Vec<(usize, f64)>,
}

impl IncentiveMap {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(action: usize, amount: f64) -> Self {
        Self {
            entries: vec![(action, amount)],
        }
    }

    pub fn pair(first: (usize, f64), second: (usize, f64)) -> Self {
        Self {
            entries: vec![first, second],
        }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn amount(&self, action: usize) -> f64 {
        self.entries
            .iter()
            .filter(|(a, _)| *a == action)
            .map(|(_, x)| *x)
            .sum()
    }
}

/// Picks among `utilities` according to `tie`; `incentives[i]` is what
/// candidate `i` would be paid and `targeted[i]` whether the offer names it.
fn resolve(utilities: &[f64], incentives: &[f64], targeted: &[bool], tie: TieBreak) -> usize {
    let best = utilities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tied = (0..utilities.len()).filter(|&i| utilities[i] == best);
    match tie {
        TieBreak::Lexicographic => tied.min().unwrap_or(0),
        TieBreak::Adversarial => tied
            .min_by(|&i, &j| {
                incentives[i]
                    .partial_cmp(&incentives[j])
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(targeted[i].cmp(&targeted[j]))
                    .then(i.cmp(&j))
            })
            .unwrap_or(0),
    }
}

/// The multi-armed game.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MabInstance {
    s: Vec<f64>,
    theta: Vec<f64>,
    noise: NoiseLaw,
}

#[derive(Deserialize)]
struct MabDoc {
    k: usize,
    s: Vec<f64>,
    theta: Vec<f64>,
    #[serde(default)]
    noise: NoiseLaw,
}

impl MabInstance {
    pub fn new(s: Vec<f64>, theta: Vec<f64>, noise: NoiseLaw) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Input("field `s`: need at least one arm".into()));
        }
        if s.len() != theta.len() {
            return Err(Error::Input(format!(
                "field `theta`: length {} differs from `s` length {}",
                theta.len(),
                s.len()
            )));
        }
        if let Some((i, v)) = s
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::Input(format!("field `s[{i}]`: {v} is outside [0, 1]")));
        }
        if let Some((i, v)) = theta.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Input(format!("field `theta[{i}]`: {v} is not finite")));
        }
        noise.validate()?;
        Ok(Self { s, theta, noise })
    }

    /// The five-arm instance of the regret figure, unit-variance Gaussian rewards.
    pub fn table3() -> Self {
        Self::new(TABLE3_S.to_vec(), TABLE3_THETA.to_vec(), NoiseLaw::default())
            .expect("built-in instance is valid")
    }

    /// Uniform `s` and `theta` in `[0, 1]`.
    pub fn random<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Self {
        let s = (0..k).map(|_| rng.gen::<f64>()).collect();
        let theta = (0..k).map(|_| rng.gen::<f64>()).collect();
        Self::new(s, theta, NoiseLaw::default()).expect("uniform draws are valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MabDoc = serde_json::from_str(text).map_err(|e| {
            Error::Input(format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        if doc.k != doc.s.len() {
            return Err(Error::Input(format!(
                "field `k`: {} but `s` has {} entries",
                doc.k,
                doc.s.len()
            )));
        }
        Self::new(doc.s, doc.theta, doc.noise)
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "k": self.k(),
            "s": self.s,
            "theta": self.theta,
            "noise": self.noise,
        })
        .to_string()
    }

    pub fn k(&self) -> usize {
        self.s.len()
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn noise(&self) -> NoiseLaw {
        self.noise
    }

    pub fn with_noise(mut self, noise: NoiseLaw) -> Result<Self> {
        noise.validate()?;
        self.noise = noise;
        Ok(self)
    }

    pub fn theta_range(&self) -> f64 {
        let max = self.theta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.theta.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }

    pub fn check_arm(&self, arm: usize) -> Result<()> {
        if arm >= self.k() {
            Err(Error::Input(format!(
                "arm {arm} out of range for K = {}",
                self.k()
            )))
        } else {
            Ok(())
        }
    }

    /// Sample `X_arm(t)`.
    pub fn draw_reward<R: Rng + ?Sized>(&self, arm: usize, rng: &mut R) -> f64 {
        self.noise.sample(self.theta[arm], rng)
    }
}

/// The agent's greedy response to a single-target offer.
pub fn agent_choice_mab(inst: &MabInstance, offer: Offer, tie: TieBreak) -> Result<usize> {
    inst.check_arm(offer.target)?;
    if !(offer.amount >= 0.0) || !offer.amount.is_finite() {
        return Err(Error::Input(format!(
            "offer amount must be finite and >= 0, got {}",
            offer.amount
        )));
    }
    let incentives: Vec<f64> = (0..inst.k()).map(|a| offer.paid_for(a)).collect();
    let utilities: Vec<f64> = inst
        .s
        .iter()
        .zip(&incentives)
        .map(|(s, x)| s + x)
        .collect();
    let targeted: Vec<bool> = (0..inst.k()).map(|a| a == offer.target).collect();
    Ok(resolve(&utilities, &incentives, &targeted, tie))
}

/// Infimal incentive that makes `arm` the agent's strict choice: `max s - s_arm`.
pub fn optimal_incentive_mab(inst: &MabInstance, arm: usize) -> Result<f64> {
    inst.check_arm(arm)?;
    let max = inst.s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(max - inst.s[arm])
}

/// Per-arm value of the principal under optimal incentives.
#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark {
    pub mu_star: f64,
    pub mu: Vec<f64>,
    pub best_arm: usize,
}

/// `mu_a = theta_a + s_a - max s` and `mu* = max_a mu_a`.
pub fn benchmark_mu(inst: &MabInstance) -> Benchmark {
    let s_max = inst.s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mu: Vec<f64> = inst
        .theta
        .iter()
        .zip(&inst.s)
        .map(|(th, s)| th + s - s_max)
        .collect();
    let (best_arm, mu_star) = mu
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    Benchmark {
        mu_star,
        mu,
        best_arm,
    }
}

fn ball_violation(v: &[f64]) -> Option<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (n > 1.0 + 1e-12).then_some(n)
}

/// The linear game. Action sets are generated per round from a run seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextualInstance {
    theta_star: DVector<f64>,
    s_star: DVector<f64>,
    m: usize,
    noise: NoiseLaw,
}

#[derive(Serialize, Deserialize)]
struct ContextualDoc {
    d: usize,
    theta_star: Vec<f64>,
    s_star: Vec<f64>,
    #[serde(default = "default_m")]
    m: usize,
    #[serde(default)]
    noise: NoiseLaw,
}

fn default_m() -> usize {
    10
}

impl ContextualInstance {
    pub fn new(theta_star: Vec<f64>, s_star: Vec<f64>, m: usize, noise: NoiseLaw) -> Result<Self> {
        if theta_star.is_empty() {
            return Err(Error::Input("field `d`: dimension must be >= 1".into()));
        }
        if theta_star.len() != s_star.len() {
            return Err(Error::Input(format!(
                "field `s_star`: length {} differs from `theta_star` length {}",
                s_star.len(),
                theta_star.len()
            )));
        }
        if m == 0 {
            return Err(Error::Input("field `m`: action sets must be nonempty".into()));
        }
        if theta_star.iter().chain(&s_star).any(|x| !x.is_finite()) {
            return Err(Error::Input("fields `theta_star`/`s_star`: non-finite entry".into()));
        }
        if let Some(n) = ball_violation(&theta_star) {
            return Err(Error::Input(format!("field `theta_star`: norm {n} exceeds 1")));
        }
        if let Some(n) = ball_violation(&s_star) {
            return Err(Error::Input(format!("field `s_star`: norm {n} exceeds 1")));
        }
        noise.validate()?;
        Ok(Self {
            theta_star: DVector::from_vec(theta_star),
            s_star: DVector::from_vec(s_star),
            m,
            noise,
        })
    }

    /// `theta*` and `s*` uniform in the unit ball.
    pub fn random<R: Rng + ?Sized>(d: usize, m: usize, rng: &mut R) -> Self {
        let theta = uniform_in_ball(d, rng);
        let s = uniform_in_ball(d, rng);
        Self::new(theta.as_slice().to_vec(), s.as_slice().to_vec(), m, NoiseLaw::default())
            .expect("ball draws are valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ContextualDoc = serde_json::from_str(text).map_err(|e| {
            Error::Input(format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        if doc.d != doc.theta_star.len() {
            return Err(Error::Input(format!(
                "field `d`: {} but `theta_star` has {} entries",
                doc.d,
                doc.theta_star.len()
            )));
        }
        Self::new(doc.theta_star, doc.s_star, doc.m, doc.noise)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ContextualDoc {
            d: self.d(),
            theta_star: self.theta_star.as_slice().to_vec(),
            s_star: self.s_star.as_slice().to_vec(),
            m: self.m,
            noise: self.noise,
        })
        .expect("plain data serializes")
    }

    pub fn d(&self) -> usize {
        self.theta_star.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn theta_star(&self) -> &DVector<f64> {
        &self.theta_star
    }

    pub fn s_star(&self) -> &DVector<f64> {
        &self.s_star
    }

    pub fn noise(&self) -> NoiseLaw {
        self.noise
    }

    pub fn with_noise(mut self, noise: NoiseLaw) -> Result<Self> {
        noise.validate()?;
        self.noise = noise;
        Ok(self)
    }

    pub fn action_sets(&self, seed: u64) -> ActionSetGenerator {
        ActionSetGenerator::new(self.d(), self.m, seed)
    }

    /// Sample `<theta*, a> + eta`.
    pub fn draw_reward<R: Rng + ?Sized>(&self, action: &DVector<f64>, rng: &mut R) -> f64 {
        self.noise.sample(self.theta_star.dot(action), rng)
    }

    /// Best principal utility on a round, `max_a <theta* + s*, a> - max_a' <s*, a'>`.
    pub fn round_benchmark(&self, actions: &[DVector<f64>]) -> f64 {
        let sum = &self.theta_star + &self.s_star;
        let best = actions.iter().map(|a| sum.dot(a)).fold(f64::NEG_INFINITY, f64::max);
        let agent = actions
            .iter()
            .map(|a| self.s_star.dot(a))
            .fold(f64::NEG_INFINITY, f64::max);
        best - agent
    }
}

/// Uniform draw from the closed unit ball of dimension `d`.
pub fn uniform_in_ball<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<f64> {
    let dir = uniform_on_sphere(d, rng);
    let r: f64 = rng.gen::<f64>().powf(1.0 / d as f64);
    dir * r
}

pub fn uniform_on_sphere<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Deterministic per-round action sets: `m` vectors, uniform directions
/// scaled by uniform radii in `[0, 1]`.
#[derive(Debug, Clone)]
pub struct ActionSetGenerator {
    d: usize,
    m: usize,
    seed: u64,
}

impl ActionSetGenerator {
    pub fn new(d: usize, m: usize, seed: u64) -> Self {
        Self { d, m, seed }
    }

    pub fn action_set(&self, t: usize) -> Vec<DVector<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(0x4143_5453_0000_0000 ^ t as u64);
        (0..self.m)
            .map(|_| {
                let r: f64 = rng.gen();
                uniform_on_sphere(self.d, &mut rng) * r
            })
            .collect()
    }
}

fn check_action(actions: &[DVector<f64>], idx: usize) -> Result<()> {
    if idx >= actions.len() {
        Err(Error::Input(format!(
            "action {idx} is not in the action set of size {}",
            actions.len()
        )))
    } else {
        Ok(())
    }
}

/// The agent's greedy response in the linear game.
pub fn agent_choice_contextual(
    s_star: &DVector<f64>,
    actions: &[DVector<f64>],
    offer: &IncentiveMap,
    tie: TieBreak,
) -> Result<usize> {
    if actions.is_empty() {
        return Err(Error::Input("empty action set".into()));
    }
    for &(a, x) in offer.entries() {
        check_action(actions, a)?;
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::Input(format!("incentive on action {a} is {x}")));
        }
    }
    let incentives: Vec<f64> = (0..actions.len()).map(|i| offer.amount(i)).collect();
    let utilities: Vec<f64> = actions
        .iter()
        .zip(&incentives)
        .map(|(a, x)| s_star.dot(a) + x)
        .collect();
    let targeted: Vec<bool> = (0..actions.len())
        .map(|i| offer.entries().iter().any(|(a, _)| *a == i))
        .collect();
    Ok(resolve(&utilities, &incentives, &targeted, tie))
}

/// `max_{a' in A_t} <s*, a'> - <s*, a>`.
pub fn optimal_incentive_contextual(
    s_star: &DVector<f64>,
    actions: &[DVector<f64>],
    idx: usize,
) -> Result<f64> {
    check_action(actions, idx)?;
    let best = actions
        .iter()
        .map(|a| s_star.dot(a))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(best - s_star.dot(&actions[idx]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(x)
    }

    #[test]
    fn table3_agent_examples() {
        let inst = MabInstance::table3();
        let tie = TieBreak::Adversarial;
        assert_eq!(agent_choice_mab(&inst, Offer::new(2, 0.27), tie).unwrap(), 2);
        assert_eq!(agent_choice_mab(&inst, Offer::new(2, 0.25), tie).unwrap(), 1);
    }

    #[test]
    fn full_tie_lexicographic_picks_first() {
        let inst = MabInstance::new(vec![0.5; 4], vec![0.0; 4], NoiseLaw::default()).unwrap();
        let arm = agent_choice_mab(&inst, Offer::new(2, 0.0), TieBreak::Lexicographic).unwrap();
        assert_eq!(arm, 0);
        // adversarial refuses the target at a tie
        let arm = agent_choice_mab(&inst, Offer::new(0, 0.0), TieBreak::Adversarial).unwrap();
        assert_eq!(arm, 1);
    }

    #[test]
    fn invalid_arm_is_input_error() {
        let inst = MabInstance::table3();
        assert!(matches!(
            agent_choice_mab(&inst, Offer::new(5, 0.1), TieBreak::Adversarial),
            Err(Error::Input(_))
        ));
        assert!(optimal_incentive_mab(&inst, 7).is_err());
    }

    #[test]
    fn optimal_incentives_table3() {
        let inst = MabInstance::table3();
        assert!((optimal_incentive_mab(&inst, 0).unwrap() - 0.35).abs() < 1e-12);
        assert_eq!(optimal_incentive_mab(&inst, 1).unwrap(), 0.0);
        assert!((optimal_incentive_mab(&inst, 4).unwrap() - 0.40).abs() < 1e-12);
    }

    #[test]
    fn benchmark_table3() {
        let b = benchmark_mu(&MabInstance::table3());
        let expected = [-0.05, 0.24, 0.62, -0.31, 0.25];
        for (m, e) in b.mu.iter().zip(expected) {
            assert!((m - e).abs() < 1e-12, "{m} vs {e}");
        }
        assert!((b.mu_star - 0.62).abs() < 1e-12);
        assert_eq!(b.best_arm, 2);
    }

    #[test]
    fn benchmark_zero_instance() {
        let inst = MabInstance::new(vec![0.0; 3], vec![0.0; 3], NoiseLaw::default()).unwrap();
        let b = benchmark_mu(&inst);
        assert_eq!(b.mu, vec![0.0; 3]);
        assert_eq!(b.mu_star, 0.0);
    }

    #[test]
    fn contextual_agent_examples() {
        let s = v(&[0.6, 0.8]);
        let actions = vec![v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        let tie = TieBreak::Adversarial;
        assert_eq!(agent_choice_contextual(&s, &actions, &IncentiveMap::empty(), tie).unwrap(), 1);
        let offer = IncentiveMap::single(0, 0.21);
        assert_eq!(agent_choice_contextual(&s, &actions, &offer, tie).unwrap(), 0);
        let single = vec![v(&[0.3, -0.2])];
        assert_eq!(agent_choice_contextual(&s, &single, &IncentiveMap::empty(), tie).unwrap(), 0);
        let bad = IncentiveMap::single(4, 1.0);
        assert!(agent_choice_contextual(&s, &actions, &bad, tie).is_err());
    }

    #[test]
    fn contextual_optimal_incentive_examples() {
        let s = v(&[0.6, 0.8]);
        let actions = vec![v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        assert!((optimal_incentive_contextual(&s, &actions, 0).unwrap() - 0.2).abs() < 1e-12);
        assert_eq!(optimal_incentive_contextual(&s, &actions, 1).unwrap(), 0.0);
        let s = v(&[1.0, 0.0]);
        let actions = vec![v(&[1.0, 0.0]), v(&[-1.0, 0.0])];
        assert_eq!(optimal_incentive_contextual(&s, &actions, 1).unwrap(), 2.0);
        assert!(optimal_incentive_contextual(&s, &actions, 2).is_err());
    }

    #[test]
    fn zero_noise_returns_mean() {
        let inst = MabInstance::table3()
            .with_noise(NoiseLaw::Gaussian { sigma: 0.0 })
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(inst.draw_reward(2, &mut rng), 0.88);
    }

    #[test]
    fn monte_carlo_mean_of_draws() {
        let inst = MabInstance::table3();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let mean = (0..n).map(|_| inst.draw_reward(0, &mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 0.30).abs() < 0.02, "{mean}");
    }

    #[test]
    fn identical_seeds_identical_draws() {
        let inst = MabInstance::table3();
        let mut a = ChaCha8Rng::seed_from_u64(5);
        let mut b = ChaCha8Rng::seed_from_u64(5);
        for arm in 0..5 {
            assert_eq!(inst.draw_reward(arm, &mut a), inst.draw_reward(arm, &mut b));
        }
    }

    #[test]
    fn json_roundtrip_and_diagnostics() {
        let inst = MabInstance::table3();
        let back = MabInstance::from_json(&inst.to_json()).unwrap();
        assert_eq!(inst, back);

        let err = MabInstance::from_json(r#"{"k":2,"s":[0.5,1.5],"theta":[0,0]}"#).unwrap_err();
        assert!(err.to_string().contains("s[1]"), "{err}");
        let err = MabInstance::from_json("{\"k\":2,\n\"s\":[0.5,").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = MabInstance::from_json(r#"{"k":3,"s":[0.5,0.2],"theta":[0,0]}"#).unwrap_err();
        assert!(err.to_string().contains("`k`"), "{err}");

        let ctx = ContextualInstance::new(vec![0.1, 0.2], vec![0.6, 0.8], 10, NoiseLaw::default())
            .unwrap();
        assert_eq!(ContextualInstance::from_json(&ctx.to_json()).unwrap(), ctx);
        let err = ContextualInstance::from_json(
            r#"{"d":2,"theta_star":[0.9,0.9],"s_star":[0,0],"m":3}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("theta_star"), "{err}");
    }

    #[test]
    fn action_sets_are_deterministic_and_in_ball() {
        let g = ActionSetGenerator::new(3, 10, 42);
        let a = g.action_set(7);
        assert_eq!(a, g.action_set(7));
        assert_ne!(a, g.action_set(8));
        assert_eq!(a.len(), 10);
        assert!(a.iter().all(|x| x.norm() <= 1.0));
    }
}
