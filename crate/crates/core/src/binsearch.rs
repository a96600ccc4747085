//! Per-arm binary search on the incentive level.
//!
//! Each step offers the bracket midpoint on the searched arm. Acceptance by
//! the agent proves `pi*_a <= mid`, refusal proves `pi*_a >= mid`, so the
//! bracket `[lower, upper]` always contains the optimal incentive and halves
//! its width at every step.

use crate::env::Offer;
use crate::error::{Error, Result};

/// Sandwich `lower <= pi*_a <= upper` after `steps` halvings of `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncentiveBracket {
    pub lower: f64,
    pub upper: f64,
    pub steps: u32,
}

impl Default for IncentiveBracket {
    fn default() -> Self {
        Self {
            lower: 0.0,
            upper: 1.0,
            steps: 0,
        }
    }
}

impl IncentiveBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        self.lower + (self.upper - self.lower) / 2.0
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    /// Fold in the agent's answer to a midpoint offer.
    pub fn update(&mut self, accepted: bool) {
        let mid = self.midpoint();
        if accepted {
            self.upper = mid;
        } else {
            self.lower = mid;
        }
        self.steps += 1;
    }
}

/// Number of search steps per arm for horizon `horizon`: `ceil(log2 T)`.
pub fn search_steps(horizon: u64) -> u32 {
    if horizon <= 1 {
        0
    } else {
        64 - (horizon - 1).leading_zeros()
    }
}

/// Runs `n_steps` halvings on `arm`. `oracle` plays one round of the game for
/// the given offer and returns the arm the agent picked.
pub fn binary_search_arm<F>(
    mut oracle: F,
    k: usize,
    arm: usize,
    n_steps: u32,
) -> Result<IncentiveBracket>
where
    F: FnMut(Offer) -> Result<usize>,
{
    if arm >= k {
        return Err(Error::Input(format!("arm {arm} out of range for K = {k}")));
    }
    let mut bracket = IncentiveBracket::default();
    for _ in 0..n_steps {
        let chosen = oracle(Offer::new(arm, bracket.midpoint()))?;
        if chosen >= k {
            return Err(Error::Protocol(format!(
                "agent answered arm {chosen}, outside [0, {k})"
            )));
        }
        bracket.update(chosen == arm);
    }
    Ok(bracket)
}

/// Safety-margin estimate `upper + 1/T`; strictly above `pi*_a` and at most
/// `2/T` above it when the bracket has `ceil(log2 T)` steps.
pub fn estimate_incentive(bracket: &IncentiveBracket, horizon: u64) -> f64 {
    bracket.upper + 1.0 / horizon as f64
}
