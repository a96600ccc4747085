//! Weighted OFUL for linear bandits with a known corruption budget.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Ridge design with per-sample weights `min(1, alpha / ||a||_{Sigma^-1})`.
#[derive(Debug, Clone)]
pub struct CorruptionRobustState {
    lambda: f64,
    alpha: f64,
    budget: f64,
    confidence: f64,
    design: DMatrix<f64>,
    design_inv: DMatrix<f64>,
    response: DVector<f64>,
    observations: usize,
}

impl CorruptionRobustState {
    /// Defaults for a horizon `T`: `lambda = 1`, `alpha = sqrt(d) / 4`,
    /// confidence `1 / T`, corruption budget 4.
    pub fn new(d: usize, horizon: u64) -> Self {
        Self::with_params(d, 1.0, (d as f64).sqrt() / 4.0, 4.0, 1.0 / horizon.max(2) as f64)
    }

    pub fn with_params(d: usize, lambda: f64, alpha: f64, budget: f64, confidence: f64) -> Self {
        assert!(lambda > 0.0 && alpha > 0.0 && budget >= 0.0 && confidence > 0.0 && confidence < 1.0);
        Self {
            lambda,
            alpha,
            budget,
            confidence,
            design: DMatrix::identity(d, d) * lambda,
            design_inv: DMatrix::identity(d, d) / lambda,
            response: DVector::zeros(d),
            observations: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.response.len()
    }

    pub fn observations(&self) -> usize {
        self.observations
    }

    pub fn design(&self) -> &DMatrix<f64> {
        &self.design
    }

    pub fn theta_hat(&self) -> DVector<f64> {
        &self.design_inv * &self.response
    }

    /// `||a||` in the inverse-design norm.
    pub fn inverse_norm(&self, a: &DVector<f64>) -> f64 {
        a.dot(&(&self.design_inv * a)).max(0.0).sqrt()
    }

    pub fn weight(&self, a: &DVector<f64>) -> f64 {
        let n = self.inverse_norm(a);
        if n > 0.0 {
            (self.alpha / n).min(1.0)
        } else {
            1.0
        }
    }

    /// Confidence radius after the current number of observations.
    pub fn beta(&self) -> f64 {
        let d = self.dim() as f64;
        let t = self.observations as f64;
        self.lambda.sqrt()
            + (d * ((1.0 + t / self.lambda) / self.confidence).ln()).sqrt()
            + self.alpha * self.budget
    }

    /// Optimistic action; ties go to the lowest index.
    pub fn next(&self, actions: &[DVector<f64>]) -> Result<usize> {
        if actions.is_empty() {
            return Err(Error::Input("empty action set".into()));
        }
        let theta = self.theta_hat();
        let beta = self.beta();
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for (i, a) in actions.iter().enumerate() {
            let v = theta.dot(a) + beta * self.inverse_norm(a);
            if v > best_val {
                best_val = v;
                best = i;
            }
        }
        Ok(best)
    }

    pub fn observe(&mut self, a: &DVector<f64>, reward: f64) -> Result<()> {
        if a.len() != self.dim() || !reward.is_finite() {
            return Err(Error::Input("observation has wrong dimension or non-finite reward".into()));
        }
        let w = self.weight(a);
        self.design.ger(w, a, a, 1.0);
        self.response.axpy(w * reward, a, 1.0);
        // Sherman-Morrison keeps the inverse in step with the design
        let sa = &self.design_inv * a;
        let denom = 1.0 + w * a.dot(&sa);
        self.design_inv.ger(-w / denom, &sa, &sa, 1.0);
        self.observations += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(x)
    }

    #[test]
    fn empty_history_picks_largest_norm() {
        let st = CorruptionRobustState::new(2, 100);
        assert_eq!(st.theta_hat(), DVector::zeros(2));
        let acts = vec![v(&[0.1, 0.0]), v(&[0.0, 0.9]), v(&[0.5, 0.5])];
        assert_eq!(st.next(&acts).unwrap(), 1);
    }

    #[test]
    fn noiseless_ridge_recovers_theta() {
        let theta = v(&[0.3, -0.5]);
        let mut st = CorruptionRobustState::new(2, 500);
        let basis = [v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        for t in 0..500 {
            let a = &basis[t % 2];
            st.observe(a, theta.dot(a)).unwrap();
        }
        assert!((st.theta_hat() - theta).norm() < 0.05);
    }

    #[test]
    fn long_actions_are_down_weighted() {
        let st = CorruptionRobustState::new(4, 100);
        // alpha = 0.5 and the fresh design is the identity
        assert!(st.weight(&v(&[0.6, 0.0, 0.0, 0.0])) < 1.0);
        assert_eq!(st.weight(&v(&[0.4, 0.0, 0.0, 0.0])), 1.0);
    }

    #[test]
    fn inverse_tracks_design() {
        let mut st = CorruptionRobustState::new(3, 100);
        for (i, r) in [0.2, -0.1, 0.7, 0.4].iter().enumerate() {
            let a = v(&[0.3 * i as f64, 0.5, -0.2]);
            st.observe(&a, *r).unwrap();
        }
        let prod = st.design() * &st.design_inv;
        assert!((prod - DMatrix::identity(3, 3)).norm() < 1e-10);
    }
}
