//! Log-barrier Newton method for
//!
//! ```text
//! maximize <c, z>  subject to  A z <= b,  ||q + M z|| <= 1
//! ```
//!
//! started from a strictly feasible point. Every iterate stays strictly
//! feasible, so the returned value is a lower bound on the optimum; the
//! central-path gap bounds the shortfall by `(rows + 1) / t_final`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Accuracy of the returned optimum (duality gap on the central path).
pub const GAP_TOL: f64 = 1e-11;

const GROWTH: f64 = 16.0;
const CENTERING_TOL: f64 = 1e-11;
const MAX_NEWTON: usize = 80;

/// Feasible region in solver coordinates.
pub(crate) struct Region<'a> {
    pub rows: &'a DMatrix<f64>,
    pub rhs: &'a DVector<f64>,
    /// Ball constraint `||offset + map * z|| <= 1`; `map = None` means identity.
    pub offset: Option<&'a DVector<f64>>,
    pub map: Option<&'a DMatrix<f64>>,
}

pub(crate) struct Optimum {
    pub value: f64,
    pub point: DVector<f64>,
}

impl Region<'_> {
    fn dim(&self) -> usize {
        self.rows.ncols()
    }

    fn ball_point(&self, z: &DVector<f64>) -> DVector<f64> {
        let mut p = match self.map {
            Some(m) => m * z,
            None => z.clone(),
        };
        if let Some(q) = self.offset {
            p += q;
        }
        p
    }

    fn map_t(&self, v: &DVector<f64>) -> DVector<f64> {
        match self.map {
            Some(m) => m.transpose() * v,
            None => v.clone(),
        }
    }

    /// Barrier value, or `None` outside the open region.
    fn barrier(&self, z: &DVector<f64>) -> Option<f64> {
        let slack = self.rhs - self.rows * z;
        let mut acc = 0.0;
        for &g in slack.iter() {
            if !(g > 0.0) {
                return None;
            }
            acc -= g.ln();
        }
        let p = self.ball_point(z);
        let h = 1.0 - p.norm_squared();
        if !(h > 0.0) {
            return None;
        }
        Some(acc - h.ln())
    }

    /// Gradient and Hessian of the barrier.
    fn derivatives(&self, z: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
        let k = self.dim();
        let slack = self.rhs - self.rows * z;
        let mut grad = DVector::zeros(k);
        let mut hess = DMatrix::zeros(k, k);
        for (i, &g) in slack.iter().enumerate() {
            let row = self.rows.row(i).transpose();
            grad.axpy(1.0 / g, &row, 1.0);
            hess.ger(1.0 / (g * g), &row, &row, 1.0);
        }
        let p = self.ball_point(z);
        let h = 1.0 - p.norm_squared();
        let mp = self.map_t(&p);
        grad.axpy(2.0 / h, &mp, 1.0);
        match self.map {
            Some(m) => hess += m.transpose() * m * (2.0 / h),
            None => {
                for i in 0..k {
                    hess[(i, i)] += 2.0 / h;
                }
            }
        }
        hess.ger(4.0 / (h * h), &mp, &mp, 1.0);
        (grad, hess)
    }

    pub fn is_strictly_feasible(&self, z: &DVector<f64>) -> bool {
        self.barrier(z).is_some()
    }

    /// Barrier Hessian at `z`.
    pub fn hessian(&self, z: &DVector<f64>) -> DMatrix<f64> {
        self.derivatives(z).1
    }
}

fn newton_direction(grad: &DVector<f64>, hess: DMatrix<f64>) -> Option<DVector<f64>> {
    let neg = -grad;
    if let Some(ch) = hess.clone().cholesky() {
        return Some(ch.solve(&neg));
    }
    hess.lu().solve(&neg)
}

/// Minimizes `t * <-c, z> + barrier(z)` from a strictly feasible `z`.
/// `stop` lets the caller end early once an iterate is good enough.
fn center(
    region: &Region<'_>,
    c: Option<&DVector<f64>>,
    t: f64,
    z: &mut DVector<f64>,
    stop: &mut dyn FnMut(&DVector<f64>) -> bool,
) -> Result<bool> {
    let objective = |z: &DVector<f64>| -> Option<f64> {
        let b = region.barrier(z)?;
        Some(match c {
            Some(c) => b - t * c.dot(z),
            None => b,
        })
    };
    let mut f = objective(z)
        .ok_or_else(|| Error::Internal("barrier solver started outside the region".into()))?;
    for _ in 0..MAX_NEWTON {
        let (mut grad, hess) = region.derivatives(z);
        if let Some(c) = c {
            grad.axpy(-t, c, 1.0);
        }
        let Some(dz) = newton_direction(&grad, hess) else {
            return Ok(false);
        };
        let decrement = -grad.dot(&dz);
        if !(decrement > 2.0 * CENTERING_TOL) {
            return Ok(false);
        }
        let mut step = 1.0;
        let mut moved = false;
        for _ in 0..60 {
            let cand = &*z + &dz * step;
            if let Some(fc) = objective(&cand) {
                if fc <= f - 0.25 * step * decrement {
                    *z = cand;
                    f = fc;
                    moved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !moved {
            return Ok(false);
        }
        if stop(z) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Maximizes `<c, z>`; `target` stops as soon as an iterate reaches it.
pub(crate) fn maximize(
    region: &Region<'_>,
    c: &DVector<f64>,
    start: &DVector<f64>,
    target: Option<f64>,
) -> Result<Optimum> {
    let mut z = start.clone();
    if !region.is_strictly_feasible(&z) {
        return Err(Error::Internal(
            "barrier solver needs a strictly feasible start".into(),
        ));
    }
    let constraints = region.rows.nrows() as f64 + 1.0;
    let reached = |z: &DVector<f64>| target.is_some_and(|v| c.dot(z) >= v);
    if reached(&z) {
        return Ok(Optimum { value: c.dot(&z), point: z });
    }
    let scale = c.norm().max(1e-300);
    let mut t = 1.0 / scale;
    loop {
        let mut stop = |z: &DVector<f64>| reached(z);
        if center(region, Some(c), t, &mut z, &mut stop)? {
            break;
        }
        if constraints / t < GAP_TOL * scale {
            break;
        }
        t *= GROWTH;
    }
    Ok(Optimum { value: c.dot(&z), point: z })
}

/// Analytic center: the minimizer of the barrier.
pub(crate) fn analytic_center(region: &Region<'_>, start: &DVector<f64>) -> Result<DVector<f64>> {
    let mut z = start.clone();
    if !region.is_strictly_feasible(&z) {
        return Err(Error::Internal(
            "analytic center needs a strictly feasible start".into(),
        ));
    }
    center(region, None, 0.0, &mut z, &mut |_| false)?;
    Ok(z)
}
