//! Hit-and-run sampling and the approximate centroid of a cylindrification.
//!
//! Directions are drawn from the Dikin ellipsoid at the analytic center, so
//! the walk is ordinary hit-and-run in coordinates where the body is roughly
//! round. This keeps thin bodies (width `1e-6` against unit length) mixing.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::body::ConvexBody;
use super::directions::{orthonormal_complement, DirectionBasis};
use super::solver::{maximize, Region};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    pub samples: usize,
    pub burn_in: usize,
    /// Walk steps between recorded samples.
    pub thinning: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            samples: 4096,
            burn_in: 200,
            thinning: 2,
        }
    }
}

fn rounding(shape: &DMatrix<f64>) -> DMatrix<f64> {
    let n = shape.nrows();
    shape
        .clone()
        .cholesky()
        .map(|c| c.l())
        .unwrap_or_else(|| DMatrix::identity(n, n))
}

fn gaussian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Approximately uniform points of the body.
pub fn hit_and_run<R: Rng + ?Sized>(
    body: &ConvexBody,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Vec<DVector<f64>> {
    let l = rounding(body.shape());
    let mut x = body.interior_point().clone();
    let thin = cfg.thinning.max(1);
    let mut out = Vec::with_capacity(cfg.samples);
    let mut step = 0usize;
    while out.len() < cfg.samples {
        let u = &l * gaussian(body.dim(), rng);
        let (lo, hi) = body.chord(&x, &u);
        if hi > lo && lo.is_finite() && hi.is_finite() {
            let lambda = lo + (hi - lo) * rng.gen::<f64>();
            x.axpy(lambda, &u, 1.0);
        }
        step += 1;
        if step > cfg.burn_in && (step - cfg.burn_in).is_multiple_of(thin) {
            out.push(x.clone());
        }
    }
    out
}

/// Points of the body whose projections onto the complement of `basis`
/// are approximately uniform on the projected body.
///
/// The walk moves in the projected body; each chord is found by maximizing
/// the step length over lifts, and the new lift is a convex combination of
/// the current one and the chord's lifted endpoint.
pub fn projected_hit_and_run<R: Rng + ?Sized>(
    body: &ConvexBody,
    basis: &DirectionBasis,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<Vec<DVector<f64>>> {
    if basis.is_empty() {
        return Ok(hit_and_run(body, cfg, rng));
    }
    let comp = orthonormal_complement(body.dim(), basis.vectors());
    if comp.ncols() == 0 {
        return Ok(Vec::new());
    }
    let span = DMatrix::from_columns(basis.vectors());
    let l = rounding(&(comp.transpose() * body.shape() * &comp));
    let k = 1 + span.ncols();
    let mut e1 = DVector::zeros(k);
    e1[0] = 1.0;
    let neg_e1 = -&e1;
    let zero = DVector::zeros(k);

    let mut lift = body.interior_point().clone();
    let thin = cfg.thinning.max(1);
    let mut out = Vec::with_capacity(cfg.samples);
    let mut step = 0usize;
    while out.len() < cfg.samples {
        let u = &comp * (&l * gaussian(comp.ncols(), rng));
        let mut map = DMatrix::zeros(body.dim(), k);
        map.set_column(0, &u);
        map.columns_mut(1, k - 1).copy_from(&span);
        let rows = body.normals() * &map;
        let rhs = body.offsets() - body.normals() * &lift;
        let region = Region {
            rows: &rows,
            rhs: &rhs,
            offset: Some(&lift),
            map: Some(&map),
        };
        let far = maximize(&region, &e1, &zero, None).map_err(|e| sampler_error(e, &lift))?;
        let near = maximize(&region, &neg_e1, &zero, None).map_err(|e| sampler_error(e, &lift))?;
        let (hi, lo) = (far.value, -near.value);
        if hi > 0.0 && lo < 0.0 {
            let mu = lo + (hi - lo) * rng.gen::<f64>();
            let (end, len, z) = if mu >= 0.0 {
                (hi, mu, &far.point)
            } else {
                (lo, mu, &near.point)
            };
            let target = &lift + &map * z;
            lift = &lift + (target - &lift) * (len / end);
        }
        step += 1;
        if step > cfg.burn_in && (step - cfg.burn_in).is_multiple_of(thin) {
            out.push(lift.clone());
        }
    }
    Ok(out)
}

fn sampler_error(e: Error, at: &DVector<f64>) -> Error {
    Error::Internal(format!(
        "projected sampler lost its interior point at {:?}: {e}",
        at.as_slice()
    ))
}

/// The cylindrification of a body along an orthonormal set `V`: the
/// projected body on the complement times the coordinate interval of the
/// body along each `v`.
#[derive(Debug, Clone)]
pub struct Cylinder {
    directions: Vec<DVector<f64>>,
    intervals: Vec<(f64, f64)>,
}

impl Cylinder {
    pub fn new(body: &ConvexBody, basis: &DirectionBasis) -> Result<Self> {
        let mut intervals = Vec::with_capacity(basis.len());
        for v in basis.vectors() {
            let hi = body.support(v)?;
            let lo = -body.support(&-v)?;
            intervals.push((lo, hi));
        }
        Ok(Self {
            directions: basis.vectors().to_vec(),
            intervals,
        })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// Membership of `x` given a witness `lift` in the body with the same
    /// projection onto the complement of `V`.
    pub fn contains(&self, body: &ConvexBody, x: &DVector<f64>, lift: &DVector<f64>, tol: f64) -> bool {
        let mut diff = x - lift;
        for v in &self.directions {
            let c = v.dot(&diff);
            diff.axpy(-c, v, 1.0);
        }
        diff.norm() <= tol
            && body.contains(lift, tol)
            && self
                .directions
                .iter()
                .zip(&self.intervals)
                .all(|(v, &(lo, hi))| {
                    let c = v.dot(x);
                    c >= lo - tol && c <= hi + tol
                })
    }
}

/// Approximate centroid of `Cyl(body, V)`.
///
/// Along each `v` the coordinate is the midpoint of the body's interval;
/// on the complement it is the mean of the projected samples. `samples`
/// must come from [`projected_hit_and_run`] with the same basis.
pub fn centroid_from_samples(
    body: &ConvexBody,
    basis: &DirectionBasis,
    samples: &[DVector<f64>],
) -> Result<DVector<f64>> {
    let d = body.dim();
    let comp = orthonormal_complement(d, basis.vectors());
    if comp.ncols() > 0 && samples.is_empty() {
        return Err(Error::Internal("centroid needs at least one sample".into()));
    }
    let mut mean = DVector::zeros(d);
    for s in samples {
        mean += s;
    }
    if !samples.is_empty() {
        mean /= samples.len() as f64;
    }
    let mut c = &comp * (comp.transpose() * mean);
    let cyl = Cylinder::new(body, basis)?;
    for (v, &(lo, hi)) in basis.vectors().iter().zip(cyl.intervals()) {
        c.axpy(0.5 * (lo + hi), v, 1.0);
    }
    Ok(c)
}

pub fn centroid_cyl<R: Rng + ?Sized>(
    body: &ConvexBody,
    basis: &DirectionBasis,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<DVector<f64>> {
    let samples = projected_hit_and_run(body, basis, cfg, rng)?;
    centroid_from_samples(body, basis, &samples)
}
