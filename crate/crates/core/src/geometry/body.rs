use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::solver::{analytic_center, maximize, Region};
use super::vertices::{polytope_vertices, VERTEX_TOL};
use crate::error::{Error, Result};

/// Unit-norm tolerance accepted for query directions.
pub const UNIT_TOL: f64 = 1e-9;

/// `<s, normal> <= offset` with `||normal|| = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// Which side of `<s, w> = b` a cut keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeepSide {
    /// `<s, w> <= b`
    Below,
    /// `<s, w> >= b`
    Above,
}

/// Unit ball intersected with finitely many halfspaces, with a cached
/// strictly interior point (the analytic center) and the inverse barrier
/// Hessian there, which describes the body's shape.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    dim: usize,
    normals: DMatrix<f64>,
    offsets: DVector<f64>,
    center: DVector<f64>,
    shape: DMatrix<f64>,
    /// Present when the body is a polytope strictly inside the ball.
    vertices: Option<Vec<DVector<f64>>>,
}

#[derive(Serialize, Deserialize)]
struct BodyDump {
    dim: usize,
    halfspaces: Vec<Halfspace>,
}

fn extreme_vertex(verts: &[DVector<f64>], w: &DVector<f64>) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, v) in verts.iter().enumerate() {
        let x = v.dot(w);
        if x > best.0 {
            best = (x, i);
        }
    }
    best
}

fn check_unit(w: &DVector<f64>) -> Result<()> {
    let n = w.norm();
    if (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::Input(format!("direction must be a unit vector, norm is {n}")));
    }
    Ok(())
}

impl ConvexBody {
    /// The closed unit ball in dimension `dim`.
    pub fn ball(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self {
            dim,
            normals: DMatrix::zeros(0, dim),
            offsets: DVector::zeros(0),
            center: DVector::zeros(dim),
            shape: DMatrix::identity(dim, dim) * 0.5,
            vertices: None,
        }
    }

    /// Ball cut successively by the given halfspaces.
    pub fn from_halfspaces(dim: usize, halfspaces: &[Halfspace]) -> Result<Self> {
        let mut body = Self::ball(dim);
        for h in halfspaces {
            if h.normal.len() != dim {
                return Err(Error::Input(format!(
                    "halfspace normal has {} entries, expected {dim}",
                    h.normal.len()
                )));
            }
            let w = DVector::from_row_slice(&h.normal);
            let n = w.norm();
            if !(n > 0.0) {
                return Err(Error::Input("halfspace normal is zero".into()));
            }
            body = body.cut(&(w / n), h.offset / n, KeepSide::Below)?;
        }
        Ok(body)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_halfspaces(&self) -> usize {
        self.offsets.len()
    }

    pub fn halfspaces(&self) -> Vec<Halfspace> {
        (0..self.num_halfspaces())
            .map(|i| Halfspace {
                normal: self.normals.row(i).iter().copied().collect(),
                offset: self.offsets[i],
            })
            .collect()
    }

    /// A strictly interior point (analytic center of the barrier).
    pub fn interior_point(&self) -> &DVector<f64> {
        &self.center
    }

    /// Inverse barrier Hessian at the analytic center. Its ellipsoid sits
    /// inside the body and, scaled up, covers it.
    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    pub(crate) fn normals(&self) -> &DMatrix<f64> {
        &self.normals
    }

    pub(crate) fn offsets(&self) -> &DVector<f64> {
        &self.offsets
    }

    fn region(&self) -> Region<'_> {
        Region {
            rows: &self.normals,
            rhs: &self.offsets,
            offset: None,
            map: None,
        }
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        x.norm() <= 1.0 + tol
            && (0..self.num_halfspaces())
                .all(|i| self.normals.row(i).transpose().dot(x) <= self.offsets[i] + tol)
    }

    /// `max_{s in body} <s, w>` for a unit `w`, with a strictly interior
    /// point attaining it up to the solver gap.
    pub fn support_point(&self, w: &DVector<f64>) -> Result<(f64, DVector<f64>)> {
        check_unit(w)?;
        if let Some(verts) = &self.vertices {
            let (value, at) = extreme_vertex(verts, w);
            return Ok((value, verts[at].clone()));
        }
        let opt = maximize(&self.region(), w, &self.center, None)?;
        Ok((opt.value, opt.point))
    }

    pub fn support(&self, w: &DVector<f64>) -> Result<f64> {
        if let Some(verts) = &self.vertices {
            check_unit(w)?;
            return Ok(extreme_vertex(verts, w).0);
        }
        Ok(self.support_point(w)?.0)
    }

    /// Vertices, when the body is a polytope strictly inside the ball.
    pub fn vertices(&self) -> Option<&[DVector<f64>]> {
        self.vertices.as_deref()
    }

    /// Width along `w`: `support(w) + support(-w)`.
    pub fn projected_diameter(&self, w: &DVector<f64>) -> Result<f64> {
        let neg = -w;
        Ok((self.support(w)? + self.support(&neg)?).max(0.0))
    }

    /// Intersects with `<s, w> <= b` or `<s, w> >= b`.
    pub fn cut(&self, w: &DVector<f64>, b: f64, side: KeepSide) -> Result<ConvexBody> {
        let n = w.norm();
        if w.len() != self.dim || !(n > 0.0) || !b.is_finite() {
            return Err(Error::Input("cut needs a nonzero normal of matching dimension".into()));
        }
        let (normal, offset) = match side {
            KeepSide::Below => (w / n, b / n),
            KeepSide::Above => (-w / n, -b / n),
        };
        let start = self.strict_point_below(&normal, offset)?;

        let k = self.num_halfspaces();
        let mut normals = self.normals.clone().insert_row(k, 0.0);
        normals.set_row(k, &normal.transpose());
        let offsets = self.offsets.clone().insert_row(k, offset);
        let mut body = Self::assemble(self.dim, normals, offsets, &start)?;
        if body.num_halfspaces() > 64 * self.dim {
            body = body.prune_redundant()?;
        }
        Ok(body)
    }

    /// A point of the body's interior with `<z, normal> < offset`.
    fn strict_point_below(&self, normal: &DVector<f64>, offset: f64) -> Result<DVector<f64>> {
        let at_center = normal.dot(&self.center);
        if at_center < offset {
            return Ok(self.center.clone());
        }
        let (lowest, point) = match &self.vertices {
            Some(verts) => {
                let (value, at) = extreme_vertex(verts, &-normal);
                (-value, verts[at].clone())
            }
            None => {
                let opt = maximize(&self.region(), &-normal, &self.center, Some(-offset + 1e-9))?;
                (-opt.value, opt.point)
            }
        };
        if !(lowest < offset - 1e-13) {
            return Err(Error::Protocol(format!(
                "cut <s, n> <= {offset} leaves no interior (body minimum is {lowest})"
            )));
        }
        // walk from the center towards the minimizer, stopping halfway past the plane
        let goal = offset - 0.5 * (offset - lowest).min(1e-3);
        let frac = (at_center - goal) / (at_center - lowest);
        Ok(&self.center + (point - &self.center) * frac.clamp(0.0, 1.0))
    }

    fn assemble(
        dim: usize,
        mut normals: DMatrix<f64>,
        mut offsets: DVector<f64>,
        start: &DVector<f64>,
    ) -> Result<ConvexBody> {
        let vertices = polytope_vertices(&normals, &offsets);
        if let Some(verts) = &vertices {
            // a bounded polytope only needs the halfspaces tight at a vertex
            let keep: Vec<usize> = (0..offsets.len())
                .filter(|&i| {
                    let n = normals.row(i).transpose();
                    verts.iter().any(|v| offsets[i] - n.dot(v) <= VERTEX_TOL)
                })
                .collect();
            normals = normals.select_rows(&keep);
            offsets = offsets.select_rows(&keep);
        }
        let region = Region {
            rows: &normals,
            rhs: &offsets,
            offset: None,
            map: None,
        };
        if !region.is_strictly_feasible(start) {
            return Err(Error::Internal("interior start is not strictly feasible".into()));
        }
        let center = analytic_center(&region, start)?;
        let hess = region.hessian(&center);
        let shape = hess
            .try_inverse()
            .ok_or_else(|| Error::Internal("barrier Hessian is singular".into()))?;
        Ok(ConvexBody {
            dim,
            normals,
            offsets,
            center,
            shape,
            vertices,
        })
    }

    /// Drops halfspaces that do not touch the body.
    pub fn prune_redundant(&self) -> Result<ConvexBody> {
        let mut keep: Vec<usize> = (0..self.num_halfspaces()).collect();
        let mut i = 0;
        while i < keep.len() {
            let others: Vec<usize> = keep.iter().copied().filter(|&j| j != keep[i]).collect();
            let rows = self.normals.select_rows(&others);
            let rhs = self.offsets.select_rows(&others);
            let region = Region {
                rows: &rows,
                rhs: &rhs,
                offset: None,
                map: None,
            };
            let normal = self.normals.row(keep[i]).transpose();
            let opt = maximize(&region, &normal, &self.center, None)?;
            if opt.value <= self.offsets[keep[i]] + 1e-12 {
                keep.remove(i);
            } else {
                i += 1;
            }
        }
        Self::assemble(
            self.dim,
            self.normals.select_rows(&keep),
            self.offsets.select_rows(&keep),
            &self.center,
        )
    }

    /// Parameter range `[lo, hi]` of the chord `x + lambda u` through an
    /// interior point `x`.
    pub fn chord(&self, x: &DVector<f64>, u: &DVector<f64>) -> (f64, f64) {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        let uu = u.norm_squared();
        let xu = x.dot(u);
        let xx = x.norm_squared();
        let disc = (xu * xu - uu * (xx - 1.0)).max(0.0).sqrt();
        hi = hi.min((-xu + disc) / uu);
        lo = lo.max((-xu - disc) / uu);
        let nu = &self.normals * u;
        let nx = &self.normals * x;
        for i in 0..self.num_halfspaces() {
            let slack = self.offsets[i] - nx[i];
            if nu[i] > 0.0 {
                hi = hi.min(slack / nu[i]);
            } else if nu[i] < 0.0 {
                lo = lo.max(slack / nu[i]);
            }
        }
        (lo, hi)
    }

    /// JSON dump of the halfspaces for replay.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&BodyDump {
            dim: self.dim,
            halfspaces: self.halfspaces(),
        })
        .expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dump: BodyDump = serde_json::from_str(text).map_err(|e| {
            Error::Input(format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        Self::from_halfspaces(dump.dim, &dump.halfspaces)
    }
}
