use nalgebra::{DMatrix, DVector};

use super::body::ConvexBody;
use crate::error::{Error, Result};

/// Orthonormal directions along which the body is known to be thin.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionBasis {
    dim: usize,
    delta: f64,
    vectors: Vec<DVector<f64>>,
}

impl DirectionBasis {
    pub fn new(dim: usize, delta: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::Input(format!("thinness threshold must be positive, got {delta}")));
        }
        Ok(Self {
            dim,
            delta,
            vectors: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.vectors.len() == self.dim
    }

    /// Adds `v` after orthogonalizing it against the current set.
    pub fn push(&mut self, v: DVector<f64>) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::Input(format!(
                "direction has {} entries, expected {}",
                v.len(),
                self.dim
            )));
        }
        let mut r = v;
        // two passes keep orthogonality near machine precision
        for _ in 0..2 {
            for q in &self.vectors {
                let c = q.dot(&r);
                r.axpy(-c, q, 1.0);
            }
        }
        let n = r.norm();
        if !(n > 1e-6) {
            return Err(Error::Input("direction lies in the span of the basis".into()));
        }
        self.vectors.push(r / n);
        Ok(())
    }
}

/// Orthonormal basis (as columns) of the complement of `vs` in `R^dim`.
pub fn orthonormal_complement(dim: usize, vs: &[DVector<f64>]) -> DMatrix<f64> {
    let mut basis: Vec<DVector<f64>> = vs.to_vec();
    let mut out = Vec::new();
    while basis.len() < dim {
        // the standard vector with the largest residual is the best conditioned
        let mut best: Option<DVector<f64>> = None;
        for i in 0..dim {
            let mut r = DVector::zeros(dim);
            r[i] = 1.0;
            for _ in 0..2 {
                for q in &basis {
                    let c = q.dot(&r);
                    r.axpy(-c, q, 1.0);
                }
            }
            if best.as_ref().is_none_or(|b| r.norm() > b.norm()) {
                best = Some(r);
            }
        }
        let r = best.expect("dim > basis.len() leaves a candidate");
        let q = &r / r.norm();
        basis.push(q.clone());
        out.push(q);
    }
    if out.is_empty() {
        DMatrix::zeros(dim, 0)
    } else {
        DMatrix::from_columns(&out)
    }
}

fn smallest_eigenvector(m: &DMatrix<f64>) -> DVector<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let i = eig.eigenvalues.imin();
    eig.eigenvectors.column(i).into_owned()
}

/// Greedily extends `basis` with directions of the complement along which
/// the body's width is at most `basis.delta()`.
///
/// Candidates are the thinnest axis of the body's Dikin ellipsoid and of
/// the sample covariance, both restricted to the complement; each is
/// accepted only after its exact width is checked. Returns how many
/// directions were added.
pub fn update_small_directions(
    body: &ConvexBody,
    basis: &mut DirectionBasis,
    samples: &[DVector<f64>],
) -> Result<usize> {
    let mut added = 0;
    'grow: while !basis.is_full() {
        let comp = orthonormal_complement(basis.dim(), basis.vectors());
        let mut candidates = Vec::new();
        if comp.ncols() == 1 {
            candidates.push(comp.column(0).into_owned());
        } else {
            let shape = comp.transpose() * body.shape() * &comp;
            candidates.push(&comp * smallest_eigenvector(&shape));
            if samples.len() > comp.ncols() {
                let proj: Vec<DVector<f64>> = samples.iter().map(|s| comp.transpose() * s).collect();
                let mean = proj.iter().fold(DVector::zeros(comp.ncols()), |acc, p| acc + p)
                    / proj.len() as f64;
                let mut cov = DMatrix::zeros(comp.ncols(), comp.ncols());
                for p in &proj {
                    let c = p - &mean;
                    cov.ger(1.0, &c, &c, 1.0);
                }
                candidates.push(&comp * smallest_eigenvector(&cov));
            }
        }
        for c in candidates {
            let w = &c / c.norm();
            if body.projected_diameter(&w)? <= basis.delta() {
                basis.push(w)?;
                added += 1;
                continue 'grow;
            }
        }
        break;
    }
    Ok(added)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::KeepSide;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(x)
    }

    #[test]
    fn fresh_ball_has_no_thin_direction() {
        let body = ConvexBody::ball(3);
        let mut basis = DirectionBasis::new(3, 1e-6).unwrap();
        assert_eq!(update_small_directions(&body, &mut basis, &[]).unwrap(), 0);
        assert!(basis.is_empty());
    }

    #[test]
    fn slab_direction_is_found() {
        let delta = 1e-6;
        let e1 = v(&[1.0, 0.0, 0.0]);
        let body = ConvexBody::ball(3)
            .cut(&e1, 0.2 + delta / 4.0, KeepSide::Below)
            .unwrap()
            .cut(&e1, 0.2 - delta / 4.0, KeepSide::Above)
            .unwrap();
        let mut basis = DirectionBasis::new(3, delta).unwrap();
        assert_eq!(update_small_directions(&body, &mut basis, &[]).unwrap(), 1);
        let found = &basis.vectors()[0];
        assert!((found[0].abs() - 1.0).abs() < 1e-6, "{found}");
        for w in basis.vectors() {
            assert!(body.projected_diameter(w).unwrap() <= delta);
        }
    }

    #[test]
    fn complement_is_orthonormal() {
        let vs = vec![v(&[0.6, 0.8, 0.0])];
        let c = orthonormal_complement(3, &vs);
        assert_eq!(c.ncols(), 2);
        let gram = c.transpose() * &c;
        assert!((gram - DMatrix::identity(2, 2)).norm() < 1e-12);
        assert!((c.transpose() * &vs[0]).norm() < 1e-12);
    }

    #[test]
    fn push_orthogonalizes() {
        let mut b = DirectionBasis::new(2, 0.1).unwrap();
        b.push(v(&[1.0, 0.0])).unwrap();
        b.push(v(&[1.0, 1.0])).unwrap();
        assert!(b.vectors()[0].dot(&b.vectors()[1]).abs() < 1e-10);
        assert!(b.push(v(&[0.3, 0.3])).is_err());
    }
}
