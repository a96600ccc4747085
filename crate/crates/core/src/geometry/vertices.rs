//! Vertex enumeration for small polytopes.
//!
//! Once every cut is in place and the polytope sits strictly inside the unit
//! ball, the body is the polytope itself and support queries reduce to a max
//! over its vertices. Enumeration is brute force over `d`-subsets of the
//! constraints, so it is only attempted when that is cheap.

use nalgebra::{DMatrix, DVector};

/// Largest number of `d`-subsets tried.
const MAX_SUBSETS: u64 = 200_000;
/// Feasibility slack for computed vertices; errs towards keeping them.
pub(crate) const VERTEX_TOL: f64 = 1e-9;

fn binomial(n: usize, k: usize) -> u64 {
    let mut acc: u64 = 1;
    for i in 0..k as u64 {
        acc = acc.saturating_mul(n as u64 - i) / (i + 1);
    }
    acc
}

fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn orthonormal_rows(rows: &DMatrix<f64>, pick: &[usize]) -> Vec<DVector<f64>> {
    let mut q: Vec<DVector<f64>> = Vec::new();
    for &i in pick {
        let mut r = rows.row(i).transpose();
        for _ in 0..2 {
            for b in &q {
                let c = b.dot(&r);
                r.axpy(-c, b, 1.0);
            }
        }
        let n = r.norm();
        if n > 1e-9 {
            q.push(r / n);
        }
    }
    q
}

/// Whether `{x : N x <= 0}` is `{0}`.
fn bounded(normals: &DMatrix<f64>) -> bool {
    let (m, d) = normals.shape();
    let all: Vec<usize> = (0..m).collect();
    if orthonormal_rows(normals, &all).len() < d {
        return false;
    }
    let mut ok = true;
    for_each_subset(m, d - 1, |s| {
        if !ok {
            return;
        }
        let q = orthonormal_rows(normals, s);
        if q.len() != d - 1 {
            return;
        }
        let r = super::directions::orthonormal_complement(d, &q).column(0).into_owned();
        let nr = normals * &r;
        if nr.iter().all(|&x| x <= 1e-12) || nr.iter().all(|&x| x >= -1e-12) {
            ok = false;
        }
    });
    ok
}

/// Vertices of `{x : N x <= b}` when it is bounded, lies strictly inside the
/// unit ball and enumeration is affordable.
pub(crate) fn polytope_vertices(normals: &DMatrix<f64>, offsets: &DVector<f64>) -> Option<Vec<DVector<f64>>> {
    let (m, d) = normals.shape();
    if m <= d || binomial(m, d) > MAX_SUBSETS || !bounded(normals) {
        return None;
    }
    let mut verts = Vec::new();
    let mut outside = false;
    for_each_subset(m, d, |s| {
        if outside {
            return;
        }
        let a = normals.select_rows(s);
        let b = offsets.select_rows(s);
        let Some(x) = a.lu().solve(&b) else {
            return;
        };
        if !x.iter().all(|v| v.is_finite()) {
            return;
        }
        let slack = offsets - normals * &x;
        if slack.iter().all(|&g| g >= -VERTEX_TOL) {
            if x.norm() > 1.0 - 1e-9 {
                outside = true;
            }
            verts.push(x);
        }
    });
    if outside || verts.len() <= d {
        None
    } else {
        Some(verts)
    }
}
