//! Certified inertia of interval symmetric matrices.
//!
//! The midpoint matrix is diagonalised in floating point; the resulting
//! eigenvector matrix `Q` is used as a congruence preconditioner, and an
//! interval LDL^T factorisation (no pivoting) of `Q^T H Q` is then carried
//! out. If every interval pivot excludes zero, each real symmetric matrix in
//! `H` is nonsingular and has as many negative eigenvalues as there are
//! negative pivots (Sylvester's law of inertia, `Q` being certified
//! nonsingular).

use nalgebra::{DMatrix, SymmetricEigen};

use crate::interval::Interval;

pub type IntervalMatrix = Vec<Vec<Interval>>;

/// Number of negative eigenvalues shared by every symmetric matrix in `h`,
/// or `None` when some pivot interval straddles zero.
pub fn certified_negative_count(h: &IntervalMatrix) -> Option<usize> {
    let n = h.len();
    if n == 0 {
        return Some(0);
    }
    let mid = DMatrix::from_fn(n, n, |i, j| 0.5 * (h[i][j].mid() + h[j][i].mid()));
    let q = SymmetricEigen::new(mid).eigenvectors;
    if !q.iter().all(|v| v.is_finite()) || !certify_nonsingular(&q) {
        return None;
    }
    let b = congruence(h, &q);
    interval_ldlt_negatives(&b)
}

/// `Q^T Q` strictly diagonally dominant with positive diagonal implies `Q`
/// nonsingular.
fn certify_nonsingular(q: &DMatrix<f64>) -> bool {
    let n = q.nrows();
    let qi = |i: usize, j: usize| Interval::point(q[(i, j)]);
    for i in 0..n {
        let mut diag = Interval::ZERO;
        let mut off = 0.0f64;
        for j in 0..n {
            let mut g = Interval::ZERO;
            for k in 0..n {
                g = g + qi(k, i) * qi(k, j);
            }
            if i == j {
                diag = g;
            } else {
                off = crate::interval::add_up(off, g.mag());
            }
        }
        if !(diag.lo > off) {
            return false;
        }
    }
    true
}

fn congruence(h: &IntervalMatrix, q: &DMatrix<f64>) -> IntervalMatrix {
    let n = h.len();
    let qi = |i: usize, j: usize| Interval::point(q[(i, j)]);
    // HQ
    let mut hq = vec![vec![Interval::ZERO; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Interval::ZERO;
            for k in 0..n {
                acc = acc + h[i][k] * qi(k, j);
            }
            hq[i][j] = acc;
        }
    }
    let mut out = vec![vec![Interval::ZERO; n]; n];
    for i in 0..n {
        for j in i..n {
            let mut acc = Interval::ZERO;
            for k in 0..n {
                acc = acc + qi(k, i) * hq[k][j];
            }
            out[i][j] = acc;
        }
    }
    // lower triangle mirrors the upper one
    for i in 0..n {
        for j in 0..i {
            out[i][j] = out[j][i];
        }
    }
    out
}

/// Interval LDL^T without pivoting; counts negative pivots.
pub fn interval_ldlt_negatives(a: &IntervalMatrix) -> Option<usize> {
    let n = a.len();
    let mut l = vec![vec![Interval::ZERO; n]; n];
    let mut d = vec![Interval::ZERO; n];
    for j in 0..n {
        let mut dj = a[j][j];
        for k in 0..j {
            dj = dj - l[j][k] * (l[j][k] * d[k]);
        }
        if dj.contains_zero() {
            return None;
        }
        d[j] = dj;
        for i in (j + 1)..n {
            let mut s = a[i][j];
            for k in 0..j {
                s = s - l[i][k] * (l[j][k] * d[k]);
            }
            l[i][j] = s.checked_div(&dj)?;
        }
    }
    Some(d.iter().filter(|p| p.is_negative()).count())
}
