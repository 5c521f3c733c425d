//! Interval Newton machinery for the gradient system `grad f = 0`.
//!
//! Certification uses the Krawczyk operator
//!
//! ```text
//! K(X) = m - Y g(m) + (I - Y J(X)) (X - m)
//! ```
//!
//! with `m` the midpoint of `X`, `J(X)` the interval Hessian and `Y` a float
//! approximation of `mid(J(X))^{-1}`. Every zero of `g` in `X` lies in
//! `K(X)`, and `K(X)` contained in the interior of `X` proves that `X` holds
//! exactly one zero.

use nalgebra::DMatrix;

use crate::interval::{Interval, IntervalBox};
use crate::polyring::{CompiledPoly, Polynomial};

/// `f`, its gradient and Hessian, compiled for float and interval evaluation.
#[derive(Clone, Debug)]
pub struct GradientSystem {
    f: CompiledPoly,
    grad: Vec<CompiledPoly>,
    hess: Vec<Vec<CompiledPoly>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum KrawczykOutcome {
    /// `K(X)` lies in the interior of `X`: exactly one zero in `X`.
    Unique(IntervalBox),
    /// `K(X)` misses `X`: no zero in `X`.
    Empty,
    /// `K(X) ∩ X`, which still holds every zero of `X`.
    Contracted(IntervalBox),
    /// The midpoint Jacobian could not be inverted.
    Failed,
}

impl GradientSystem {
    pub fn new(f: &Polynomial) -> Self {
        let grad = f.gradient();
        let hess = grad
            .iter()
            .map(|g| g.gradient().iter().map(CompiledPoly::new).collect())
            .collect();
        GradientSystem {
            f: CompiledPoly::new(f),
            grad: grad.iter().map(CompiledPoly::new).collect(),
            hess,
        }
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn value(&self) -> &CompiledPoly {
        &self.f
    }

    pub fn grad_interval(&self, b: &IntervalBox) -> Vec<Interval> {
        self.grad.iter().map(|g| g.eval_interval(b)).collect()
    }

    pub fn grad_f64(&self, x: &[f64]) -> Vec<f64> {
        self.grad.iter().map(|g| g.eval_f64(x)).collect()
    }

    pub fn hess_interval(&self, b: &IntervalBox) -> Vec<Vec<Interval>> {
        let n = self.dim();
        let mut h = vec![vec![Interval::ZERO; n]; n];
        for i in 0..n {
            for j in i..n {
                let v = self.hess[i][j].eval_interval(b);
                h[i][j] = v;
                h[j][i] = v;
            }
        }
        h
    }

    pub fn hess_f64(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            self.hess[a][b].eval_f64(x)
        })
    }

    /// True when some gradient component provably has no zero on `b`.
    pub fn gradient_excluded(&self, b: &IntervalBox) -> bool {
        self.grad.iter().any(|g| !g.eval_interval(b).contains_zero())
    }

    pub fn krawczyk(&self, x: &IntervalBox) -> KrawczykOutcome {
        let n = self.dim();
        let m = x.midpoint();
        let gm: Vec<Interval> = self
            .grad
            .iter()
            .map(|g| g.eval_point_interval(&m))
            .collect();
        let jac = self.hess_interval(x);
        let mid_j = DMatrix::from_fn(n, n, |i, j| jac[i][j].mid());
        let y = match mid_j.try_inverse() {
            Some(y) if y.iter().all(|v| v.is_finite()) => y,
            _ => return KrawczykOutcome::Failed,
        };
        let dx: Vec<Interval> = x
            .sides()
            .iter()
            .zip(&m)
            .map(|(s, &mi)| *s - Interval::point(mi))
            .collect();
        let mut k = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = Interval::point(m[i]);
            for j in 0..n {
                acc = acc - Interval::point(y[(i, j)]) * gm[j];
            }
            for j in 0..n {
                // (I - Y J)_{ij}
                let mut r = if i == j { Interval::ONE } else { Interval::ZERO };
                for l in 0..n {
                    r = r - Interval::point(y[(i, l)]) * jac[l][j];
                }
                acc = acc + r * dx[j];
            }
            k.push(acc);
        }
        let k = IntervalBox::new(k);
        if k.strictly_inside(x) {
            return KrawczykOutcome::Unique(k);
        }
        match k.intersect(x) {
            None => KrawczykOutcome::Empty,
            Some(c) => KrawczykOutcome::Contracted(c),
        }
    }

    /// Plain Newton iteration on the gradient from `x0`; returns the limit
    /// when the step size drops below roughly machine precision.
    pub fn newton_float(&self, x0: &[f64], max_iter: usize) -> Option<Vec<f64>> {
        let n = self.dim();
        let mut x = x0.to_vec();
        for _ in 0..max_iter {
            let g = nalgebra::DVector::from_vec(self.grad_f64(&x));
            let h = self.hess_f64(&x);
            let step = h.lu().solve(&g)?;
            let mut size = 0.0f64;
            let mut scale = 0.0f64;
            for i in 0..n {
                x[i] -= step[i];
                size = size.max(step[i].abs());
                scale = scale.max(x[i].abs());
            }
            if !x.iter().all(|v| v.is_finite()) {
                return None;
            }
            if size <= 1e-14 * (1.0 + scale) {
                return Some(x);
            }
        }
        None
    }

    /// Shrinks a box already known to hold a unique zero by iterating
    /// `X <- K(X) ∩ X` until the width stops decreasing.
    pub fn refine(&self, x: &IntervalBox) -> IntervalBox {
        let mut cur = x.clone();
        for _ in 0..200 {
            let w = cur.max_width();
            if w == 0.0 {
                break;
            }
            let next = match self.krawczyk(&cur) {
                KrawczykOutcome::Unique(k) => k.intersect(&cur).unwrap_or(k),
                KrawczykOutcome::Contracted(k) => k,
                KrawczykOutcome::Empty | KrawczykOutcome::Failed => break,
            };
            let stalled = next.max_width() >= w;
            cur = next;
            if stalled {
                break;
            }
        }
        cur
    }

    /// Mean-value enclosure of `f` over `b`, intersected with the direct
    /// interval evaluation.
    pub fn value_enclosure(&self, b: &IntervalBox) -> Interval {
        let m = b.midpoint();
        let mut mv = self.f.eval_point_interval(&m);
        let g = self.grad_interval(b);
        for ((gi, side), &mi) in g.iter().zip(b.sides()).zip(&m) {
            mv = mv + *gi * (*side - Interval::point(mi));
        }
        let direct = self.f.eval_interval(b);
        mv.intersect(&direct).unwrap_or(direct)
    }
}
