//! Closed floating-point intervals with outward rounding.
//!
//! Every operation returns an interval that encloses the exact real result.
//! Rounding direction is recovered from error-free transformations (TwoSum
//! for addition, FMA for products and quotients), so results that are exact
//! in floating point stay degenerate instead of being widened by an ulp.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
pub(crate) fn add_down(a: f64, b: f64) -> f64 {
    let (s, e) = two_sum(a, b);
    if !s.is_finite() {
        return if s.is_nan() { f64::NEG_INFINITY } else { s };
    }
    if e < 0.0 {
        s.next_down()
    } else {
        s
    }
}

#[inline]
pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    let (s, e) = two_sum(a, b);
    if !s.is_finite() {
        return if s.is_nan() { f64::INFINITY } else { s };
    }
    if e > 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[inline]
pub(crate) fn mul_down(a: f64, b: f64) -> f64 {
    let p = a * b;
    if !p.is_finite() {
        return if p.is_nan() { f64::NEG_INFINITY } else { p };
    }
    let e = a.mul_add(b, -p);
    if e < 0.0 {
        p.next_down()
    } else {
        p
    }
}

#[inline]
pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    if !p.is_finite() {
        return if p.is_nan() { f64::INFINITY } else { p };
    }
    let e = a.mul_add(b, -p);
    if e > 0.0 {
        p.next_up()
    } else {
        p
    }
}

#[inline]
fn div_down(a: f64, b: f64) -> f64 {
    let q = a / b;
    if !q.is_finite() {
        return if q.is_nan() { f64::NEG_INFINITY } else { q };
    }
    // r = a - q*b exactly; true quotient is q + r/b.
    let r = (-q).mul_add(b, a);
    if r != 0.0 && (r < 0.0) != (b < 0.0) {
        q.next_down()
    } else {
        q
    }
}

#[inline]
fn div_up(a: f64, b: f64) -> f64 {
    let q = a / b;
    if !q.is_finite() {
        return if q.is_nan() { f64::INFINITY } else { q };
    }
    let r = (-q).mul_add(b, a);
    if r != 0.0 && (r > 0.0) == (b > 0.0) {
        q.next_up()
    } else {
        q
    }
}

/// Power of a non-negative float, rounded down.
fn pow_down(a: f64, k: u32) -> f64 {
    debug_assert!(a >= 0.0);
    (0..k).fold(1.0, |acc, _| mul_down(acc, a))
}

/// Power of a non-negative float, rounded up.
fn pow_up(a: f64, k: u32) -> f64 {
    debug_assert!(a >= 0.0);
    (0..k).fold(1.0, |acc, _| mul_up(acc, a))
}

/// A closed interval `[lo, hi]` of reals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 2]", from = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

impl From<[f64; 2]> for Interval {
    fn from(v: [f64; 2]) -> Self {
        Interval::new(v[0], v[1])
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "interval bounds out of order: [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Symmetric interval `[-r, r]`.
    pub fn symmetric(r: f64) -> Self {
        Interval::new(-r.abs(), r.abs())
    }

    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    /// Largest absolute value in the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value in the interval.
    pub fn mig(&self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    /// Whether `other` lies in the interior of `self`.
    pub fn strictly_contains(&self, other: &Interval) -> bool {
        self.lo < other.lo && other.hi < self.hi
    }

    pub fn subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.lo > 0.0
    }

    pub fn is_negative(&self) -> bool {
        self.hi < 0.0
    }

    /// Integer power with the even-power bound: `[-1,2]^2 = [0,4]`.
    pub fn powi(&self, k: u32) -> Interval {
        match k {
            0 => Interval::ONE,
            1 => *self,
            _ if k % 2 == 0 => {
                if self.contains_zero() {
                    Interval::new(0.0, pow_up(self.mag(), k))
                } else {
                    let (a, b) = (self.mig(), self.mag());
                    Interval::new(pow_down(a, k), pow_up(b, k))
                }
            }
            _ => {
                let lo = if self.lo >= 0.0 {
                    pow_down(self.lo, k)
                } else {
                    -pow_up(-self.lo, k)
                };
                let hi = if self.hi >= 0.0 {
                    pow_up(self.hi, k)
                } else {
                    -pow_down(-self.hi, k)
                };
                Interval::new(lo, hi)
            }
        }
    }

    pub fn sqr(&self) -> Interval {
        self.powi(2)
    }

    /// Quotient; `None` when the divisor contains zero.
    pub fn checked_div(&self, rhs: &Interval) -> Option<Interval> {
        if rhs.contains_zero() {
            return None;
        }
        let cands_lo = [
            div_down(self.lo, rhs.lo),
            div_down(self.lo, rhs.hi),
            div_down(self.hi, rhs.lo),
            div_down(self.hi, rhs.hi),
        ];
        let cands_hi = [
            div_up(self.lo, rhs.lo),
            div_up(self.lo, rhs.hi),
            div_up(self.hi, rhs.lo),
            div_up(self.hi, rhs.hi),
        ];
        Some(Interval::new(
            cands_lo.iter().copied().fold(f64::INFINITY, f64::min),
            cands_hi.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ))
    }

    /// Multiplies by a float scalar.
    pub fn scale(&self, c: f64) -> Interval {
        *self * Interval::point(c)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: add_down(self.lo, rhs.lo),
            hi: add_up(self.hi, rhs.hi),
        }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        self + (-rhs)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        let (a, b, c, d) = (self.lo, self.hi, rhs.lo, rhs.hi);
        let lo = mul_down(a, c)
            .min(mul_down(a, d))
            .min(mul_down(b, c))
            .min(mul_down(b, d));
        let hi = mul_up(a, c)
            .max(mul_up(a, d))
            .max(mul_up(b, c))
            .max(mul_up(b, d));
        Interval { lo, hi }
    }
}

/// Axis-aligned box, one interval per variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalBox(pub Vec<Interval>);

impl IntervalBox {
    pub fn new(sides: Vec<Interval>) -> Self {
        IntervalBox(sides)
    }

    /// The cube `[-r, r]^dim`.
    pub fn cube(dim: usize, r: f64) -> Self {
        IntervalBox(vec![Interval::symmetric(r); dim])
    }

    pub fn from_point(p: &[f64]) -> Self {
        IntervalBox(p.iter().map(|&x| Interval::point(x)).collect())
    }

    /// Box `p ± r` in every coordinate.
    pub fn around(p: &[f64], r: f64) -> Self {
        IntervalBox(
            p.iter()
                .map(|&x| Interval::new(add_down(x, -r), add_up(x, r)))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn sides(&self) -> &[Interval] {
        &self.0
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.0.iter().map(Interval::mid).collect()
    }

    pub fn max_width(&self) -> f64 {
        self.0.iter().map(Interval::width).fold(0.0, f64::max)
    }

    pub fn widest_axis(&self) -> usize {
        let mut best = 0;
        for (i, s) in self.0.iter().enumerate() {
            if s.width() > self.0[best].width() {
                best = i;
            }
        }
        best
    }

    /// Splits along the widest axis at its midpoint.
    pub fn bisect(&self) -> (IntervalBox, IntervalBox) {
        let axis = self.widest_axis();
        let side = self.0[axis];
        let m = side.mid();
        let mut left = self.clone();
        let mut right = self.clone();
        left.0[axis] = Interval::new(side.lo, m);
        right.0[axis] = Interval::new(m, side.hi);
        (left, right)
    }

    pub fn contains_point(&self, p: &[f64]) -> bool {
        self.0.iter().zip(p).all(|(s, &x)| s.contains(x))
    }

    pub fn subset_of(&self, other: &IntervalBox) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a.subset_of(b))
    }

    pub fn strictly_inside(&self, other: &IntervalBox) -> bool {
        self.0
            .iter()
            .zip(&other.0)
            .all(|(a, b)| b.strictly_contains(a))
    }

    pub fn intersects(&self, other: &IntervalBox) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a.intersects(b))
    }

    pub fn intersect(&self, other: &IntervalBox) -> Option<IntervalBox> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.intersect(b))
            .collect::<Option<Vec<_>>>()
            .map(IntervalBox)
    }

    pub fn hull(&self, other: &IntervalBox) -> IntervalBox {
        IntervalBox(self.0.iter().zip(&other.0).map(|(a, b)| a.hull(b)).collect())
    }

    /// Enclosure of `|x|^2` over the box.
    pub fn norm_sq(&self) -> Interval {
        self.0
            .iter()
            .fold(Interval::ZERO, |acc, s| acc + s.sqr())
    }
}
