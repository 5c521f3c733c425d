use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::PolyError;
use crate::interval::{Interval, IntervalBox};

/// Largest number of variables a polynomial may carry (four space variables
/// plus one parameter).
pub const MAX_VARS: usize = 5;

pub type Exponents = Vec<u32>;

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are kept in a `BTreeMap` keyed by exponent vector so iteration order
/// (and hence every derived float computation) is deterministic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Exponents, BigRational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables supported");
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Polynomial::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut e = vec![0; nvars];
        e[i] = 1;
        Polynomial::monomial(e, BigRational::one())
    }

    pub fn monomial(exps: Exponents, c: BigRational) -> Self {
        let mut p = Polynomial::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing
    /// repeated monomials.
    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (Exponents, BigRational)>,
    ) -> Result<Self, PolyError> {
        if nvars > MAX_VARS {
            return Err(PolyError::TooManyVariables(nvars));
        }
        let mut p = Polynomial::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(PolyError::DimensionMismatch {
                    expected: nvars,
                    got: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, exps: Exponents, c: BigRational) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exps: &[u32]) -> BigRational {
        self.terms.get(exps).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coefficient(&vec![0; self.nvars])
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_constant(&self) -> bool {
        self.total_degree().is_none_or(|d| d == 0)
    }

    /// True when every term has total degree at most one.
    pub fn is_affine(&self) -> bool {
        self.total_degree().is_none_or(|d| d <= 1)
    }

    /// Variables that occur with a positive exponent.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&i| self.terms.keys().any(|e| e[i] > 0))
            .collect()
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, a)| (e.clone(), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::constant(self.nvars, BigRational::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Polynomial {
        assert!(i < self.nvars);
        let mut out = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c * BigRational::from_integer(BigInt::from(e[i])));
        }
        out
    }

    pub fn gradient(&self) -> Vec<Polynomial> {
        (0..self.nvars).map(|i| self.derivative(i)).collect()
    }

    /// Matrix of second partials; entry `(i, j)` is `d^2 p / dx_i dx_j`.
    pub fn hessian(&self) -> Vec<Vec<Polynomial>> {
        let grad = self.gradient();
        (0..self.nvars)
            .map(|i| {
                (0..self.nvars)
                    .map(|j| {
                        if j < i {
                            // symmetric: reuse the mixed partial in the order j, i
                            grad[j].derivative(i)
                        } else {
                            grad[i].derivative(j)
                        }
                    })
                    .collect()
            })
            .collect()
    }

    fn check_dim(&self, got: usize) -> Result<(), PolyError> {
        if got != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                got,
            });
        }
        Ok(())
    }

    /// Exact value at a rational point.
    pub fn evaluate(&self, point: &[BigRational]) -> Result<BigRational, PolyError> {
        self.check_dim(point.len())?;
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Value at a float point, computed exactly and rounded once.
    pub fn evaluate_rounded(&self, point: &[f64]) -> Result<f64, PolyError> {
        let exact: Vec<BigRational> = point
            .iter()
            .map(|&x| BigRational::from_float(x).ok_or(PolyError::NonFinite))
            .collect::<Result<_, _>>()?;
        let v = self.evaluate(&exact)?;
        Ok(v.to_f64().unwrap_or(f64::NAN))
    }

    /// Enclosure of the range over a box, term by term with power-aware
    /// bounds.
    pub fn interval_evaluate(&self, b: &IntervalBox) -> Result<Interval, PolyError> {
        self.check_dim(b.dim())?;
        Ok(CompiledPoly::new(self).eval_interval(b))
    }

    /// Substitutes the trailing `values.len()` variables, returning a
    /// polynomial in the leading ones.
    pub fn substitute_trailing(&self, values: &[BigRational]) -> Result<Polynomial, PolyError> {
        let k = values.len();
        if k > self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                got: k,
            });
        }
        let keep = self.nvars - k;
        let mut out = Polynomial::zero(keep);
        for (e, c) in &self.terms {
            let mut coef = c.clone();
            for (v, &p) in values.iter().zip(&e[keep..]) {
                if p > 0 {
                    coef *= num_traits::pow(v.clone(), p as usize);
                }
            }
            out.add_term(e[..keep].to_vec(), coef);
        }
        Ok(out)
    }

    /// Reinterprets the polynomial in `nvars` variables by appending unused
    /// trailing variables.
    pub fn extend_vars(&self, nvars: usize) -> Polynomial {
        assert!(nvars >= self.nvars && nvars <= MAX_VARS);
        Polynomial {
            nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e2 = e.clone();
                    e2.resize(nvars, 0);
                    (e2, c.clone())
                })
                .collect(),
        }
    }

    /// Renders with the given variable names, e.g. `y^2 - x^3 - 3/10*x`.
    pub fn display_with(&self, names: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        // highest total degree first reads more naturally
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        for (idx, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    let name = names.get(i).copied().unwrap_or("?");
                    if k == 1 {
                        name.to_string()
                    } else {
                        format!("{name}^{k}")
                    }
                })
                .collect();
            if mono.is_empty() {
                out.push_str(&a.to_string());
            } else {
                if !a.is_one() {
                    out.push_str(&a.to_string());
                    out.push('*');
                }
                out.push_str(&mono.join("*"));
            }
        }
        out
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        write!(f, "Polynomial({})", self.display_with(&refs))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = Polynomial::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

/// Tightest float interval around a rational.
pub fn rational_enclosure(c: &BigRational) -> Interval {
    let approx = c.to_f64().unwrap_or(0.0);
    if !approx.is_finite() {
        return Interval::new(f64::NEG_INFINITY, f64::INFINITY);
    }
    let as_rat = |x: f64| BigRational::from_float(x).expect("finite float");
    let mut lo = approx;
    while as_rat(lo) > *c {
        lo = lo.next_down();
    }
    let mut hi = approx;
    while as_rat(hi) < *c {
        hi = hi.next_up();
    }
    Interval::new(lo, hi)
}

/// Float image of a polynomial for fast repeated evaluation.
///
/// Holds, per term, a rigorous interval enclosure of the coefficient (for
/// interval evaluation) and the nearest float (for plain point evaluation).
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    nvars: usize,
    terms: Vec<(Exponents, Interval, f64)>,
}

impl CompiledPoly {
    pub fn new(p: &Polynomial) -> Self {
        CompiledPoly {
            nvars: p.nvars,
            terms: p
                .terms
                .iter()
                .map(|(e, c)| {
                    let enc = rational_enclosure(c);
                    (e.clone(), enc, c.to_f64().unwrap_or(enc.mid()))
                })
                .collect(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Plain floating-point value (not rounding-controlled).
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, _, c)| {
                e.iter()
                    .zip(x)
                    .fold(*c, |acc, (&k, &xi)| if k == 0 { acc } else { acc * xi.powi(k as i32) })
            })
            .sum()
    }

    pub fn eval_interval(&self, b: &IntervalBox) -> Interval {
        debug_assert_eq!(b.dim(), self.nvars);
        let mut acc = Interval::ZERO;
        for (e, c, _) in &self.terms {
            let mut t = *c;
            for (&k, side) in e.iter().zip(b.sides()) {
                if k > 0 {
                    t = t * side.powi(k);
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Rigorous enclosure of the value at a float point.
    pub fn eval_point_interval(&self, x: &[f64]) -> Interval {
        self.eval_interval(&IntervalBox::from_point(x))
    }
}
