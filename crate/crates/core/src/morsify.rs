//! Deformation families `F(x, t)` of a germ `f` and their classification as
//! strong or weak morsifications.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polyring::{PolyError, Polynomial, MAX_VARS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MorsifyError {
    #[error("germ must vanish at the origin (constant term {0})")]
    NonzeroConstant(String),
    #[error("germ is constant or affine; there is no isolated critical point to deform")]
    NoCriticalPoint,
    #[error("gradient of the germ does not vanish at the origin")]
    RegularAtOrigin,
    #[error("deformation at t = 0 differs from the germ")]
    NotADeformation,
    #[error("direction must have {expected} components, got {got}")]
    DirectionLength { expected: usize, got: usize },
    #[error("zero direction vector")]
    ZeroDirection,
    #[error("observed {m} critical points but the Milnor number is {mu}")]
    Inconsistent { m: usize, mu: u32 },
    #[error("malformed ADE label '{0}'")]
    BadAdeLabel(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Simple singularity type from the ADE list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdeType {
    A(u32),
    D(u32),
    E(u32),
}

impl AdeType {
    pub fn milnor_number(self) -> u32 {
        match self {
            AdeType::A(k) | AdeType::D(k) | AdeType::E(k) => k,
        }
    }
}

impl fmt::Display for AdeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdeType::A(k) => write!(f, "A{k}"),
            AdeType::D(k) => write!(f, "D{k}"),
            AdeType::E(k) => write!(f, "E{k}"),
        }
    }
}

impl FromStr for AdeType {
    type Err = MorsifyError;

    /// Accepts `A3`, `a_3`, `D4`, `E8` and the subscript forms `A₃`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MorsifyError::BadAdeLabel(s.to_string());
        let t = s.trim();
        let mut chars = t.chars();
        let family = chars.next().ok_or_else(bad)?.to_ascii_uppercase();
        let digits: String = chars
            .filter(|&c| c != '_')
            .map(|c| match c {
                '\u{2080}'..='\u{2089}' => {
                    char::from_digit(c as u32 - '\u{2080}' as u32, 10).unwrap()
                }
                other => other,
            })
            .collect();
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let k: u32 = digits.parse().map_err(|_| bad())?;
        match family {
            'A' if k >= 1 => Ok(AdeType::A(k)),
            'D' if k >= 4 => Ok(AdeType::D(k)),
            'E' if (6..=8).contains(&k) => Ok(AdeType::E(k)),
            _ => Err(bad()),
        }
    }
}

/// Milnor number of an ADE type: `A_k, D_k, E_k -> k`.
pub fn ade_milnor_number(label: &str) -> Result<u32, MorsifyError> {
    Ok(label.parse::<AdeType>()?.milnor_number())
}

/// Dimension of `R[x]/(grad f)` when every partial derivative is a single
/// monomial, counted as the monomials under the staircase.
///
/// Returns `None` when the gradient ideal is not monomial or the quotient is
/// infinite-dimensional (non-isolated critical point).
pub fn monomial_milnor_number(f: &Polynomial) -> Option<u32> {
    let n = f.nvars();
    let mut gens: Vec<Vec<u32>> = Vec::new();
    for g in f.gradient() {
        match g.num_terms() {
            0 => return None,
            1 => gens.push(g.terms().next().unwrap().0.clone()),
            _ => return None,
        }
    }
    // every variable needs a pure power among the generators
    let mut bounds = vec![u32::MAX; n];
    for e in &gens {
        let nz: Vec<usize> = (0..n).filter(|&i| e[i] > 0).collect();
        if nz.len() == 1 {
            bounds[nz[0]] = bounds[nz[0]].min(e[nz[0]]);
        } else if nz.is_empty() {
            // a unit generator: the quotient is zero
            return Some(0);
        }
    }
    if bounds.iter().any(|&b| b == u32::MAX) {
        return None;
    }
    let mut count = 0u32;
    let mut e = vec![0u32; n];
    loop {
        let divisible = gens
            .iter()
            .any(|g| g.iter().zip(&e).all(|(gi, ei)| gi <= ei));
        if !divisible {
            count += 1;
        }
        // odometer over the bounding box
        let mut i = 0;
        loop {
            if i == n {
                return Some(count);
            }
            e[i] += 1;
            if e[i] < bounds[i] {
                break;
            }
            e[i] = 0;
            i += 1;
        }
    }
}

/// A deformation `F(x, t)` of a germ `f(x)`, with the parameter variables
/// following the space variables.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationFamily {
    base: Polynomial,
    deformation: Polynomial,
    space_dim: usize,
    param_dim: usize,
    milnor_number: Option<u32>,
    ade_type: Option<AdeType>,
    direction: Option<Vec<BigRational>>,
}

fn check_germ(f: &Polynomial) -> Result<(), MorsifyError> {
    let c = f.constant_term();
    if !c.is_zero() {
        return Err(MorsifyError::NonzeroConstant(c.to_string()));
    }
    Ok(())
}

impl DeformationFamily {
    /// Wraps an explicit deformation. `deformation` must have
    /// `base.nvars() + param_dim` variables and reduce to `base` at `t = 0`.
    pub fn new(
        base: Polynomial,
        deformation: Polynomial,
        param_dim: usize,
    ) -> Result<Self, MorsifyError> {
        check_germ(&base)?;
        let space_dim = base.nvars();
        if deformation.nvars() != space_dim + param_dim || space_dim + param_dim > MAX_VARS {
            return Err(PolyError::DimensionMismatch {
                expected: space_dim + param_dim,
                got: deformation.nvars(),
            }
            .into());
        }
        let at_zero = deformation.substitute_trailing(&vec![BigRational::zero(); param_dim])?;
        if at_zero != base {
            return Err(MorsifyError::NotADeformation);
        }
        Ok(DeformationFamily {
            base,
            deformation,
            space_dim,
            param_dim,
            milnor_number: None,
            ade_type: None,
            direction: None,
        })
    }

    pub fn with_milnor_number(mut self, mu: u32) -> Self {
        self.milnor_number = Some(mu);
        self
    }

    /// Records an ADE label; also sets the Milnor number unless one was
    /// supplied explicitly.
    pub fn with_ade_type(mut self, ade: AdeType) -> Self {
        self.ade_type = Some(ade);
        if self.milnor_number.is_none() {
            self.milnor_number = Some(ade.milnor_number());
        }
        self
    }

    /// Fills in the Milnor number from the monomial staircase when the
    /// gradient ideal of the germ is monomial and nothing else is known.
    pub fn with_inferred_milnor_number(mut self) -> Self {
        if self.milnor_number.is_none() {
            self.milnor_number = monomial_milnor_number(&self.base);
        }
        self
    }

    pub fn base(&self) -> &Polynomial {
        &self.base
    }

    pub fn deformation(&self) -> &Polynomial {
        &self.deformation
    }

    /// Number of space variables `n + 1`.
    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    /// Fibre dimension `n`.
    pub fn fibre_dim(&self) -> usize {
        self.space_dim - 1
    }

    pub fn param_dim(&self) -> usize {
        self.param_dim
    }

    pub fn milnor_number(&self) -> Option<u32> {
        self.milnor_number
    }

    pub fn ade_type(&self) -> Option<AdeType> {
        self.ade_type
    }

    /// Perturbation direction for families built by
    /// [`make_linear_family`]/[`make_generic_linear_family`].
    pub fn direction(&self) -> Option<&[BigRational]> {
        self.direction.as_deref()
    }

    /// `f_t` as a polynomial in the space variables.
    pub fn specialize(&self, t: &[BigRational]) -> Result<Polynomial, MorsifyError> {
        if t.len() != self.param_dim {
            return Err(PolyError::DimensionMismatch {
                expected: self.param_dim,
                got: t.len(),
            }
            .into());
        }
        Ok(self.deformation.substitute_trailing(t)?)
    }
}

fn require_isolated_candidate(f: &Polynomial) -> Result<(), MorsifyError> {
    check_germ(f)?;
    if f.is_affine() {
        return Err(MorsifyError::NoCriticalPoint);
    }
    let origin = vec![BigRational::zero(); f.nvars()];
    for g in f.gradient() {
        if !g.evaluate(&origin)?.is_zero() {
            return Err(MorsifyError::RegularAtOrigin);
        }
    }
    Ok(())
}

/// `F(x, t) = f(x) + t * sum_i a_i x_i` for a given direction `a`.
pub fn make_linear_family(
    f: &Polynomial,
    direction: &[BigRational],
) -> Result<DeformationFamily, MorsifyError> {
    require_isolated_candidate(f)?;
    let n = f.nvars();
    if direction.len() != n {
        return Err(MorsifyError::DirectionLength {
            expected: n,
            got: direction.len(),
        });
    }
    if direction.iter().all(Zero::is_zero) {
        return Err(MorsifyError::ZeroDirection);
    }
    if n + 1 > MAX_VARS {
        return Err(PolyError::TooManyVariables(n + 1).into());
    }
    let t = Polynomial::var(n + 1, n);
    let mut linear = Polynomial::zero(n + 1);
    for (i, a) in direction.iter().enumerate() {
        linear = &linear + &Polynomial::var(n + 1, i).scale(a);
    }
    let deformation = &f.extend_vars(n + 1) + &(&t * &linear);
    let mut fam = DeformationFamily::new(f.clone(), deformation, 1)?;
    fam.direction = Some(direction.to_vec());
    Ok(fam.with_inferred_milnor_number())
}

/// Direction drawn uniformly from the unit sphere `S^{dim-1}`, rounded to a
/// rational with denominator `10^15`.
pub fn random_unit_direction(dim: usize, seed: u64) -> Vec<BigRational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        let den = BigInt::from(10u64.pow(15));
        return v
            .iter()
            .map(|x| {
                let scaled = (x / norm * 1e15).round() as i64;
                BigRational::new(BigInt::from(scaled), den.clone())
            })
            .collect();
    }
}

/// Generic linear perturbation with a seeded random direction.
pub fn make_generic_linear_family(
    f: &Polynomial,
    seed: u64,
) -> Result<DeformationFamily, MorsifyError> {
    require_isolated_candidate(f)?;
    let a = random_unit_direction(f.nvars(), seed);
    make_linear_family(f, &a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strength {
    Strong,
    Weak,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrengthVerdict {
    pub kind: Strength,
    pub m: usize,
    pub mu: Option<u32>,
}

/// Compares the observed count `m` of real Morse points with the Milnor
/// number of the family.
pub fn classify_strength(
    family: &DeformationFamily,
    m: usize,
) -> Result<StrengthVerdict, MorsifyError> {
    classify_count(family.milnor_number(), m)
}

pub fn classify_count(mu: Option<u32>, m: usize) -> Result<StrengthVerdict, MorsifyError> {
    let kind = match mu {
        None => Strength::Unknown,
        Some(mu) if m == mu as usize => Strength::Strong,
        Some(mu) if m < mu as usize => Strength::Weak,
        Some(mu) => return Err(MorsifyError::Inconsistent { m, mu }),
    };
    Ok(StrengthVerdict { kind, m, mu })
}

/// Euclidean norm of a rational vector, as a float.
pub fn direction_norm(a: &[BigRational]) -> f64 {
    a.iter()
        .map(|x| x.abs().to_f64().unwrap_or(f64::NAN).powi(2))
        .sum::<f64>()
        .sqrt()
}
