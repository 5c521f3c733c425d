//! Topology of the real Milnor fibres `F_eta^± = f_t^{-1}(±eta) ∩ B_delta`
//! read off from certified critical data: Euler characteristics, handle
//! decompositions, Poincaré polynomials and vanishing cycles.
//!
//! Throughout, `n` is the fibre dimension, so the ambient space has `n + 1`
//! coordinates and Morse indices range over `0..=n+1`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certfind::CertifiedCriticalPoint;
use crate::interval::Interval;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("Morse index {index} outside 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("critical point {0} has no certified index")]
    MissingIndex(usize),
    #[error("critical values {0} and {1} are unsorted or overlap")]
    Unordered(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Positive,
    Negative,
}

impl Side {
    pub fn sign(self) -> i8 {
        match self {
            Side::Positive => 1,
            Side::Negative => -1,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Positive => "positive",
            Side::Negative => "negative",
        })
    }
}

fn check_index(index: usize, n: usize) -> Result<(), TopologyError> {
    if index > n + 1 {
        return Err(TopologyError::IndexOutOfRange { index, max: n + 1 });
    }
    Ok(())
}

fn sign_pow(k: usize) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `(chi(F^+), chi(F^-))` from the indices of the critical points in the
/// ball: `chi^+ = 1 - Σ (-1)^(n+1-λ)` and `chi^- = 1 - Σ (-1)^λ`.
pub fn khimshiashvili_chi(indices: &[usize], n: usize) -> Result<(i64, i64), TopologyError> {
    let mut plus = 1i64;
    let mut minus = 1i64;
    for &l in indices {
        check_index(l, n)?;
        plus -= sign_pow(n + 1 - l);
        minus -= sign_pow(l);
    }
    Ok((plus, minus))
}

/// One handle `D^a × D^b` attached when passing the critical value `value`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Handle {
    pub value: Interval,
    pub index: usize,
    pub dims: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HandleDecomposition {
    pub n: usize,
    pub side: Side,
    pub handles: Vec<Handle>,
}

impl HandleDecomposition {
    /// No handles: both fibres are contractible.
    pub fn is_contractible(&self) -> bool {
        self.handles.is_empty()
    }
}

fn indices_of(points: &[CertifiedCriticalPoint], n: usize) -> Result<Vec<usize>, TopologyError> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let l = p.index.ok_or(TopologyError::MissingIndex(i))?;
            check_index(l, n)?;
            Ok(l)
        })
        .collect()
}

/// Handle data ordered by critical value: `(λ, n+1-λ)` on the positive side,
/// `(n+1-λ, λ)` on the negative side.
pub fn handle_decomposition(
    points: &[CertifiedCriticalPoint],
    n: usize,
    side: Side,
) -> Result<HandleDecomposition, TopologyError> {
    let indices = indices_of(points, n)?;
    for (i, w) in points.windows(2).enumerate() {
        if w[0].value.hi >= w[1].value.lo {
            return Err(TopologyError::Unordered(i, i + 1));
        }
    }
    let handles = points
        .iter()
        .zip(indices)
        .map(|(p, l)| Handle {
            value: p.value,
            index: l,
            dims: match side {
                Side::Positive => (l, n + 1 - l),
                Side::Negative => (n + 1 - l, l),
            },
        })
        .collect();
    Ok(HandleDecomposition { n, side, handles })
}

/// Integer polynomial in `u`, coefficients by ascending degree with no
/// trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poincare(Vec<i64>);

impl Poincare {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poincare(coeffs)
    }

    /// `1 + c u^k`.
    fn one_plus(c: i64, k: usize) -> Self {
        let mut v = vec![0; k + 1];
        v[0] += 1;
        v[k] += c;
        Poincare::new(v)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn coefficient(&self, k: usize) -> i64 {
        self.0.get(k).copied().unwrap_or(0)
    }

    pub fn eval(&self, u: i64) -> i64 {
        self.0.iter().rev().fold(0, |acc, &c| acc * u + c)
    }
}

impl fmt::Display for Poincare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            if !first {
                f.write_str(" ")?;
            }
            let a = c.unsigned_abs();
            let body = match (k, a) {
                (0, _) => a.to_string(),
                (1, 1) => "u".to_string(),
                (1, _) => format!("{a}u"),
                (_, 1) => format!("u^{k}"),
                _ => format!("{a}u^{k}"),
            };
            if first {
                write!(f, "{sign}{body}")?;
            } else {
                write!(f, "{sign} {body}")?;
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "poly", rename_all = "snake_case")]
pub enum PoincareResult {
    Poly(Poincare),
    /// The fibre is empty.
    Empty,
}

/// Poincaré polynomial of one fibre when there is exactly one critical
/// point: `1 + u^(n-λ)` (positive, `λ <= n`) or `1 + u^(λ-1)` (negative,
/// `λ >= 1`), and `1` in the remaining case.
pub fn poincare_single(
    lambda: usize,
    n: usize,
    side: Side,
    fibre_nonempty: bool,
) -> Result<PoincareResult, TopologyError> {
    check_index(lambda, n)?;
    if !fibre_nonempty {
        return Ok(PoincareResult::Empty);
    }
    let p = match side {
        Side::Positive if lambda <= n => Poincare::one_plus(1, n - lambda),
        Side::Negative if lambda >= 1 => Poincare::one_plus(1, lambda - 1),
        _ => Poincare::new(vec![1]),
    };
    Ok(PoincareResult::Poly(p))
}

/// `(1 + m u^(n-λ), 1 + m u^(λ-1))`.
pub fn poincare_bouquet(m: usize, lambda: usize, n: usize) -> (Poincare, Poincare) {
    if m == 0 {
        return (Poincare::new(vec![1]), Poincare::new(vec![1]));
    }
    let m = m as i64;
    (
        Poincare::one_plus(m, n.saturating_sub(lambda)),
        Poincare::one_plus(m, lambda.saturating_sub(1)),
    )
}

/// Homology group `Z^rank ⊕ Z/t_1 ⊕ ...`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub rank: usize,
    pub torsion: Vec<u64>,
}

impl HomologyGroup {
    pub fn free(rank: usize) -> Self {
        HomologyGroup {
            rank,
            torsion: Vec::new(),
        }
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailedHypothesis {
    EvenDimension,
    DimensionTooSmall,
    IndexMismatch { index: usize, required: usize },
    CountMismatch { m: usize, indices: usize },
    EmptyFibre,
}

impl fmt::Display for FailedHypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailedHypothesis::EvenDimension => f.write_str("n is even"),
            FailedHypothesis::DimensionTooSmall => f.write_str("n must exceed 1"),
            FailedHypothesis::IndexMismatch { index, required } => {
                write!(f, "index {index} differs from (n+1)/2 = {required}")
            }
            FailedHypothesis::CountMismatch { m, indices } => {
                write!(f, "m = {m} but {indices} indices given")
            }
            FailedHypothesis::EmptyFibre => f.write_str("a fibre is empty"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BouquetHomology {
    /// `H_k` for `k = 0..=n`.
    Groups { groups: Vec<HomologyGroup> },
    HypothesisNotMet { reason: FailedHypothesis },
}

/// Homology of a wedge of `m` spheres of dimension `(n-1)/2`, valid when `n`
/// is odd and greater than 1, every index equals `(n+1)/2` and the fibres are
/// nonempty.
pub fn bouquet_homology(m: usize, indices: &[usize], n: usize, fibres_nonempty: bool) -> BouquetHomology {
    let fail = |reason| BouquetHomology::HypothesisNotMet { reason };
    if n % 2 == 0 {
        return fail(FailedHypothesis::EvenDimension);
    }
    if n <= 1 {
        return fail(FailedHypothesis::DimensionTooSmall);
    }
    if indices.len() != m {
        return fail(FailedHypothesis::CountMismatch {
            m,
            indices: indices.len(),
        });
    }
    let required = n.div_ceil(2);
    if let Some(&index) = indices.iter().find(|&&l| l != required) {
        return fail(FailedHypothesis::IndexMismatch { index, required });
    }
    if !fibres_nonempty {
        return fail(FailedHypothesis::EmptyFibre);
    }
    let mut groups = vec![HomologyGroup::default(); n + 1];
    groups[0].rank += 1;
    groups[(n - 1) / 2].rank += m;
    BouquetHomology::Groups { groups }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingCycles {
    pub positive: Option<usize>,
    pub negative: Option<usize>,
}

/// Degrees of the vanishing spheres: `n - λ` in the positive fibre unless
/// `λ = n + 1`, and `λ - 1` in the negative fibre unless `λ = 0`.
pub fn vanishing_cycles(
    points: &[CertifiedCriticalPoint],
    n: usize,
) -> Result<Vec<VanishingCycles>, TopologyError> {
    Ok(indices_of(points, n)?
        .into_iter()
        .map(|l| vanishing_degrees(l, n))
        .collect())
}

pub fn vanishing_degrees(lambda: usize, n: usize) -> VanishingCycles {
    VanishingCycles {
        positive: (lambda <= n).then(|| n - lambda),
        negative: lambda.checked_sub(1),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopologyReport {
    pub n: usize,
    pub m: usize,
    pub indices: Vec<usize>,
    pub chi_plus: i64,
    pub chi_minus: i64,
    pub poincare_plus: Option<PoincareResult>,
    pub poincare_minus: Option<PoincareResult>,
    pub homology: BouquetHomology,
    pub vanishing_cycles: Vec<VanishingCycles>,
    pub handles_plus: HandleDecomposition,
    pub handles_minus: HandleDecomposition,
    pub contractible: bool,
}

impl TopologyReport {
    /// Assembles every fibretop output for certified, value-sorted points.
    ///
    /// Poincaré polynomials are produced for `m <= 1` and for the bouquet
    /// case; otherwise they are `None`. An empty fibre gets the
    /// [`PoincareResult::Empty`] marker.
    pub fn build(
        points: &[CertifiedCriticalPoint],
        n: usize,
        nonempty_plus: bool,
        nonempty_minus: bool,
    ) -> Result<Self, TopologyError> {
        let indices = indices_of(points, n)?;
        let m = indices.len();
        let (chi_plus, chi_minus) = khimshiashvili_chi(&indices, n)?;
        let handles_plus = handle_decomposition(points, n, Side::Positive)?;
        let handles_minus = handle_decomposition(points, n, Side::Negative)?;
        let homology = bouquet_homology(m, &indices, n, nonempty_plus && nonempty_minus);
        let wrap = |p: Poincare, nonempty: bool| {
            if nonempty {
                PoincareResult::Poly(p)
            } else {
                PoincareResult::Empty
            }
        };
        let (poincare_plus, poincare_minus) = match (m, &homology) {
            (0, _) => (
                Some(wrap(Poincare::new(vec![1]), nonempty_plus)),
                Some(wrap(Poincare::new(vec![1]), nonempty_minus)),
            ),
            (1, _) => (
                Some(poincare_single(indices[0], n, Side::Positive, nonempty_plus)?),
                Some(poincare_single(indices[0], n, Side::Negative, nonempty_minus)?),
            ),
            (_, BouquetHomology::Groups { .. }) => {
                let (bp, bm) = poincare_bouquet(m, indices[0], n);
                (Some(PoincareResult::Poly(bp)), Some(PoincareResult::Poly(bm)))
            }
            _ => (None, None),
        };
        Ok(TopologyReport {
            n,
            m,
            chi_plus,
            chi_minus,
            poincare_plus,
            poincare_minus,
            homology,
            vanishing_cycles: indices.iter().map(|&l| vanishing_degrees(l, n)).collect(),
            contractible: handles_plus.is_contractible(),
            handles_plus,
            handles_minus,
            indices,
        })
    }
}
