//! Certified enumeration of the critical points of `f_t` inside the closed
//! ball of radius `delta`, their Morse indices, Milnor-scale selection and
//! stability scans of the critical-point count `m(t)`.

mod inertia;
mod newton;
mod scales;

pub use inertia::{certified_negative_count, interval_ldlt_negatives, IntervalMatrix};
pub use newton::{GradientSystem, KrawczykOutcome};
pub use scales::{
    certify_isolated, check_sphere_transversality, select_scales, stability_scan, CheckResult,
    ScaleOverrides, ScaleSelection, StabilitySample, StabilityScan, ValidationReport,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::{Interval, IntervalBox};
use crate::morsify::MorsifyError;
use crate::polyring::{PolyError, Polynomial};

/// Numerical knobs of the certification layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Boxes narrower than this (relative to `delta`) that can be neither
    /// excluded nor certified are reported as residual.
    pub exclusion_floor: f64,
    /// Target width of refined critical-point enclosures.
    pub newton_width: f64,
    /// Maximum width of a critical-value enclosure.
    pub value_sep: f64,
    /// Maximum number of bisections along any branch.
    pub max_depth: usize,
    /// Number of fresh directions tried for a generic family.
    pub retry_budget: u32,
    /// Cap on the number of boxes examined by one branch-and-prune run.
    pub max_boxes: usize,
    /// Enclosure refinements attempted before an index is declared
    /// uncertifiable.
    pub refine_budget: u32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            exclusion_floor: 1e-10,
            newton_width: 1e-8,
            value_sep: 1e-9,
            max_depth: 400,
            retry_budget: 8,
            max_boxes: 2_000_000,
            refine_budget: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertError {
    #[error("input polynomial is constant")]
    ConstantInput,
    #[error("radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("{} box(es) could be neither excluded nor certified; t may be near-degenerate or the tolerances too coarse", residual.len())]
    MaxDepthExceeded { residual: Vec<IntervalBox> },
    #[error("critical values {first} and {second} overlap")]
    ValueCollision { first: Interval, second: Interval },
    #[error("critical point enclosure straddles the sphere |x| = delta")]
    OnSphere { enclosure: IntervalBox },
    #[error("two certified critical points could not be told apart")]
    AmbiguousCluster { enclosure: IntervalBox },
    #[error("critical value enclosure of width {width:e} exceeds the separation tolerance")]
    WideValue { width: f64 },
    #[error("Hessian inertia could not be certified; the critical point looks degenerate")]
    DegenerateHessian { enclosure: IntervalBox },
    #[error("scale selection budget exhausted")]
    BudgetExhausted { report: Box<ValidationReport> },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Morsify(#[from] MorsifyError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Certificate {
    /// A Krawczyk step mapped `region` into its own interior; the enclosure
    /// is a subset of `region`.
    NewtonUnique { region: IntervalBox },
    Uncertified,
}

/// A critical point `p_i` of `f_t` in the closed ball, with its value
/// `s_i = f_t(p_i)` and Morse index once computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedCriticalPoint {
    pub enclosure: IntervalBox,
    pub midpoint: Vec<f64>,
    pub value: Interval,
    pub index: Option<usize>,
    pub certificate: Certificate,
}

impl CertifiedCriticalPoint {
    /// A point known only approximately, e.g. a degenerate candidate.
    pub fn uncertified(enclosure: IntervalBox, value: Interval) -> Self {
        CertifiedCriticalPoint {
            midpoint: enclosure.midpoint(),
            enclosure,
            value,
            index: None,
            certificate: Certificate::Uncertified,
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self.certificate, Certificate::NewtonUnique { .. })
    }
}

/// Re-runs one Krawczyk step on the certifying region of `p` and checks that
/// it maps strictly inside itself and that the enclosure lies in the region.
pub fn verify_certificate(f: &Polynomial, p: &CertifiedCriticalPoint) -> bool {
    let Certificate::NewtonUnique { region } = &p.certificate else {
        return false;
    };
    let sys = GradientSystem::new(f);
    matches!(sys.krawczyk(region), KrawczykOutcome::Unique(_)) && p.enclosure.subset_of(region)
}

struct Found {
    region: IntervalBox,
    enclosure: IntervalBox,
    inside: bool,
}

struct Search<'a> {
    sys: &'a GradientSystem,
    delta_sq: f64,
    cfg: &'a Tolerances,
    found: Vec<Found>,
}

impl Search<'_> {
    fn covered(&self, b: &IntervalBox) -> bool {
        self.found.iter().any(|f| b.subset_of(&f.region))
    }

    /// Registers a region proven to hold exactly one zero of the gradient.
    fn register(&mut self, region: IntervalBox) -> Result<(), CertError> {
        let enclosure = self.sys.refine(&region);
        for f in &self.found {
            if enclosure.subset_of(&f.region) || f.enclosure.subset_of(&region) {
                // same zero, already known
                self.found.push(Found {
                    region,
                    enclosure: f.enclosure.clone(),
                    inside: f.inside,
                });
                return Ok(());
            }
            if enclosure.intersects(&f.enclosure) {
                return Err(CertError::AmbiguousCluster { enclosure });
            }
        }
        let norm = enclosure.norm_sq();
        let inside = if norm.hi < self.delta_sq {
            true
        } else if norm.lo > self.delta_sq {
            false
        } else {
            return Err(CertError::OnSphere { enclosure });
        };
        self.found.push(Found {
            region,
            enclosure,
            inside,
        });
        Ok(())
    }

    /// Tries to certify a zero near a float Newton limit started inside `x`.
    fn try_inflation(&mut self, x: &IntervalBox) -> Result<bool, CertError> {
        let w = x.max_width();
        let Some(p) = self.sys.newton_float(&x.midpoint(), 40) else {
            return Ok(false);
        };
        let near = IntervalBox::around(&x.midpoint(), w);
        if !near.contains_point(&p) {
            return Ok(false);
        }
        let scale = 1.0 + p.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for rho in [w, w / 8.0, w / 64.0, 1e-6 * scale, 1e-9 * scale] {
            if rho <= 0.0 {
                continue;
            }
            let b = IntervalBox::around(&p, rho);
            if let KrawczykOutcome::Unique(_) = self.sys.krawczyk(&b) {
                self.register(b)?;
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// All critical points of `f_t` in the closed ball `|x| <= delta`, sorted by
/// critical value.
///
/// Branch and prune over `[-delta, delta]^d`: boxes outside the ball or on
/// which some gradient component has no zero are discarded, the rest are
/// certified by the Krawczyk operator (with epsilon-inflation around float
/// Newton limits) or bisected. Indices are left unset; see [`morse_index`].
pub fn find_critical_points(
    f_t: &Polynomial,
    delta: f64,
    cfg: &Tolerances,
) -> Result<Vec<CertifiedCriticalPoint>, CertError> {
    if f_t.is_constant() {
        return Err(CertError::ConstantInput);
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(CertError::InvalidRadius(delta));
    }
    let d = f_t.nvars();
    let sys = GradientSystem::new(f_t);
    let delta_sq = Interval::point(delta).sqr().hi;
    let mut search = Search {
        sys: &sys,
        delta_sq,
        cfg,
        found: Vec::new(),
    };
    let floor = cfg.exclusion_floor * delta.max(1.0);
    let inflate_below = delta / 16.0;

    let mut stack = vec![(IntervalBox::cube(d, delta), 0usize)];
    let mut residual = Vec::new();
    let mut processed = 0usize;
    while let Some((mut x, depth)) = stack.pop() {
        processed += 1;
        if processed > search.cfg.max_boxes {
            residual.push(x);
            residual.extend(stack.drain(..).map(|(b, _)| b));
            break;
        }
        if x.norm_sq().lo > delta_sq || search.covered(&x) || sys.gradient_excluded(&x) {
            continue;
        }
        match sys.krawczyk(&x) {
            KrawczykOutcome::Empty => continue,
            KrawczykOutcome::Unique(_) => {
                search.register(x)?;
                continue;
            }
            KrawczykOutcome::Contracted(c) => {
                if c.max_width() < 0.5 * x.max_width() {
                    // re-examine the contracted box from the top
                    stack.push((c, depth));
                    continue;
                }
                x = c;
            }
            KrawczykOutcome::Failed => {}
        }
        if x.max_width() <= inflate_below && search.try_inflation(&x)? && search.covered(&x) {
            continue;
        }
        if x.max_width() < floor || depth >= search.cfg.max_depth {
            residual.push(x);
            continue;
        }
        let (l, r) = x.bisect();
        stack.push((r, depth + 1));
        stack.push((l, depth + 1));
    }
    residual.retain(|b| !search.covered(b));
    if !residual.is_empty() {
        return Err(CertError::MaxDepthExceeded { residual });
    }

    let mut points = Vec::new();
    for (i, f) in search.found.iter().enumerate() {
        if !f.inside {
            continue;
        }
        // duplicates share the enclosure of the first registration
        if search.found[..i].iter().any(|g| g.enclosure == f.enclosure) {
            continue;
        }
        let value = sys.value_enclosure(&f.enclosure);
        if value.width() > cfg.value_sep {
            return Err(CertError::WideValue {
                width: value.width(),
            });
        }
        points.push(CertifiedCriticalPoint {
            midpoint: f.enclosure.midpoint(),
            enclosure: f.enclosure.clone(),
            value,
            index: None,
            certificate: Certificate::NewtonUnique {
                region: f.region.clone(),
            },
        });
    }
    sort_by_value(&mut points)?;
    Ok(points)
}

/// Sorts by value midpoint and rejects overlapping value intervals.
fn sort_by_value(points: &mut [CertifiedCriticalPoint]) -> Result<(), CertError> {
    points.sort_by(|a, b| {
        a.value
            .mid()
            .total_cmp(&b.value.mid())
            .then_with(|| a.midpoint.partial_cmp(&b.midpoint).unwrap_or(std::cmp::Ordering::Equal))
    });
    for w in points.windows(2) {
        if w[0].value.intersects(&w[1].value) {
            return Err(CertError::ValueCollision {
                first: w[0].value,
                second: w[1].value,
            });
        }
    }
    Ok(())
}

/// Certified Morse index of `f_t` at `point`: the number of negative
/// eigenvalues of the Hessian over the enclosure, computed by a
/// preconditioned interval LDL^T factorisation. Certified points have their
/// enclosures tightened and retried when a pivot straddles zero.
pub fn morse_index(
    f_t: &Polynomial,
    point: &CertifiedCriticalPoint,
    cfg: &Tolerances,
) -> Result<usize, CertError> {
    let sys = GradientSystem::new(f_t);
    morse_index_with(&sys, point, cfg)
}

fn morse_index_with(
    sys: &GradientSystem,
    point: &CertifiedCriticalPoint,
    cfg: &Tolerances,
) -> Result<usize, CertError> {
    let mut enc = point.enclosure.clone();
    for _ in 0..=cfg.refine_budget {
        if let Some(neg) = certified_negative_count(&sys.hess_interval(&enc)) {
            return Ok(neg);
        }
        if !point.is_certified() {
            break;
        }
        let next = match sys.krawczyk(&enc) {
            KrawczykOutcome::Unique(k) | KrawczykOutcome::Contracted(k) => {
                k.intersect(&enc).unwrap_or(k)
            }
            _ => break,
        };
        if next.max_width() >= enc.max_width() {
            break;
        }
        enc = next;
    }
    Err(CertError::DegenerateHessian { enclosure: enc })
}

/// [`find_critical_points`] followed by [`morse_index`] on every point.
pub fn certify_critical_points(
    f_t: &Polynomial,
    delta: f64,
    cfg: &Tolerances,
) -> Result<Vec<CertifiedCriticalPoint>, CertError> {
    let sys = GradientSystem::new(f_t);
    let mut points = find_critical_points(f_t, delta, cfg)?;
    for p in &mut points {
        p.index = Some(morse_index_with(&sys, p, cfg)?);
    }
    Ok(points)
}

#[cfg(test)]
mod tests;
