//! Choice of the Milnor scales `(delta, eta, t)` and m(t) stability scans.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{certify_critical_points, CertError, CertifiedCriticalPoint, Tolerances};
use crate::interval::{Interval, IntervalBox};
use crate::morsify::DeformationFamily;
use crate::polyring::{CompiledPoly, Polynomial};

const DELTA_HALVINGS: u32 = 20;
const T_HALVINGS: u32 = 40;
/// Depth cap for the exclusion-only subdivisions (isolation, transversality).
const EXCLUSION_DEPTH: usize = 80;
const EXCLUSION_BOXES: usize = 4_000_000;

/// Manually fixed scales; `None` means automatic.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScaleOverrides {
    pub delta: Option<f64>,
    pub eta: Option<f64>,
    pub t: Option<Vec<BigRational>>,
    /// Also certify that the fibres meet the sphere transversally.
    pub check_sphere: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub passed: bool,
    pub note: String,
    pub counterexample: Option<IntervalBox>,
}

impl CheckResult {
    fn pass(note: impl Into<String>) -> Self {
        CheckResult {
            passed: true,
            note: note.into(),
            counterexample: None,
        }
    }

    fn fail(note: impl Into<String>, counterexample: Option<IntervalBox>) -> Self {
        CheckResult {
            passed: false,
            note: note.into(),
            counterexample,
        }
    }

    fn pending() -> Self {
        CheckResult::fail("not reached", None)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub isolated_singularity: CheckResult,
    pub values_inside_eta: CheckResult,
    pub eta_regular: CheckResult,
    pub distinct_values: CheckResult,
    pub sphere_transversality: Option<CheckResult>,
}

impl ValidationReport {
    fn pending() -> Self {
        ValidationReport {
            isolated_singularity: CheckResult::pending(),
            values_inside_eta: CheckResult::pending(),
            eta_regular: CheckResult::pending(),
            distinct_values: CheckResult::pending(),
            sphere_transversality: None,
        }
    }

    pub fn accepted(&self) -> bool {
        self.isolated_singularity.passed
            && self.values_inside_eta.passed
            && self.eta_regular.passed
            && self.distinct_values.passed
            && self.sphere_transversality.as_ref().is_none_or(|c| c.passed)
    }
}

/// An accepted scale triple together with the certified critical points of
/// `f_t` in the closed ball, indices included.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleSelection {
    pub delta: f64,
    pub eta: f64,
    pub t: Vec<BigRational>,
    pub points: Vec<CertifiedCriticalPoint>,
    pub validation: ValidationReport,
}

impl ScaleSelection {
    pub fn m(&self) -> usize {
        self.points.len()
    }

    pub fn t_f64(&self) -> Vec<f64> {
        self.t.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

/// Certifies that the gradient of `f` has no zero on the closed ball of
/// radius `delta` outside the origin box of half-width `delta * 1e-3`.
/// Returns an undecided box on failure.
pub fn certify_isolated(f: &Polynomial, delta: f64) -> Result<(), IntervalBox> {
    let d = f.nvars();
    let grads: Vec<CompiledPoly> = f.gradient().iter().map(CompiledPoly::new).collect();
    let origin = IntervalBox::cube(d, delta * 1e-3);
    let delta_sq = Interval::point(delta).sqr().hi;
    subdivide(IntervalBox::cube(d, delta), |b| {
        if b.norm_sq().lo > delta_sq || b.subset_of(&origin) {
            return true;
        }
        grads.iter().any(|g| !g.eval_interval(b).contains_zero())
    })
}

/// Certifies that `grad f` and the position vector are nowhere parallel on
/// `{|x| = delta} ∩ {f = ±eta}`. In one variable the condition reduces to
/// `f(±delta) != ±eta`.
pub fn check_sphere_transversality(f: &Polynomial, delta: f64, eta: f64) -> Result<(), IntervalBox> {
    let d = f.nvars();
    let fc = CompiledPoly::new(f);
    let grads: Vec<CompiledPoly> = f.gradient().iter().map(CompiledPoly::new).collect();
    let delta_sq = Interval::point(delta).sqr();
    subdivide(IntervalBox::cube(d, delta), |b| {
        let n = b.norm_sq();
        if n.lo > delta_sq.hi || n.hi < delta_sq.lo {
            return true;
        }
        let v = fc.eval_interval(b);
        if !v.contains(eta) && !v.contains(-eta) {
            return true;
        }
        let g: Vec<Interval> = grads.iter().map(|p| p.eval_interval(b)).collect();
        let x = b.sides();
        (0..d).any(|i| {
            (i + 1..d).any(|j| !(g[i] * x[j] - g[j] * x[i]).contains_zero())
        })
    })
}

/// Bisects until `settled` holds on every leaf; fails with the first leaf
/// that hits the depth or box cap.
fn subdivide(root: IntervalBox, settled: impl Fn(&IntervalBox) -> bool) -> Result<(), IntervalBox> {
    let mut stack = vec![(root, 0usize)];
    let mut count = 0usize;
    while let Some((b, depth)) = stack.pop() {
        count += 1;
        if settled(&b) {
            continue;
        }
        if depth >= EXCLUSION_DEPTH || count > EXCLUSION_BOXES {
            return Err(b);
        }
        let (l, r) = b.bisect();
        stack.push((r, depth + 1));
        stack.push((l, depth + 1));
    }
    Ok(())
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite scale")
}

/// Picks `(delta, eta, t)` for a family.
///
/// `delta` starts at the override or 1 and is halved until the base germ
/// is certified to have no other critical point in the ball. `eta` is the
/// override or `delta^2 / 4`. Every parameter coordinate starts at
/// `delta / 10` and the whole vector is halved until the critical points of
/// `f_t` in the ball are certified Morse with distinct values inside
/// `(-eta, eta)`. Manual values are validated, never adjusted.
pub fn select_scales(
    family: &DeformationFamily,
    overrides: &ScaleOverrides,
    cfg: &Tolerances,
) -> Result<ScaleSelection, CertError> {
    let base = family.base();
    if base.is_constant() {
        return Err(CertError::ConstantInput);
    }
    let mut report = ValidationReport::pending();

    let mut delta = overrides.delta.unwrap_or(1.0);
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(CertError::InvalidRadius(delta));
    }
    let halvings = if overrides.delta.is_some() { 0 } else { DELTA_HALVINGS };
    let mut isolated = false;
    for attempt in 0..=halvings {
        match certify_isolated(base, delta) {
            Ok(()) => {
                report.isolated_singularity = CheckResult::pass(format!(
                    "gradient excluded on the ball of radius {delta} away from the origin box"
                ));
                isolated = true;
                break;
            }
            Err(b) => {
                report.isolated_singularity =
                    CheckResult::fail(format!("undecided box at delta = {delta}"), Some(b));
                if attempt < halvings {
                    delta /= 2.0;
                }
            }
        }
    }
    if !isolated {
        return Err(CertError::BudgetExhausted {
            report: Box::new(report),
        });
    }

    let eta = overrides.eta.unwrap_or(delta * delta / 4.0);
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(CertError::BudgetExhausted {
            report: Box::new(report),
        });
    }

    let k = family.param_dim();
    let (mut t, t_halvings) = match &overrides.t {
        Some(t) => (t.clone(), 0),
        None => (vec![rational(delta) / BigRational::from_integer(BigInt::from(10)); k], T_HALVINGS),
    };
    let two = BigRational::from_integer(BigInt::from(2));
    for attempt in 0..=t_halvings {
        if let Some(sel) = validate_at(family, delta, eta, &t, overrides.check_sphere, cfg, &mut report)? {
            return Ok(sel);
        }
        if attempt < t_halvings {
            t = t.iter().map(|v| v / &two).collect();
        }
    }
    Err(CertError::BudgetExhausted {
        report: Box::new(report),
    })
}

/// Runs every check at one scale triple; `Ok(None)` means rejected with the
/// reasons recorded in `report`.
fn validate_at(
    family: &DeformationFamily,
    delta: f64,
    eta: f64,
    t: &[BigRational],
    check_sphere: bool,
    cfg: &Tolerances,
    report: &mut ValidationReport,
) -> Result<Option<ScaleSelection>, CertError> {
    let ft = family.specialize(t)?;
    if ft.is_constant() {
        return Err(CertError::ConstantInput);
    }
    let points = match certify_critical_points(&ft, delta, cfg) {
        Ok(p) => p,
        Err(CertError::ValueCollision { first, second }) => {
            report.distinct_values = CheckResult::fail(
                format!("critical values {first} and {second} overlap"),
                None,
            );
            return Ok(None);
        }
        Err(
            e @ (CertError::MaxDepthExceeded { .. }
            | CertError::OnSphere { .. }
            | CertError::AmbiguousCluster { .. }
            | CertError::WideValue { .. }
            | CertError::DegenerateHessian { .. }),
        ) => {
            let b = match &e {
                CertError::MaxDepthExceeded { residual } => residual.first().cloned(),
                CertError::OnSphere { enclosure }
                | CertError::AmbiguousCluster { enclosure }
                | CertError::DegenerateHessian { enclosure } => Some(enclosure.clone()),
                _ => None,
            };
            report.distinct_values = CheckResult::fail(e.to_string(), b);
            return Ok(None);
        }
        Err(e) => return Err(e),
    };
    report.distinct_values = CheckResult::pass(format!(
        "{} certified critical point(s) with pairwise disjoint values",
        points.len()
    ));

    let outside = points
        .iter()
        .find(|p| !(p.value.lo > -eta && p.value.hi < eta));
    report.values_inside_eta = match outside {
        None => CheckResult::pass(format!("all critical values inside (-{eta}, {eta})")),
        Some(p) => CheckResult::fail(
            format!("critical value {} leaves (-{eta}, {eta})", p.value),
            Some(p.enclosure.clone()),
        ),
    };
    let hit = points
        .iter()
        .find(|p| p.value.contains(eta) || p.value.contains(-eta));
    report.eta_regular = match hit {
        None => CheckResult::pass("no critical value interval meets ±eta"),
        Some(p) => CheckResult::fail(
            format!("critical value {} meets ±eta", p.value),
            Some(p.enclosure.clone()),
        ),
    };
    report.sphere_transversality = check_sphere.then(|| match check_sphere_transversality(&ft, delta, eta) {
        Ok(()) => CheckResult::pass("fibres ±eta meet the sphere transversally"),
        Err(b) => CheckResult::fail("undecided box near the sphere", Some(b)),
    });
    if !report.accepted() {
        return Ok(None);
    }
    Ok(Some(ScaleSelection {
        delta,
        eta,
        t: t.to_vec(),
        points,
        validation: report.clone(),
    }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilitySample {
    pub t: Vec<BigRational>,
    /// `m(t)`, or the certification error message for this sample.
    pub m: Result<usize, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityScan {
    pub samples: Vec<StabilitySample>,
    /// Every sample certified and all counts agree.
    pub stable: bool,
}

/// Counts critical points in the ball at `t / 4^j`, `j = 0..samples`.
pub fn stability_scan(
    family: &DeformationFamily,
    scales: &ScaleSelection,
    samples: usize,
    cfg: &Tolerances,
) -> Result<StabilityScan, CertError> {
    assert!(samples >= 2, "stability scan needs at least two samples");
    if scales.t.iter().all(Zero::is_zero) {
        return Err(CertError::Morsify(crate::morsify::MorsifyError::NotADeformation));
    }
    let four = BigRational::from_integer(BigInt::from(4));
    let mut t = scales.t.clone();
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let ft = family.specialize(&t)?;
        let m = super::find_critical_points(&ft, scales.delta, cfg)
            .map(|p| p.len())
            .map_err(|e| e.to_string());
        out.push(StabilitySample { t: t.clone(), m });
        t = t.iter().map(|v| v / &four).collect();
    }
    let first = out[0].m.clone();
    let stable = first.is_ok() && out.iter().all(|s| s.m == first);
    Ok(StabilityScan {
        samples: out,
        stable,
    })
}
