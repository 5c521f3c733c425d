//! Orchestration of one run: family, scales, critical points, strength,
//! fibre topology and the cubical cross-checks.

use std::collections::BTreeMap;
use std::time::Instant;

use num_rational::BigRational;

use cubeoracle::{
    build_region_complex, collapse, cubical_homology, default_resolution, euler_characteristic,
    fibre_nonempty, verify_chi, ChiComparison, Nonemptiness, OracleConfig, OracleError, RegionSpec,
};
use morsefib::certfind::{
    select_scales, stability_scan, CertError, ScaleOverrides, ScaleSelection, StabilityScan,
};
use morsefib::fibretop::{BouquetHomology, PoincareResult, Side, TopologyReport};
use morsefib::morsify::{
    classify_strength, make_generic_linear_family, AdeType, DeformationFamily, MorsifyError,
    StrengthVerdict,
};
use morsefib::polyring::{parse_polynomial, parse_rational, PolyError, Polynomial};

use crate::config::{FamilyKind, RunConfig};
use crate::error::{CliError, Failure};

/// Largest ambient dimension handed to the cubical oracle.
const ORACLE_MAX_DIM: usize = 4;

/// Command-line overrides shared by every subcommand.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub delta: Option<f64>,
    pub eta: Option<f64>,
    pub t: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub resolution: Option<usize>,
    pub mode: Option<String>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) -> Result<(), CliError> {
        if let Some(d) = self.delta {
            cfg.scales.delta = Some(d);
        }
        if let Some(e) = self.eta {
            cfg.scales.eta = Some(e);
        }
        if let Some(t) = &self.t {
            cfg.scales.t = Some(t.clone());
        }
        if let Some(seed) = self.seed {
            match &mut cfg.family.kind {
                FamilyKind::Generic { seed: s } => *s = seed,
                FamilyKind::Explicit { .. } => {
                    return Err(CliError::config("--seed applies only to generic families")
                        .with_hint("replace [family] deformation by seed = <integer>"))
                }
            }
        }
        if let Some(n) = self.resolution {
            cfg.oracle.resolution = Some(n);
        }
        if let Some(m) = &self.mode {
            cfg.oracle.mode = m.clone();
            cfg.oracle.mode()?;
        }
        Ok(())
    }
}

fn poly_error(e: PolyError) -> CliError {
    CliError::new(Failure::Usage, "polyring", e.to_string())
}

fn morsify_error(e: MorsifyError) -> CliError {
    let failure = match e {
        MorsifyError::Inconsistent { .. } => Failure::Certification,
        _ => Failure::Usage,
    };
    CliError::new(failure, "morsify", e.to_string())
}

pub fn cert_error(e: CertError) -> CliError {
    let hint = match &e {
        CertError::MaxDepthExceeded { .. } => Some("raise max_depth or choose a smaller t"),
        CertError::ValueCollision { .. } => Some("the family may fail to be Morse here; try another t or seed"),
        CertError::OnSphere { .. } => Some("choose a different delta"),
        CertError::DegenerateHessian { .. } => Some("the deformation leaves a degenerate critical point; try another t"),
        CertError::BudgetExhausted { .. } => Some("supply delta, eta and t manually or raise retry_budget"),
        CertError::WideValue { .. } => Some("raise value_sep or refine_budget"),
        _ => None,
    };
    let err = match e {
        CertError::Poly(p) => return poly_error(p),
        CertError::Morsify(m) => return morsify_error(m),
        other => CliError::new(Failure::Certification, "certfind", other.to_string()),
    };
    match hint {
        Some(h) => err.with_hint(h),
        None => err,
    }
}

fn oracle_error(e: OracleError) -> CliError {
    let failure = match e {
        OracleError::Unconverged { .. } => Failure::OracleDisagreement,
        _ => Failure::Usage,
    };
    let err = CliError::new(failure, "cubeoracle", e.to_string());
    match e {
        OracleError::Unconverged { .. } => err.with_hint("raise [oracle] resolution"),
        OracleError::Budget { .. } => err.with_hint("lower [oracle] resolution"),
        OracleError::CriticalValueInWindow { .. } => err.with_hint("shrink [oracle] window"),
        _ => err,
    }
}

fn parse_t(values: &[String]) -> Result<Vec<BigRational>, CliError> {
    values
        .iter()
        .map(|v| parse_rational(v).map_err(poly_error))
        .collect()
}

/// Family built from the configuration and the seed that produced it.
#[derive(Clone, Debug)]
pub struct BuiltFamily {
    pub family: DeformationFamily,
    pub seed_used: Option<u64>,
    pub variables: Vec<String>,
}

impl BuiltFamily {
    pub fn display(&self, p: &Polynomial) -> String {
        let mut names: Vec<&str> = self.variables.iter().map(String::as_str).collect();
        while names.len() < p.nvars() {
            names.push("t");
        }
        p.display_with(&names[..p.nvars()])
    }
}

fn decorate(mut family: DeformationFamily, cfg: &RunConfig) -> Result<DeformationFamily, CliError> {
    if let Some(mu) = cfg.family.mu {
        family = family.with_milnor_number(mu);
    }
    if let Some(label) = &cfg.family.ade {
        family = family.with_ade_type(label.parse::<AdeType>().map_err(morsify_error)?);
    }
    Ok(family.with_inferred_milnor_number())
}

fn base_polynomial(cfg: &RunConfig) -> Result<Polynomial, CliError> {
    let vars: Vec<&str> = cfg.germ.variables.iter().map(String::as_str).collect();
    parse_polynomial(&cfg.germ.polynomial, &vars).map_err(poly_error)
}

fn explicit_family(cfg: &RunConfig, deformation: &str, parameters: &[String]) -> Result<BuiltFamily, CliError> {
    let base = base_polynomial(cfg)?;
    let mut vars: Vec<&str> = cfg.germ.variables.iter().map(String::as_str).collect();
    vars.extend(parameters.iter().map(String::as_str));
    let big = parse_polynomial(deformation, &vars).map_err(poly_error)?;
    let family = DeformationFamily::new(base, big, parameters.len()).map_err(morsify_error)?;
    let mut variables = cfg.germ.variables.clone();
    variables.extend(parameters.iter().cloned());
    Ok(BuiltFamily {
        family: decorate(family, cfg)?,
        seed_used: None,
        variables,
    })
}

fn generic_family(cfg: &RunConfig, seed: u64) -> Result<BuiltFamily, CliError> {
    let base = base_polynomial(cfg)?;
    let family = make_generic_linear_family(&base, seed).map_err(morsify_error)?;
    let mut variables = cfg.germ.variables.clone();
    variables.push("t".into());
    Ok(BuiltFamily {
        family: decorate(family, cfg)?,
        seed_used: Some(seed),
        variables,
    })
}

pub fn scale_overrides(cfg: &RunConfig) -> Result<ScaleOverrides, CliError> {
    Ok(ScaleOverrides {
        delta: cfg.scales.delta,
        eta: cfg.scales.eta,
        t: cfg.scales.t.as_deref().map(parse_t).transpose()?,
        check_sphere: cfg.scales.check_sphere,
    })
}

/// Builds the family and selects certified scales. A generic family moves
/// on to the next seed when certification fails, up to `retry_budget`
/// attempts.
pub fn family_and_scales(cfg: &RunConfig) -> Result<(BuiltFamily, ScaleSelection), CliError> {
    let overrides = scale_overrides(cfg)?;
    match &cfg.family.kind {
        FamilyKind::Explicit {
            deformation,
            parameters,
        } => {
            let built = explicit_family(cfg, deformation, parameters)?;
            let sel = select_scales(&built.family, &overrides, &cfg.tolerances).map_err(cert_error)?;
            Ok((built, sel))
        }
        FamilyKind::Generic { seed } => {
            let attempts = cfg.tolerances.retry_budget.max(1) as u64;
            let mut last = None;
            for i in 0..attempts {
                let built = generic_family(cfg, seed.wrapping_add(i))?;
                match select_scales(&built.family, &overrides, &cfg.tolerances) {
                    Ok(sel) => return Ok((built, sel)),
                    Err(e) => last = Some(e),
                }
            }
            let err = cert_error(last.expect("at least one attempt"));
            Err(err.with_hint(format!("{attempts} seeds starting at {seed} all failed")))
        }
    }
}

/// Per-side oracle results.
#[derive(Clone, Debug)]
pub struct SideOracle {
    pub side: Side,
    pub chi: Result<ChiComparison, OracleError>,
    pub homology: Option<HomologyCheck>,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HomologyCheck {
    pub side: Side,
    pub resolution: usize,
    pub window: (f64, f64),
    pub cells_before: usize,
    pub cells_after: usize,
    pub betti: Vec<usize>,
    pub torsion: Vec<Vec<String>>,
    /// Betti numbers predicted by the fibre topology, when available.
    pub expected: Option<Vec<usize>>,
    pub agrees: Option<bool>,
}

/// Everything computed by a full run.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub built: BuiltFamily,
    pub selection: ScaleSelection,
    pub f_t: Polynomial,
    pub strength: Result<StrengthVerdict, CliError>,
    pub stability: Option<StabilityScan>,
    pub nonempty_plus: Nonemptiness,
    pub nonempty_minus: Nonemptiness,
    pub topology: TopologyReport,
    pub oracle: Vec<SideOracle>,
    pub oracle_skipped: Option<String>,
    pub timings: BTreeMap<String, f64>,
}

/// Which optional stages to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stages {
    pub stability: bool,
    pub oracle_chi: bool,
    pub oracle_homology: bool,
}

impl Stages {
    pub const ALL: Stages = Stages {
        stability: true,
        oracle_chi: true,
        oracle_homology: true,
    };
    pub const NONE: Stages = Stages {
        stability: false,
        oracle_chi: false,
        oracle_homology: false,
    };
}

/// Critical data of `f_t` only: family, scales and certified points.
pub fn certify(cfg: &RunConfig) -> Result<(BuiltFamily, ScaleSelection, Polynomial), CliError> {
    let (built, selection) = family_and_scales(cfg)?;
    let f_t = built.family.specialize(&selection.t).map_err(morsify_error)?;
    Ok((built, selection, f_t))
}

fn predicted_betti(p: &Option<PoincareResult>, homology: &BouquetHomology, d: usize) -> Option<Vec<usize>> {
    match p {
        Some(PoincareResult::Empty) => Some(vec![0; d + 1]),
        Some(PoincareResult::Poly(poly)) => {
            let mut b = vec![0usize; d + 1];
            for (k, &c) in poly.coeffs().iter().enumerate() {
                if k > d || c < 0 {
                    return None;
                }
                b[k] = c as usize;
            }
            Some(b)
        }
        None => match homology {
            BouquetHomology::Groups { groups } => {
                let mut b = vec![0usize; d + 1];
                for (k, g) in groups.iter().enumerate() {
                    b[k] = g.rank;
                }
                Some(b)
            }
            BouquetHomology::HypothesisNotMet { .. } => None,
        },
    }
}

pub fn homology_check(
    f_t: &Polynomial,
    delta: f64,
    window: (f64, f64),
    resolution: usize,
    side: Side,
    expected: Option<Vec<usize>>,
    cfg: &RunConfig,
) -> Result<HomologyCheck, OracleError> {
    let spec = RegionSpec {
        g: f_t.clone(),
        window,
        delta,
        resolution,
    };
    let complex = build_region_complex(&spec, cfg.oracle.mode().unwrap_or_default())?;
    let reduced = collapse(&complex);
    debug_assert_eq!(euler_characteristic(&complex), euler_characteristic(&reduced));
    let h = cubical_homology(&reduced)?;
    let agrees = expected
        .as_ref()
        .map(|e| *e == h.betti && h.is_torsion_free());
    Ok(HomologyCheck {
        side,
        resolution,
        window,
        cells_before: complex.num_cells(),
        cells_after: reduced.num_cells(),
        betti: h.betti,
        torsion: h
            .torsion
            .iter()
            .map(|t| t.iter().map(ToString::to_string).collect())
            .collect(),
        expected,
        agrees,
    })
}

pub fn oracle_config(cfg: &RunConfig, side: Side) -> Result<OracleConfig, CliError> {
    Ok(OracleConfig {
        resolution: cfg.oracle.resolution,
        mode: cfg.oracle.mode()?,
        window: cfg.oracle.window,
        filled: side == Side::Positive,
    })
}

/// Default resolution for the homology check: 16 in four dimensions,
/// otherwise the chi resolution.
pub fn homology_resolution(cfg: &RunConfig, d: usize) -> usize {
    cfg.oracle.homology_resolution.unwrap_or_else(|| match d {
        4 => 16,
        _ => cfg.oracle.resolution.unwrap_or_else(|| default_resolution(d)),
    })
}

fn elapsed(timings: &mut BTreeMap<String, f64>, key: &str, start: Instant) {
    timings.insert(key.to_string(), start.elapsed().as_secs_f64());
}

/// Runs the pipeline. Certification failures abort; oracle outcomes are
/// recorded and judged by [`Analysis::failure`].
pub fn analyze(cfg: &RunConfig, stages: Stages) -> Result<Analysis, CliError> {
    let mut timings = BTreeMap::new();
    let start = Instant::now();
    let (built, selection, f_t) = certify(cfg)?;
    elapsed(&mut timings, "certify", start);

    let strength = classify_strength(&built.family, selection.m()).map_err(morsify_error);

    let start = Instant::now();
    let stability = if stages.stability && selection.t.iter().any(|v| *v != BigRational::from_integer(0.into())) {
        Some(
            stability_scan(&built.family, &selection, cfg.scales.stability_samples.max(2), &cfg.tolerances)
                .map_err(cert_error)?,
        )
    } else {
        None
    };
    elapsed(&mut timings, "stability", start);

    let start = Instant::now();
    let (delta, eta) = (selection.delta, selection.eta);
    let nonempty_plus = fibre_nonempty(&f_t, eta, delta);
    let nonempty_minus = fibre_nonempty(&f_t, -eta, delta);
    let n = built.family.fibre_dim();
    let topology = TopologyReport::build(
        &selection.points,
        n,
        nonempty_plus.is_nonempty(),
        nonempty_minus.is_nonempty(),
    )
    .map_err(|e| CliError::new(Failure::Certification, "fibretop", e.to_string()))?;
    // Without a verdict on a fibre its Poincaré polynomial is unknown.
    let mut topology = topology;
    if nonempty_plus == Nonemptiness::Undecided {
        topology.poincare_plus = None;
    }
    if nonempty_minus == Nonemptiness::Undecided {
        topology.poincare_minus = None;
    }
    elapsed(&mut timings, "topology", start);

    let d = built.family.space_dim();
    let mut oracle = Vec::new();
    let oracle_skipped = if !cfg.oracle.enabled {
        Some("disabled in config".to_string())
    } else if d > ORACLE_MAX_DIM {
        Some(format!("ambient dimension {d} exceeds {ORACLE_MAX_DIM}"))
    } else if !stages.oracle_chi {
        Some("not requested".to_string())
    } else {
        None
    };
    if oracle_skipped.is_none() {
        let start = Instant::now();
        for side in [Side::Positive, Side::Negative] {
            let ocfg = oracle_config(cfg, side)?;
            let chi = verify_chi(&f_t, delta, eta, &selection.points, side, &ocfg);
            let homology = match (&chi, stages.oracle_homology) {
                (Ok(c), true) => {
                    let (p, nonempty) = match side {
                        Side::Positive => (&topology.poincare_plus, &nonempty_plus),
                        Side::Negative => (&topology.poincare_minus, &nonempty_minus),
                    };
                    let expected = match nonempty {
                        Nonemptiness::Undecided => None,
                        _ => predicted_betti(p, &topology.homology, d),
                    };
                    Some(homology_check(
                        &f_t,
                        delta,
                        c.window,
                        homology_resolution(cfg, d),
                        side,
                        expected,
                        cfg,
                    ))
                }
                _ => None,
            };
            let homology = match homology.transpose() {
                Ok(h) => h,
                Err(e) => return Err(oracle_error(e)),
            };
            oracle.push(SideOracle { side, chi, homology });
        }
        elapsed(&mut timings, "oracle", start);
    }

    Ok(Analysis {
        built,
        selection,
        f_t,
        strength,
        stability,
        nonempty_plus,
        nonempty_minus,
        topology,
        oracle,
        oracle_skipped,
        timings,
    })
}

impl Analysis {
    /// The first reason this run should not exit cleanly, if any.
    pub fn failure(&self) -> Option<CliError> {
        if let Err(e) = &self.strength {
            return Some(e.clone());
        }
        for s in &self.oracle {
            match &s.chi {
                Err(e) => return Some(oracle_error(e.clone())),
                Ok(c) if !c.agrees => {
                    return Some(CliError::new(
                        Failure::OracleDisagreement,
                        "cubeoracle",
                        format!(
                            "{} fibre: formula chi = {} but oracle chi = {}",
                            c.side, c.formula, c.oracle[1].1
                        ),
                    ))
                }
                Ok(c) if c.filled_chi.is_some_and(|x| x != 1) => {
                    return Some(CliError::new(
                        Failure::OracleDisagreement,
                        "cubeoracle",
                        format!("filled region chi = {} instead of 1", c.filled_chi.unwrap_or(0)),
                    ))
                }
                Ok(_) => {}
            }
            if let Some(h) = &s.homology {
                if h.agrees == Some(false) {
                    return Some(CliError::new(
                        Failure::OracleDisagreement,
                        "cubeoracle",
                        format!(
                            "{} fibre: oracle betti {:?} but predicted {:?}",
                            h.side,
                            h.betti,
                            h.expected.as_deref().unwrap_or_default()
                        ),
                    ));
                }
            }
        }
        None
    }
}

/// Reads and validates a config file, then applies command-line overrides.
pub fn load_config(path: &std::path::Path, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(path)?;
    overrides.apply(&mut cfg)?;
    Ok(cfg)
}
