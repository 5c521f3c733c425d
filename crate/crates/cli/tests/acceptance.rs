//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cubeoracle::{
    build_region_complex, collapse, cubical_homology, euler_characteristic, smith_normal_form, verify_chi,
    ChiComparison, CubicalComplex, Mode, RegionSpec,
};
use morsefib::certfind::{
    certify_critical_points, morse_index, stability_scan, verify_certificate, CertError, Certificate,
    CertifiedCriticalPoint, ScaleSelection, Tolerances,
};
use morsefib::fibretop::{
    bouquet_homology, khimshiashvili_chi, poincare_bouquet, poincare_single, BouquetHomology, HomologyGroup,
    PoincareResult, Side, TopologyReport,
};
use morsefib::morsify::{classify_strength, DeformationFamily, Strength};
use morsefib::{parse_polynomial, Interval, IntervalBox, Polynomial};
use morsefib_cli::commands::{cmd_analyze, Common};
use morsefib_cli::config::RunConfig;
use morsefib_cli::pipeline::{self, family_and_scales, oracle_config};

/// Wall-clock limit per germ of ambient dimension at most 3.
const LIMIT_SMALL: Duration = Duration::from_secs(60);
/// Wall-clock limit for the four-variable germ.
const LIMIT_4D: Duration = Duration::from_secs(600);
/// Resolution for the homology of the thickened four-dimensional fibre.
const HOMOLOGY_N_4D: usize = 16;
const DUALITY_SAMPLES: usize = 200;
const COLLAPSE_SAMPLES: usize = 50;
const SNF_SAMPLES: usize = 100;
const SNF_MAX_SIZE: usize = 12;
const STABILITY_SAMPLES: usize = 5;

struct Germ {
    config: &'static str,
    /// Indices ordered by critical value.
    indices: &'static [usize],
    chi: (i64, i64),
}

const SUITE: &[Germ] = &[
    Germ { config: "saddle.ini", indices: &[1], chi: (2, 2) },
    Germ { config: "min2.ini", indices: &[0], chi: (0, 0) },
    Germ { config: "max_saddle.ini", indices: &[1], chi: (2, 2) },
    Germ { config: "cusp_minus.ini", indices: &[], chi: (1, 1) },
    Germ { config: "cusp_plus.ini", indices: &[0, 1], chi: (1, 1) },
    Germ { config: "a3_weak.ini", indices: &[0], chi: (2, 0) },
    Germ { config: "a3_strong.ini", indices: &[0, 0, 1], chi: (2, 0) },
    Germ { config: "quadric4.ini", indices: &[2], chi: (0, 0) },
];

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn load(name: &str) -> RunConfig {
    RunConfig::load(&config_path(name)).unwrap()
}

/// Certified data and oracle comparisons of one suite germ.
struct Run {
    name: &'static str,
    cfg: RunConfig,
    sel: ScaleSelection,
    f_t: Polynomial,
    chi: Vec<ChiComparison>,
    elapsed: Duration,
}

impl Run {
    fn dim(&self) -> usize {
        self.f_t.nvars()
    }

    /// Every region complex the oracle built for this germ.
    fn regions(&self) -> Vec<RegionSpec> {
        let mut out = Vec::new();
        for c in &self.chi {
            for &(n, _) in &c.oracle {
                out.push(self.spec(c.window, n));
            }
            if c.filled_chi.is_some() {
                out.push(self.spec((-self.sel.eta, self.sel.eta), c.oracle[0].0));
            }
        }
        out
    }

    fn spec(&self, window: (f64, f64), resolution: usize) -> RegionSpec {
        RegionSpec {
            g: self.f_t.clone(),
            window,
            delta: self.sel.delta,
            resolution,
        }
    }
}

fn run_suite() -> Vec<Result<Run, String>> {
    SUITE
        .iter()
        .map(|g| {
            let start = Instant::now();
            let cfg = load(g.config);
            let (_, sel, f_t) = pipeline::certify(&cfg).map_err(|e| format!("{}: {e}", g.config))?;
            let mut chi = Vec::new();
            for side in [Side::Positive, Side::Negative] {
                let ocfg = oracle_config(&cfg, side).map_err(|e| e.to_string())?;
                let c = verify_chi(&f_t, sel.delta, sel.eta, &sel.points, side, &ocfg)
                    .map_err(|e| format!("{}: {e}", g.config))?;
                chi.push(c);
            }
            Ok(Run {
                name: g.config,
                cfg,
                sel,
                f_t,
                chi,
                elapsed: start.elapsed(),
            })
        })
        .collect()
}

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn runs(suite: &[Result<Run, String>]) -> Result<Vec<&Run>, String> {
    suite.iter().map(|r| r.as_ref().map_err(Clone::clone)).collect()
}

fn criterion_1(suite: &[Result<Run, String>]) -> Outcome {
    let runs = runs(suite)?;
    for (g, r) in SUITE.iter().zip(&runs) {
        let indices: Vec<usize> = r.sel.points.iter().map(|p| p.index.unwrap()).collect();
        ensure(indices == g.indices, || format!("{}: indices {indices:?}, expected {:?}", g.config, g.indices))?;
        for c in &r.chi {
            let expected = match c.side {
                Side::Positive => g.chi.0,
                Side::Negative => g.chi.1,
            };
            ensure(c.formula == expected, || format!("{}: {} formula chi {} != {expected}", g.config, c.side, c.formula))?;
            ensure(c.oracle.len() == 2 && c.oracle[1].0 == 2 * c.oracle[0].0, || format!("{}: oracle not at N and 2N", g.config))?;
            ensure(c.oracle.iter().all(|&(_, x)| x == c.formula), || {
                format!("{}: {} oracle {:?} vs formula {}", g.config, c.side, c.oracle, c.formula)
            })?;
        }
        let limit = if r.dim() >= 4 { LIMIT_4D } else { LIMIT_SMALL };
        ensure(r.elapsed <= limit, || format!("{}: {:?} over the {:?} limit", g.config, r.elapsed, limit))?;
    }
    let slowest = runs.iter().max_by_key(|r| r.elapsed).unwrap();
    Ok(format!(
        "{} germs, both fibres, formula = oracle at N and 2N; slowest {} in {:.2}s",
        runs.len(),
        slowest.name,
        slowest.elapsed.as_secs_f64()
    ))
}

fn criterion_2(suite: &[Result<Run, String>]) -> Outcome {
    let runs = runs(suite)?;
    for r in &runs {
        let filled: Vec<i64> = r.chi.iter().filter_map(|c| c.filled_chi).collect();
        ensure(filled == vec![1], || format!("{}: filled chi {filled:?}", r.name))?;
    }
    Ok(format!("filled region chi = 1 for all {} germs", runs.len()))
}

fn criterion_3(suite: &[Result<Run, String>]) -> Outcome {
    let runs = runs(suite)?;
    let r = runs.iter().find(|r| r.name == "quadric4.ini").ok_or("4D germ missing")?;
    ensure(r.sel.m() == 1 && r.sel.points[0].index == Some(2), || "expected m = 1, index 2".into())?;
    let indices = [2usize];
    let b = bouquet_homology(1, &indices, 3, true);
    let expected = BouquetHomology::Groups {
        groups: vec![HomologyGroup::free(1), HomologyGroup::free(1), HomologyGroup::default(), HomologyGroup::default()],
    };
    ensure(b == expected, || format!("bouquet {b:?}"))?;
    let neg = r.chi.iter().find(|c| c.side == Side::Negative).unwrap();
    let complex = build_region_complex(&r.spec(neg.window, HOMOLOGY_N_4D), Mode::Center).map_err(|e| e.to_string())?;
    let reduced = collapse(&complex);
    let h = cubical_homology(&reduced).map_err(|e| e.to_string())?;
    ensure(h.betti[..4] == [1, 1, 0, 0] && h.betti[4] == 0, || format!("betti {:?}", h.betti))?;
    ensure(h.is_torsion_free(), || format!("torsion {:?}", h.torsion))?;
    Ok(format!(
        "bouquet H_0 = H_1 = Z; oracle betti {:?} at N = {HOMOLOGY_N_4D} ({} -> {} cells), torsion-free",
        &h.betti[..4],
        complex.num_cells(),
        reduced.num_cells()
    ))
}

fn family_of(name: &str) -> DeformationFamily {
    let (built, _) = family_and_scales(&load(name)).unwrap();
    built.family
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn disjoint_values(points: &[CertifiedCriticalPoint]) -> bool {
    points
        .iter()
        .enumerate()
        .all(|(i, p)| points[i + 1..].iter().all(|o| !p.value.intersects(&o.value)))
}

fn criterion_4(_: &[Result<Run, String>]) -> Outcome {
    let cfg = Tolerances::default();
    let (weak, sel) = family_and_scales(&load("a3_weak.ini")).map_err(|e| e.to_string())?;
    let v = classify_strength(&weak.family, sel.m()).map_err(|e| e.to_string())?;
    ensure(v.m == 1 && v.kind == Strength::Weak && v.mu == Some(3), || format!("weak family: {v:?}"))?;

    let strong = family_of("a3_strong.ini");
    let samples = [q(1, 10), q(1, 3), q(2, 3), q(1, 1), q(11, 10)];
    let bound = q(32, 27);
    for t in &samples {
        ensure(t.is_positive() && *t < bound, || format!("t = {t} outside (0, 32/27)"))?;
        let ft = strong.specialize(std::slice::from_ref(t)).map_err(|e| e.to_string())?;
        let pts = certify_critical_points(&ft, 2.0, &cfg).map_err(|e| format!("t = {t}: {e}"))?;
        ensure(pts.len() == 3, || format!("t = {t}: m = {}", pts.len()))?;
        ensure(pts.iter().all(CertifiedCriticalPoint::is_certified), || format!("t = {t}: uncertified point"))?;
        ensure(disjoint_values(&pts), || format!("t = {t}: overlapping critical values"))?;
        let v = classify_strength(&strong, pts.len()).map_err(|e| e.to_string())?;
        ensure(v.kind == Strength::Strong, || format!("t = {t}: {v:?}"))?;
    }
    Ok("x^4 - tx: m = 1, Weak; x^4 - 4tx^2 + 4t^2x: m = 3 with distinct values at t = 1/10, 1/3, 2/3, 1, 11/10 (delta = 2), Strong".into())
}

fn criterion_5(_: &[Result<Run, String>]) -> Outcome {
    let cfg = Tolerances::default();
    let mut summary = Vec::new();
    for g in SUITE {
        let mut rc = load(g.config);
        // constant families are scanned from t = 1/10
        if rc.scales.t.as_deref() == Some(&["0".to_string()]) {
            rc.scales.t = Some(vec!["1/10".into()]);
        }
        let (built, sel) = family_and_scales(&rc).map_err(|e| format!("{}: {e}", g.config))?;
        let scan = stability_scan(&built.family, &sel, STABILITY_SAMPLES, &cfg).map_err(|e| e.to_string())?;
        ensure(scan.samples.len() == STABILITY_SAMPLES, || format!("{}: sample count", g.config))?;
        ensure(scan.stable, || format!("{}: unstable {:?}", g.config, scan.samples))?;
        let m = scan.samples[0].m.clone().unwrap();
        if g.config == "cusp_minus.ini" {
            ensure(m == 0, || format!("y^2 - x^3 - tx: m = {m}"))?;
        }
        summary.push(format!("{}:{m}", g.config.trim_end_matches(".ini")));
    }
    Ok(format!("constant m over {STABILITY_SAMPLES} samples [{}]", summary.join(" ")))
}

fn fake_points(indices: &[usize]) -> Vec<CertifiedCriticalPoint> {
    indices
        .iter()
        .enumerate()
        .map(|(i, &l)| CertifiedCriticalPoint {
            enclosure: IntervalBox::from_point(&[i as f64]),
            midpoint: vec![i as f64],
            value: Interval::point(i as f64 / 8.0 - 0.3),
            index: Some(l),
            certificate: Certificate::Uncertified,
        })
        .collect()
}

fn poincare_matches(p: &Option<PoincareResult>, chi: i64) -> bool {
    match p {
        None => true,
        Some(PoincareResult::Empty) => chi == 0,
        Some(PoincareResult::Poly(p)) => p.eval(-1) == chi,
    }
}

fn criterion_6(_: &[Result<Run, String>]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d6f7273);
    let mut evaluated = 0;
    for _ in 0..DUALITY_SAMPLES {
        let n = rng.random_range(0..=4usize);
        let size = rng.random_range(0..=6usize);
        let bouquet = n % 2 == 1 && n > 1 && rng.random_bool(0.3);
        let indices: Vec<usize> = (0..size)
            .map(|_| if bouquet { n.div_ceil(2) } else { rng.random_range(0..=n + 1) })
            .collect();
        let (cp, cm) = khimshiashvili_chi(&indices, n).map_err(|e| e.to_string())?;
        let sign = if (n + 1) % 2 == 0 { 1 } else { -1 };
        ensure(1 - cp == sign * (1 - cm), || format!("duality fails for n = {n}, {indices:?}: ({cp}, {cm})"))?;

        // a single minimum has an empty negative fibre, a single maximum an
        // empty positive one
        let single = |l: usize| size == 1 && indices[0] == l;
        let (ne_plus, ne_minus) = (!single(n + 1), !single(0));
        let report = TopologyReport::build(&fake_points(&indices), n, ne_plus, ne_minus).map_err(|e| e.to_string())?;
        ensure(poincare_matches(&report.poincare_plus, cp), || format!("P+ at -1, n = {n}, {indices:?}"))?;
        ensure(poincare_matches(&report.poincare_minus, cm), || format!("P- at -1, n = {n}, {indices:?}"))?;
        evaluated += usize::from(report.poincare_plus.is_some()) + usize::from(report.poincare_minus.is_some());
        if size == 1 {
            for (side, chi, ne) in [(Side::Positive, cp, ne_plus), (Side::Negative, cm, ne_minus)] {
                let p = poincare_single(indices[0], n, side, ne).map_err(|e| e.to_string())?;
                ensure(poincare_matches(&Some(p), chi), || format!("single {side}, n = {n}, {indices:?}"))?;
            }
        }
        if bouquet && size > 0 {
            let (bp, bm) = poincare_bouquet(size, indices[0], n);
            ensure(bp.eval(-1) == cp && bm.eval(-1) == cm, || format!("bouquet n = {n}, m = {size}"))?;
        }
    }
    Ok(format!("{DUALITY_SAMPLES} random index multisets; {evaluated} Poincaré polynomials evaluated at u = -1"))
}

/// Univariate coefficients, constant term first.
fn coefficients(p: &Polynomial) -> Vec<BigRational> {
    let deg = p.total_degree().unwrap_or(0) as usize;
    (0..=deg).map(|k| p.coefficient(&[k as u32])).collect()
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn derive(p: &[BigRational]) -> Vec<BigRational> {
    trim(p.iter().enumerate().skip(1).map(|(k, c)| c * BigRational::from_integer(BigInt::from(k))).collect())
}

/// Remainder of `a` divided by `b`.
fn remainder(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = trim(a.to_vec());
    let lead = b.last().unwrap().clone();
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let factor = r.last().unwrap() / &lead;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &factor * c;
        }
        r = trim(r);
    }
    r
}

fn eval(p: &[BigRational], x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

fn sign_changes(chain: &[Vec<BigRational>], x: &BigRational) -> usize {
    let signs: Vec<bool> = chain
        .iter()
        .map(|p| eval(p, x))
        .filter(|v| !v.is_zero())
        .map(|v| v.is_positive())
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots of `p` in `[a, b]` by Sturm's theorem.
fn sturm_count(p: &[BigRational], a: &BigRational, b: &BigRational) -> usize {
    let p = trim(p.to_vec());
    if p.len() <= 1 {
        return 0;
    }
    let mut chain = vec![p.clone(), derive(&p)];
    loop {
        let k = chain.len();
        let r = remainder(&chain[k - 2], &chain[k - 1]);
        if r.is_empty() {
            break;
        }
        chain.push(r.into_iter().map(|c| -c).collect());
    }
    let at_a = usize::from(eval(&p, a).is_zero());
    sign_changes(&chain, a) - sign_changes(&chain, b) + at_a
}

fn sturm_critical_count(f: &Polynomial, delta: f64) -> usize {
    let d = BigRational::from_float(delta).unwrap();
    sturm_count(&derive(&coefficients(f)), &-d.clone(), &d)
}

fn criterion_7(suite: &[Result<Run, String>]) -> Outcome {
    let runs = runs(suite)?;
    let mut certified = 0;
    let mut sturm = Vec::new();
    for r in &runs {
        for p in &r.sel.points {
            ensure(matches!(p.certificate, Certificate::NewtonUnique { .. }), || format!("{}: uncertified point", r.name))?;
            ensure(verify_certificate(&r.f_t, p), || format!("{}: certificate does not re-verify", r.name))?;
            certified += 1;
        }
        if r.dim() == 1 {
            let s = sturm_critical_count(&r.f_t, r.sel.delta);
            ensure(s == r.sel.m(), || format!("{}: m = {} but Sturm count {s}", r.name, r.sel.m()))?;
            sturm.push(format!("{}:{s}", r.name.trim_end_matches(".ini")));
        }
    }
    let strong = family_of("a3_strong.ini");
    for t in [q(1, 10), q(1, 2), q(1, 1)] {
        let ft = strong.specialize(std::slice::from_ref(&t)).unwrap();
        let m = certify_critical_points(&ft, 2.0, &Tolerances::default()).map_err(|e| e.to_string())?.len();
        let s = sturm_critical_count(&ft, 2.0);
        ensure(m == s, || format!("strong A3 at t = {t}: m = {m}, Sturm {s}"))?;
    }

    let cubic = parse_polynomial("x^3", &["x"]).unwrap();
    let b = IntervalBox::cube(1, 1e-9);
    let candidate = CertifiedCriticalPoint::uncertified(b.clone(), cubic.interval_evaluate(&b).unwrap());
    let verdict = morse_index(&cubic, &candidate, &Tolerances::default());
    ensure(matches!(verdict, Err(CertError::DegenerateHessian { .. })), || format!("x^3 gave {verdict:?}"))?;
    Ok(format!(
        "{certified} points NewtonUnique; Sturm counts agree [{}] and at 3 strong-A3 samples; x^3 -> DegenerateHessian",
        sturm.join(" ")
    ))
}

fn homology_signature(c: &CubicalComplex) -> Result<(Vec<usize>, Vec<Vec<BigInt>>), String> {
    let h = cubical_homology(c).map_err(|e| e.to_string())?;
    Ok((h.betti, h.torsion))
}

fn random_polynomial(rng: &mut ChaCha8Rng, vars: &[&str]) -> Polynomial {
    let mut terms = Vec::new();
    for _ in 0..rng.random_range(2..=5) {
        let c = rng.random_range(-3..=3i32);
        if c == 0 {
            continue;
        }
        let mono: Vec<String> = vars
            .iter()
            .filter_map(|v| {
                let e = rng.random_range(0..=2u32);
                (e > 0).then(|| format!("{v}^{e}"))
            })
            .collect();
        let body = if mono.is_empty() { "1".to_string() } else { mono.join("*") };
        terms.push(format!("{c}*{body}"));
    }
    if terms.is_empty() {
        terms.push(format!("{}^2", vars[0]));
    }
    parse_polynomial(&terms.join(" + "), vars).unwrap()
}

fn random_matrix(rng: &mut ChaCha8Rng) -> Vec<Vec<BigInt>> {
    let rows = rng.random_range(1..=SNF_MAX_SIZE);
    let cols = rng.random_range(1..=SNF_MAX_SIZE);
    let density = rng.random_range(0.2..1.0);
    (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    if rng.random_bool(density) {
                        BigInt::from(rng.random_range(-9..=9i64))
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// `U A V` for random products `U`, `V` of elementary unimodular operations.
fn unimodular_mix(rng: &mut ChaCha8Rng, a: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut m = a.to_vec();
    let (rows, cols) = (m.len(), m[0].len());
    for _ in 0..3 * (rows + cols) {
        let k = BigInt::from(rng.random_range(-3..=3i64));
        if rng.random_bool(0.5) && rows > 1 {
            let (i, j) = (rng.random_range(0..rows), rng.random_range(0..rows));
            match rng.random_range(0..3) {
                0 if i != j => m.swap(i, j),
                1 => m[i].iter_mut().for_each(|x| *x = -x.clone()),
                _ if i != j => {
                    let src = m[j].clone();
                    m[i].iter_mut().zip(&src).for_each(|(x, y)| *x += &k * y);
                }
                _ => {}
            }
        } else if cols > 1 {
            let (i, j) = (rng.random_range(0..cols), rng.random_range(0..cols));
            match rng.random_range(0..3) {
                0 if i != j => m.iter_mut().for_each(|r| r.swap(i, j)),
                1 => m.iter_mut().for_each(|r| r[i] = -r[i].clone()),
                _ if i != j => m.iter_mut().for_each(|r| {
                    let y = r[j].clone();
                    r[i] += &k * y;
                }),
                _ => {}
            }
        }
    }
    m
}

fn criterion_8(suite: &[Result<Run, String>]) -> Outcome {
    let runs = runs(suite)?;
    let mut complexes = 0;
    for r in &runs {
        let mut specs = r.regions();
        if r.dim() == 4 {
            let neg = r.chi.iter().find(|c| c.side == Side::Negative).unwrap();
            specs.push(r.spec(neg.window, HOMOLOGY_N_4D));
        }
        for spec in specs {
            let c = build_region_complex(&spec, r.cfg.oracle.mode().unwrap()).map_err(|e| e.to_string())?;
            let h = cubical_homology(&c).map_err(|e| e.to_string())?;
            ensure(h.euler_characteristic() == euler_characteristic(&c), || {
                format!("{}: Euler-Poincaré fails at N = {}", r.name, spec.resolution)
            })?;
            complexes += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x636f6c6c);
    for i in 0..COLLAPSE_SAMPLES {
        let d = if i % 3 == 2 { 3 } else { 2 };
        let vars = ["x", "y", "z"];
        let g = random_polynomial(&mut rng, &vars[..d]);
        let a = rng.random_range(-2.0..1.0);
        let spec = RegionSpec {
            g,
            window: (a, a + rng.random_range(0.1..2.0)),
            delta: 1.0,
            resolution: if d == 2 { rng.random_range(6..=20) } else { rng.random_range(4..=10) },
        };
        let c = build_region_complex(&spec, Mode::Center).map_err(|e| e.to_string())?;
        let reduced = collapse(&c);
        ensure(reduced.is_face_closed(), || format!("sample {i}: collapse broke face closure"))?;
        ensure(euler_characteristic(&c) == euler_characteristic(&reduced), || format!("sample {i}: chi changed"))?;
        ensure(homology_signature(&c)? == homology_signature(&reduced)?, || format!("sample {i}: homology changed"))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x736e66);
    for i in 0..SNF_SAMPLES {
        let a = random_matrix(&mut rng);
        let s = smith_normal_form(&a);
        let d = s.divisors();
        ensure(d.windows(2).all(|w| (&w[1] % &w[0]).is_zero()), || format!("matrix {i}: divisors {d:?} not a chain"))?;
        ensure(d.iter().all(|x| x.is_positive()), || format!("matrix {i}: nonpositive divisor"))?;
        let mixed = smith_normal_form(&unimodular_mix(&mut rng, &a));
        ensure(mixed == s, || format!("matrix {i}: SNF changed under unimodular mixing"))?;
    }
    ensure(
        smith_normal_form(&[vec![BigInt::one()]]).divisors() == vec![BigInt::one()],
        || "1x1 identity".into(),
    )?;
    Ok(format!(
        "Euler-Poincaré on {complexes} oracle complexes; collapse invariance on {COLLAPSE_SAMPLES} random regions; SNF chain and unimodular invariance on {SNF_SAMPLES} matrices"
    ))
}

fn criterion_9(_: &[Result<Run, String>]) -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut checked = Vec::new();
    for name in ["cusp_generic.ini", "quadric4.ini"] {
        let common = Common {
            config: config_path(name),
            delta: None,
            eta: None,
            t: None,
            seed: None,
            resolution: None,
            mode: None,
        };
        let mut bytes = Vec::new();
        for k in 0..2 {
            let path = dir.path().join(format!("{k}-{name}.json"));
            let mut out = String::new();
            let code = cmd_analyze(&common, Some(&path), None, false, &mut out).map_err(|e| e.to_string())?;
            ensure(code == 0, || format!("{name}: exit code {code}"))?;
            bytes.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        }
        ensure(bytes[0] == bytes[1], || format!("{name}: reports differ"))?;
        checked.push(format!("{name} ({} bytes)", bytes[0].len()));
    }
    Ok(format!("byte-identical reports: {}", checked.join(", ")))
}

fn main() {
    let suite = run_suite();
    let criteria: [(&str, fn(&[Result<Run, String>]) -> Outcome); 9] = [
        ("index formula vs cubical oracle", criterion_1),
        ("filled region contractible", criterion_2),
        ("bouquet instance in four variables", criterion_3),
        ("strong/weak A3 families", criterion_4),
        ("stability of m(t)", criterion_5),
        ("chi duality and Poincaré polynomials", criterion_6),
        ("certification soundness", criterion_7),
        ("oracle internal properties", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| f(&suite)))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into());
                Err(format!("panicked: {msg}"))
            });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS  {name} [{secs:.2}s]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL  {name} [{secs:.2}s]: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("acceptance: {failed} criterion(s) failed");
        std::process::exit(1);
    }
    println!("acceptance: all 9 criteria passed");
}
