//! Subcommands and their text output.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use cubeoracle::verify_chi;
use morsefib::fibretop::{PoincareResult, Side};

use crate::error::{CliError, Failure};
use crate::pipeline::{self, oracle_config, Analysis, Overrides, Stages};
use crate::render::{render_svg, Sides};
use crate::report::RunReport;

#[derive(Debug, Parser)]
#[command(name = "morsefib", version, about = "Certified real morsifications and Milnor fibre topology")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Run configuration file.
    pub config: PathBuf,
    /// Milnor ball radius.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Fibre level.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Parameter values, comma separated rationals such as 1/10.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub t: Option<Vec<String>>,
    /// Seed of a generic linear family.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Oracle grid resolution N (the oracle also runs at 2N).
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Oracle cube selection: center or interval.
    #[arg(long)]
    pub mode: Option<String>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            delta: self.delta,
            eta: self.eta,
            t: self.t.clone(),
            seed: self.seed,
            resolution: self.resolution,
            mode: self.mode.clone(),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full pipeline with JSON report.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Report path (overrides [output] report).
        #[arg(long)]
        report: Option<PathBuf>,
        /// Also write an SVG cross-section (plane curves only).
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Leave timings out of the report.
        #[arg(long)]
        no_timings: bool,
    },
    /// SVG cross-section of a plane-curve family.
    Render {
        #[command(flatten)]
        common: Common,
        /// both, positive or negative.
        #[arg(long, default_value = "both")]
        side: String,
        /// Output path (overrides [output] svg; standard output otherwise).
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Family, Milnor number, strength verdict and stability of m(t).
    Morsify {
        #[command(flatten)]
        common: Common,
    },
    /// Certified critical points with enclosures and indices.
    Critical {
        #[command(flatten)]
        common: Common,
    },
    /// Euler characteristics of both fibres.
    Chi {
        #[command(flatten)]
        common: Common,
    },
    /// Predicted homology and oracle Betti numbers of both fibres.
    Betti {
        #[command(flatten)]
        common: Common,
    },
    /// Handle decompositions and vanishing-cycle degrees.
    Handles {
        #[command(flatten)]
        common: Common,
    },
    /// Index formula against the cubical oracle.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Replace the certified indices by this list before comparing.
        #[arg(long, value_delimiter = ',')]
        indices: Option<Vec<usize>>,
    },
}

/// Parses arguments, runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    init_threads();
    let mut out = String::new();
    let code = match execute(&cli.command, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.as_bytes());
    let _ = stdout.flush();
    code
}

/// Sizes the global worker pool from `MORSEFIB_THREADS`.
fn init_threads() {
    if let Some(n) = std::env::var("MORSEFIB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(format!("writing {}: {e}", path.display())))
}

/// Runs one command, appending its text output to `out`; returns the exit
/// code of a completed run.
pub fn execute(command: &Command, out: &mut String) -> Result<i32, CliError> {
    match command {
        Command::Analyze {
            common,
            report,
            svg,
            no_timings,
        } => cmd_analyze(common, report.as_deref(), svg.as_deref(), !no_timings, out),
        Command::Render { common, side, svg } => {
            let sides: Sides = side.parse().map_err(CliError::config)?;
            cmd_render(common, sides, svg.as_deref(), out)
        }
        Command::Morsify { common } => section(common, Stages { stability: true, ..Stages::NONE }, out, print_morsify),
        Command::Critical { common } => section(common, Stages::NONE, out, print_critical),
        Command::Chi { common } => section(common, Stages::NONE, out, print_chi),
        Command::Betti { common } => section(common, Stages::ALL, out, print_betti),
        Command::Handles { common } => section(common, Stages::NONE, out, print_handles),
        Command::Verify { common, indices } => cmd_verify(common, indices.as_deref(), out),
    }
}

fn section(
    common: &Common,
    stages: Stages,
    out: &mut String,
    print: fn(&Analysis, &mut String),
) -> Result<i32, CliError> {
    let cfg = pipeline::load_config(&common.config, &common.overrides())?;
    let a = pipeline::analyze(&cfg, stages)?;
    print(&a, out);
    match a.failure() {
        Some(e) => {
            eprintln!("error: {e}");
            Ok(e.exit_code())
        }
        None => Ok(0),
    }
}

/// Full pipeline; the report is written even when the run fails.
pub fn cmd_analyze(
    common: &Common,
    report: Option<&Path>,
    svg: Option<&Path>,
    timings: bool,
    out: &mut String,
) -> Result<i32, CliError> {
    let cfg = pipeline::load_config(&common.config, &common.overrides())?;
    let report_path = report
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.report.as_ref().map(|p| resolve(&common.config, p)));
    let svg_path = svg
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.svg.as_ref().map(|p| resolve(&common.config, p)));

    let analysis = pipeline::analyze(&cfg, Stages::ALL);
    let (rep, result) = match &analysis {
        Ok(a) => (RunReport::from_analysis(&cfg, a, timings), Ok(a)),
        Err(e) => (RunReport::failed(&cfg, e), Err(e.clone())),
    };
    if let Some(path) = &report_path {
        write_file(path, &rep.to_json())?;
    }
    let a = result?;
    print_summary(a, out);
    if let Some(path) = &svg_path {
        if a.built.family.space_dim() == 2 {
            let doc = render_svg(&a.f_t, a.selection.delta, a.selection.eta, &a.selection.points, Sides::Both)?;
            write_file(path, &doc)?;
        } else {
            eprintln!("note: no SVG for a germ in {} variables", a.built.family.space_dim());
        }
    }
    if let Some(path) = &report_path {
        let _ = writeln!(out, "report: {}", path.display());
    }
    if rep.status.exit_code != 0 {
        eprintln!("error: {}", rep.status.message);
    }
    Ok(rep.status.exit_code)
}

/// Paths in a config file are relative to the file.
fn resolve(config: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        return p.to_path_buf();
    }
    config.parent().map_or_else(|| p.to_path_buf(), |d| d.join(p))
}

pub fn cmd_render(common: &Common, sides: Sides, svg: Option<&Path>, out: &mut String) -> Result<i32, CliError> {
    let cfg = pipeline::load_config(&common.config, &common.overrides())?;
    let vars = cfg.germ.variables.len();
    if vars != 2 {
        return Err(CliError::new(
            Failure::Usage,
            "render",
            format!("cross-sections need a plane curve germ (n = 1, two variables); this germ has {vars} variable(s)"),
        ));
    }
    let (_, sel, f_t) = pipeline::certify(&cfg)?;
    let doc = render_svg(&f_t, sel.delta, sel.eta, &sel.points, sides)?;
    let path = svg
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.svg.as_ref().map(|p| resolve(&common.config, p)));
    match path {
        Some(p) => {
            write_file(&p, &doc)?;
            let _ = writeln!(out, "svg: {}", p.display());
        }
        None => out.push_str(&doc),
    }
    Ok(0)
}

pub fn cmd_verify(common: &Common, indices: Option<&[usize]>, out: &mut String) -> Result<i32, CliError> {
    let cfg = pipeline::load_config(&common.config, &common.overrides())?;
    let (_, sel, f_t) = pipeline::certify(&cfg)?;
    let mut points = sel.points.clone();
    if let Some(forced) = indices {
        if forced.len() != points.len() {
            return Err(CliError::config(format!(
                "--indices lists {} values for {} critical points",
                forced.len(),
                points.len()
            )));
        }
        for (p, &l) in points.iter_mut().zip(forced) {
            p.index = Some(l);
        }
    }
    let mut code = 0;
    for side in [Side::Positive, Side::Negative] {
        let ocfg = oracle_config(&cfg, side)?;
        match verify_chi(&f_t, sel.delta, sel.eta, &points, side, &ocfg) {
            Ok(c) => {
                let oracle: Vec<String> = c.oracle.iter().map(|(n, x)| format!("{x} (N={n})")).collect();
                let verdict = if c.agrees { "agree" } else { "DISAGREE" };
                let _ = writeln!(
                    out,
                    "{side}: formula chi = {}, oracle chi = {} -> {verdict}",
                    c.formula,
                    oracle.join(", ")
                );
                if let Some(f) = c.filled_chi {
                    let _ = writeln!(out, "filled region chi = {f}");
                    if f != 1 {
                        code = Failure::OracleDisagreement.exit_code();
                    }
                }
                if !c.agrees {
                    code = Failure::OracleDisagreement.exit_code();
                }
            }
            Err(e) => {
                let err = CliError::new(
                    match e {
                        cubeoracle::OracleError::Unconverged { .. } => Failure::OracleDisagreement,
                        _ => Failure::Usage,
                    },
                    "cubeoracle",
                    e.to_string(),
                );
                let _ = writeln!(out, "{side}: oracle failed: {e}");
                if code == 0 {
                    code = err.exit_code();
                }
            }
        }
    }
    Ok(code)
}

fn interval(lo: f64, hi: f64) -> String {
    format!("[{lo:.12e}, {hi:.12e}]")
}

fn print_summary(a: &Analysis, out: &mut String) {
    print_morsify(a, out);
    print_critical(a, out);
    print_chi(a, out);
    for s in &a.oracle {
        match &s.chi {
            Ok(c) => {
                let oracle: Vec<String> = c.oracle.iter().map(|(n, x)| format!("{x} (N={n})")).collect();
                let filled = c.filled_chi.map_or(String::new(), |f| format!(", filled region chi {f}"));
                let _ = writeln!(out, "oracle chi {}: {}{filled}", c.side, oracle.join(", "));
            }
            Err(e) => {
                let _ = writeln!(out, "oracle chi {}: failed ({e})", s.side);
            }
        }
    }
    print_betti(a, out);
    print_handles(a, out);
    match a.failure() {
        None => {
            let _ = writeln!(out, "status: ok");
        }
        Some(e) => {
            let _ = writeln!(out, "status: exit {} ({})", e.exit_code(), e.message);
        }
    }
}

fn print_morsify(a: &Analysis, out: &mut String) {
    let fam = &a.built.family;
    let _ = writeln!(out, "family: F = {}", a.built.display(fam.deformation()));
    if let Some(seed) = a.built.seed_used {
        let _ = writeln!(out, "seed: {seed}");
    }
    let t: Vec<String> = a.selection.t.iter().map(ToString::to_string).collect();
    let _ = writeln!(
        out,
        "scales: delta = {} eta = {} t = ({})",
        a.selection.delta,
        a.selection.eta,
        t.join(", ")
    );
    match &a.strength {
        Ok(v) => {
            let mu = v.mu.map_or("unknown".to_string(), |m| m.to_string());
            let _ = writeln!(out, "strength: {:?} (m = {}, mu = {mu})", v.kind, v.m);
        }
        Err(e) => {
            let _ = writeln!(out, "strength: {e}");
        }
    }
    if let Some(s) = &a.stability {
        let ms: Vec<String> = s
            .samples
            .iter()
            .map(|x| x.m.as_ref().map_or("?".to_string(), ToString::to_string))
            .collect();
        let _ = writeln!(
            out,
            "stability: m = [{}] {}",
            ms.join(", "),
            if s.stable { "stable" } else { "UNSTABLE" }
        );
    }
}

fn print_critical(a: &Analysis, out: &mut String) {
    let _ = writeln!(out, "critical points: {}", a.selection.points.len());
    for (i, p) in a.selection.points.iter().enumerate() {
        let boxes: Vec<String> = p.enclosure.sides().iter().map(|s| interval(s.lo, s.hi)).collect();
        let index = p.index.map_or("?".to_string(), |l| l.to_string());
        let _ = writeln!(
            out,
            "  p{} index {index} value {} box {}",
            i + 1,
            interval(p.value.lo, p.value.hi),
            boxes.join(" x ")
        );
    }
}

fn print_chi(a: &Analysis, out: &mut String) {
    let _ = writeln!(out, "χ⁺={} χ⁻={}", a.topology.chi_plus, a.topology.chi_minus);
}

fn poincare(p: &Option<PoincareResult>) -> String {
    match p {
        Some(PoincareResult::Poly(p)) => p.to_string(),
        Some(PoincareResult::Empty) => "empty fibre".into(),
        None => "not determined".into(),
    }
}

fn print_betti(a: &Analysis, out: &mut String) {
    let t = &a.topology;
    let _ = writeln!(out, "poincare: P+ = {}  P- = {}", poincare(&t.poincare_plus), poincare(&t.poincare_minus));
    match &t.homology {
        morsefib::fibretop::BouquetHomology::Groups { groups } => {
            let g: Vec<String> = groups.iter().enumerate().map(|(k, g)| format!("H_{k}={g}")).collect();
            let _ = writeln!(out, "bouquet: {}", g.join(" "));
        }
        morsefib::fibretop::BouquetHomology::HypothesisNotMet { reason } => {
            let _ = writeln!(out, "bouquet: not applicable ({reason})");
        }
    }
    if let Some(why) = &a.oracle_skipped {
        let _ = writeln!(out, "oracle: skipped ({why})");
    }
    for s in &a.oracle {
        if let Some(h) = &s.homology {
            let verdict = match h.agrees {
                Some(true) => "agrees",
                Some(false) => "DISAGREES",
                None => "no prediction",
            };
            let _ = writeln!(
                out,
                "oracle betti {}: {:?} at N={} ({} -> {} cells) {verdict}",
                h.side, h.betti, h.resolution, h.cells_before, h.cells_after
            );
        }
    }
}

fn print_handles(a: &Analysis, out: &mut String) {
    let t = &a.topology;
    for h in [&t.handles_plus, &t.handles_minus] {
        let dims: Vec<String> = h
            .handles
            .iter()
            .map(|x| format!("D^{} x D^{}", x.dims.0, x.dims.1))
            .collect();
        let _ = writeln!(out, "handles {}: [{}]", h.side, dims.join(", "));
    }
    let cycles: Vec<String> = t
        .vanishing_cycles
        .iter()
        .map(|v| {
            let f = |d: Option<usize>| d.map_or("-".to_string(), |d| format!("S^{d}"));
            format!("({}, {})", f(v.positive), f(v.negative))
        })
        .collect();
    let _ = writeln!(out, "vanishing cycles (+, -): [{}]", cycles.join(", "));
    let _ = writeln!(out, "contractible: {}", if t.contractible { "yes" } else { "no" });
}
