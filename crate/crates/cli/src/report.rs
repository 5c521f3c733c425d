//! JSON run report, schema version 1.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use cubeoracle::{ChiComparison, Nonemptiness};
use morsefib::certfind::{CertifiedCriticalPoint, StabilityScan, ValidationReport};
use morsefib::fibretop::TopologyReport;
use morsefib::morsify::StrengthVerdict;
use morsefib::IntervalBox;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::pipeline::{Analysis, HomologyCheck};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyInfo {
    pub base: String,
    pub deformation: String,
    pub variables: Vec<String>,
    pub seed_used: Option<u64>,
    /// Perturbation direction of a linear family, as exact rationals.
    pub direction: Option<Vec<String>>,
    pub milnor_number: Option<u32>,
    pub ade_type: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalesInfo {
    pub delta: f64,
    pub eta: f64,
    /// Exact parameter values.
    pub t: Vec<String>,
    pub t_approx: Vec<f64>,
    pub specialized: String,
    pub validation: ValidationReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub t: Vec<String>,
    pub m: Option<usize>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityInfo {
    pub samples: Vec<StabilityRow>,
    pub stable: bool,
}

impl From<&StabilityScan> for StabilityInfo {
    fn from(s: &StabilityScan) -> Self {
        StabilityInfo {
            samples: s
                .samples
                .iter()
                .map(|row| StabilityRow {
                    t: row.t.iter().map(ToString::to_string).collect(),
                    m: row.m.as_ref().ok().copied(),
                    error: row.m.as_ref().err().cloned(),
                })
                .collect(),
            stable: s.stable,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum NonemptyInfo {
    Nonempty { witness: IntervalBox },
    Empty,
    Undecided,
}

impl From<&Nonemptiness> for NonemptyInfo {
    fn from(n: &Nonemptiness) -> Self {
        match n {
            Nonemptiness::Nonempty { witness } => NonemptyInfo::Nonempty {
                witness: witness.clone(),
            },
            Nonemptiness::Empty => NonemptyInfo::Empty,
            Nonemptiness::Undecided => NonemptyInfo::Undecided,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonemptyPair {
    pub positive: NonemptyInfo,
    pub negative: NonemptyInfo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleInfo {
    pub skipped: Option<String>,
    pub chi: Vec<ChiComparison>,
    pub homology: Vec<HomologyCheck>,
    pub errors: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Status {
    pub exit_code: i32,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub config: RunConfig,
    pub family: Option<FamilyInfo>,
    pub scales: Option<ScalesInfo>,
    pub critical_points: Vec<CertifiedCriticalPoint>,
    pub strength: Option<StrengthVerdict>,
    pub stability: Option<StabilityInfo>,
    pub nonempty: Option<NonemptyPair>,
    pub topology: Option<TopologyReport>,
    pub oracle: Option<OracleInfo>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl RunReport {
    /// Report for a run that stopped with `err` before any analysis.
    pub fn failed(config: &RunConfig, err: &CliError) -> Self {
        RunReport {
            schema: SCHEMA,
            config: config.clone(),
            family: None,
            scales: None,
            critical_points: Vec::new(),
            strength: None,
            stability: None,
            nonempty: None,
            topology: None,
            oracle: None,
            status: Status {
                exit_code: err.exit_code(),
                message: err.to_string(),
            },
            timings: None,
        }
    }

    pub fn from_analysis(config: &RunConfig, a: &Analysis, timings: bool) -> Self {
        let fam = &a.built.family;
        let family = FamilyInfo {
            base: a.built.display(fam.base()),
            deformation: a.built.display(fam.deformation()),
            variables: a.built.variables.clone(),
            seed_used: a.built.seed_used,
            direction: fam
                .direction()
                .map(|d| d.iter().map(ToString::to_string).collect()),
            milnor_number: fam.milnor_number(),
            ade_type: fam.ade_type().map(|t| t.to_string()),
        };
        let sel = &a.selection;
        let scales = ScalesInfo {
            delta: sel.delta,
            eta: sel.eta,
            t: sel.t.iter().map(ToString::to_string).collect(),
            t_approx: sel.t_f64(),
            specialized: a.built.display(&a.f_t),
            validation: sel.validation.clone(),
        };
        let oracle = if a.oracle_skipped.is_some() && a.oracle.is_empty() {
            OracleInfo {
                skipped: a.oracle_skipped.clone(),
                chi: Vec::new(),
                homology: Vec::new(),
                errors: Vec::new(),
            }
        } else {
            OracleInfo {
                skipped: None,
                chi: a.oracle.iter().filter_map(|s| s.chi.as_ref().ok().cloned()).collect(),
                homology: a.oracle.iter().filter_map(|s| s.homology.clone()).collect(),
                errors: a
                    .oracle
                    .iter()
                    .filter_map(|s| s.chi.as_ref().err().map(|e| format!("{}: {e}", s.side)))
                    .collect(),
            }
        };
        let status = match a.failure() {
            Some(e) => Status {
                exit_code: e.exit_code(),
                message: e.to_string(),
            },
            None => Status {
                exit_code: 0,
                message: "ok".into(),
            },
        };
        RunReport {
            schema: SCHEMA,
            config: config.clone(),
            family: Some(family),
            scales: Some(scales),
            critical_points: sel.points.clone(),
            strength: a.strength.as_ref().ok().cloned(),
            stability: a.stability.as_ref().map(StabilityInfo::from),
            nonempty: Some(NonemptyPair {
                positive: (&a.nonempty_plus).into(),
                negative: (&a.nonempty_minus).into(),
            }),
            topology: Some(a.topology.clone()),
            oracle: Some(oracle),
            status,
            timings: timings.then(|| a.timings.clone()),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
